"""Functorial preorders on bundles.

An order decides ``u <= v`` between two bundles of the same kind.  It is
used to relax the relation lifting on both sides (see
:func:`multibisim.lifting.lift_ordered_member`).
"""
from __future__ import annotations

from collections.abc import Iterable
from dataclasses import dataclass
from typing import Union

from .model import (
    BUNDLE_TYPES,
    Bundle,
    KindMismatch,
    MsBundle,
    SetBundle,
    sort_key,
)
from .transforms import ALPHA_KINDS, CODOMAIN, DOMAIN, alpha_bundle


@dataclass(frozen=True)
class Equality:
    pass


@dataclass(frozen=True)
class PowersetInclusion:
    """Subset order on set bundles; equality on distribution bundles."""


@dataclass(frozen=True)
class MultisetInclusion:
    """Pointwise <= on counts for multiset bundles; equality on pmts bundles."""


@dataclass(frozen=True)
class KernelOf:
    alpha: str

    def __post_init__(self):
        if self.alpha not in ALPHA_KINDS:
            raise KindMismatch(f"unknown alpha kind {self.alpha!r}")


@dataclass(frozen=True)
class InducedFrom:
    """``u <= v`` iff ``alpha(u) base alpha(v)``."""

    alpha: str
    base: OrderSpec

    def __post_init__(self):
        if self.alpha not in ALPHA_KINDS:
            raise KindMismatch(f"unknown alpha kind {self.alpha!r}")
        if not applicable(self.base, CODOMAIN[self.alpha]):
            raise KindMismatch(f"{self.base} does not apply to {CODOMAIN[self.alpha]}")


class OrderError(ValueError):
    pass


@dataclass(frozen=True)
class Extensional:
    """A preorder listed pair by pair over a finite universe of bundles.

    Bundles outside the universe are related only to themselves.
    """

    kind: str
    pairs: frozenset
    universe: frozenset

    def __post_init__(self):
        object.__setattr__(self, "pairs", frozenset(self.pairs))
        object.__setattr__(self, "universe", frozenset(self.universe))
        allowed = BUNDLE_TYPES.get(self.kind)
        if allowed is None:
            raise KindMismatch(f"unknown kind {self.kind!r}")
        for b in self.universe:
            if not isinstance(b, allowed):
                raise KindMismatch(f"{type(b).__name__} does not belong to {self.kind}")
        for u, v in self.pairs:
            if u not in self.universe or v not in self.universe:
                raise OrderError(f"pair ({u}, {v}) leaves the declared universe")
        missing = [u for u in self.universe if (u, u) not in self.pairs]
        if missing:
            raise OrderError(f"not reflexive at {len(missing)} bundle(s)")
        succ: dict = {}
        for u, v in self.pairs:
            succ.setdefault(u, set()).add(v)
        for u, vs in succ.items():
            for v in vs:
                if not succ.get(v, set()) <= vs:
                    raise OrderError(f"not transitive through {v}")

    @classmethod
    def closure(cls, kind: str, pairs: Iterable[tuple], universe: Iterable = ()) -> Extensional:
        """Reflexive-transitive closure of ``pairs`` as an :class:`Extensional`."""
        pairs = set(pairs)
        uni = set(universe) | {u for u, _ in pairs} | {v for _, v in pairs}
        pairs |= {(u, u) for u in uni}
        succ = {u: {v for a, v in pairs if a == u} for u in uni}
        changed = True
        while changed:
            changed = False
            for u in uni:
                reach = set().union(*(succ[v] for v in succ[u]))
                if not reach <= succ[u]:
                    succ[u] |= reach
                    changed = True
        return cls(kind, frozenset((u, v) for u in uni for v in succ[u]), frozenset(uni))

    def up(self, u) -> frozenset:
        """Everything above ``u``."""
        return frozenset({u} | {b for a, b in self.pairs if a == u})

    def down(self, v) -> frozenset:
        return frozenset({v} | {a for a, b in self.pairs if b == v})


OrderSpec = Union[Equality, PowersetInclusion, MultisetInclusion, KernelOf, InducedFrom, Extensional]


def applicable(ord: OrderSpec, kind: str) -> bool:
    """Whether ``ord`` is an order on the functor of system kind ``kind``."""
    if isinstance(ord, Equality):
        return kind in BUNDLE_TYPES
    if isinstance(ord, PowersetInclusion):
        return kind in ("lts", "alt-gts")
    if isinstance(ord, MultisetInclusion):
        return kind in ("mts", "alt-mts")
    if isinstance(ord, (KernelOf, InducedFrom)):
        return DOMAIN[ord.alpha] == kind
    if isinstance(ord, Extensional):
        return ord.kind == kind
    return False


def order_holds(ord: OrderSpec, u: Bundle, v: Bundle) -> bool:
    if isinstance(ord, Equality):
        return u == v
    if isinstance(ord, PowersetInclusion):
        if isinstance(u, SetBundle) and isinstance(v, SetBundle):
            return u.elems <= v.elems
        return u == v
    if isinstance(ord, MultisetInclusion):
        if isinstance(u, MsBundle) and isinstance(v, MsBundle):
            return u.ms.issubset(v.ms)
        return u == v
    if isinstance(ord, KernelOf):
        return alpha_bundle(ord.alpha, u) == alpha_bundle(ord.alpha, v)
    if isinstance(ord, InducedFrom):
        return order_holds(ord.base, alpha_bundle(ord.alpha, u), alpha_bundle(ord.alpha, v))
    if isinstance(ord, Extensional):
        return u == v or (u, v) in ord.pairs
    raise TypeError(f"not an order: {ord!r}")


def induced_order_related(alpha: str, base: OrderSpec, u: Bundle, v: Bundle) -> bool:
    if not applicable(base, CODOMAIN[alpha]):
        raise KindMismatch(f"{base} is not an order on {CODOMAIN[alpha]}")
    return order_holds(base, alpha_bundle(alpha, u), alpha_bundle(alpha, v))


def projected_closure(alpha: str, ordF: OrderSpec, universe: Iterable[Bundle]) -> frozenset:
    """Pairs of images of ``universe`` in the reflexive-transitive closure of
    "some preimages are ordered by ``ordF``".
    """
    universe = sorted(set(universe), key=lambda b: sort_key(repr(b)))
    images = [alpha_bundle(alpha, u) for u in universe]
    succ: dict = {g: set() for g in images}
    for u1, g1 in zip(universe, images):
        for u2, g2 in zip(universe, images):
            if g2 not in succ[g1] and order_holds(ordF, u1, u2):
                succ[g1].add(g2)
    pairs = set()
    for x in succ:
        seen = {x}
        frontier = [x]
        while frontier:
            for h in succ[frontier.pop()]:
                if h not in seen:
                    seen.add(h)
                    frontier.append(h)
        pairs.update((x, h) for h in seen)
    return frozenset(pairs)


def projected_order_related(alpha: str, ordF: OrderSpec, universe: Iterable[Bundle], x: Bundle, y: Bundle) -> bool:
    """Whether ``x`` is below ``y`` in the order projected from ``ordF``
    through ``alpha`` over ``universe``."""
    universe = list(universe)
    images = {alpha_bundle(alpha, u) for u in universe}
    if x not in images or y not in images:
        raise OrderError("element outside the declared universe")
    return (x, y) in projected_closure(alpha, ordF, universe)


def projected_spec(alpha: str, ordF: OrderSpec) -> OrderSpec:
    """Closed form of the projected order for the orders used here.

    On images of an epi transformation the projection of ``MultisetInclusion``
    is subset inclusion, of a kernel or of equality it is equality, and of an
    induced order its base.
    """
    if isinstance(ordF, (Equality, KernelOf)):
        return Equality()
    if isinstance(ordF, MultisetInclusion):
        return PowersetInclusion()
    if isinstance(ordF, InducedFrom) and ordF.alpha == alpha:
        return ordF.base
    raise KindMismatch(f"no closed form for the projection of {ordF} along {alpha}")
