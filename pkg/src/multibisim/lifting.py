"""Relation lifting: when are two bundles related "through" a relation R?

For sets this is the usual forth/back clause.  For multisets and
distributions it asks for a *coupling*: a weighting of element pairs
allowed by R whose two marginals are exactly the given bundles.
Feasibility of a coupling is a transportation problem, decided by an
exact max-flow (integral for counts, rational for masses).
"""
from __future__ import annotations

import itertools
from collections.abc import Callable, Mapping
from dataclasses import dataclass, field
from fractions import Fraction
from types import MappingProxyType

import networkx as nx
from networkx.algorithms.flow import edmonds_karp

from .model import (
    BUNDLE_TYPES,
    Bundle,
    CarrierError,
    DistBundle,
    KindMismatch,
    M1Bundle,
    MsBundle,
    Relation,
    SetBundle,
    sort_key,
)
from .orders import (
    Equality,
    Extensional,
    InducedFrom,
    KernelOf,
    MultisetInclusion,
    OrderSpec,
    PowersetInclusion,
    applicable,
)
from .transforms import CODOMAIN, alpha_bundle

FUNCTOR_KINDS = {"set": SetBundle, "multiset": MsBundle, "m1": M1Bundle, "dist": DistBundle}
_SYSTEM_TO_FUNCTOR = {"lts": "set", "mts": "multiset", "pmts": "m1", "dts": "dist"}

SUBSET_SUPPORT_CAP = 10


@dataclass(frozen=True)
class Coupling:
    """Weights on pairs (left element, right element)."""

    weight: Mapping = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "weight", MappingProxyType(dict(self.weight)))

    def left_marginal(self) -> dict:
        out: dict = {}
        for (e, _), w in self.weight.items():
            out[e] = out.get(e, 0) + w
        return out

    def right_marginal(self) -> dict:
        out: dict = {}
        for (_, f), w in self.weight.items():
            out[f] = out.get(f, 0) + w
        return out

    def transpose(self) -> Coupling:
        return Coupling({(f, e): w for (e, f), w in self.weight.items()})

    def __repr__(self):
        body = ", ".join(f"{w}*({e!r}, {f!r})" for (e, f), w in sorted(self.weight.items(), key=lambda t: sort_key(t[0])))
        return f"Coupling({body})"


@dataclass(frozen=True)
class LiftVerdict:
    holds: bool
    witness: Coupling | None = None

    def __bool__(self):
        return self.holds


def _functor(kind: str, u: Bundle, v: Bundle) -> str | None:
    """Functor kind to lift with, or None when u and v sit in different summands."""
    if kind in FUNCTOR_KINDS:
        want = (FUNCTOR_KINDS[kind],)
    elif kind in BUNDLE_TYPES:
        want = BUNDLE_TYPES[kind]
    else:
        raise KindMismatch(f"unknown kind {kind!r}")
    for b in (u, v):
        if not isinstance(b, want):
            raise KindMismatch(f"{type(b).__name__} is not a {kind} bundle")
    if type(u) is not type(v):
        return None
    return next(k for k, t in FUNCTOR_KINDS.items() if type(u) is t)


def _check_carriers(R: Relation, u: Bundle, v: Bundle) -> None:
    if not u.targets() <= R.left:
        raise CarrierError(f"targets {sorted(u.targets() - R.left, key=sort_key)} outside the left carrier")
    if not v.targets() <= R.right:
        raise CarrierError(f"targets {sorted(v.targets() - R.right, key=sort_key)} outside the right carrier")


def transport(left: Mapping, right: Mapping, allowed: Callable, saturate_right: bool = True) -> dict | None:
    """A flow from ``left`` supplies to ``right`` capacities along allowed pairs.

    Returns ``{(e, f): amount}`` using every left supply in full (and, with
    ``saturate_right``, every right capacity in full) or ``None`` when no
    such flow exists.  Amounts are exact: ints stay ints, Fractions stay
    Fractions.
    """
    total_left = sum(left.values())
    if saturate_right and total_left != sum(right.values()):
        return None
    if not left:
        return {}
    g = nx.DiGraph()
    src, sink = ("src",), ("sink",)
    g.add_nodes_from((src, sink))
    for i, (e, n) in enumerate(left.items()):
        g.add_edge(src, ("L", i), capacity=n)
    for j, (f, n) in enumerate(right.items()):
        g.add_edge(("R", j), sink, capacity=n)
    lefts, rights = list(left), list(right)
    for i, e in enumerate(lefts):
        for j, f in enumerate(rights):
            if allowed(e, f):
                g.add_edge(("L", i), ("R", j))
    value, flow = nx.maximum_flow(g, src, sink, flow_func=edmonds_karp)
    if value != total_left:
        return None
    out = {}
    for i, e in enumerate(lefts):
        for node, amount in flow[("L", i)].items():
            if amount:
                out[(e, rights[node[1]])] = amount
    return out


def _allowed(functor: str, R: Relation) -> Callable:
    pairs = R.pairs
    if functor == "m1":
        return lambda e, f: e[0] == f[0] and e[1] == f[1] and (e[2], f[2]) in pairs
    return lambda e, f: e[0] == f[0] and (e[1], f[1]) in pairs


def _weights(b: Bundle) -> Mapping:
    if isinstance(b, (MsBundle, M1Bundle)):
        return b.ms
    if isinstance(b, DistBundle):
        return b.dist
    return {e: 1 for e in b.elems}


def lift_member(kind: str, R: Relation, u: Bundle, v: Bundle) -> LiftVerdict:
    """Decide ``(u, v) in Rel(F)(R)`` for the functor of ``kind``.

    ``kind`` is a functor kind (set, multiset, m1, dist) or a system kind.
    For the alternating kinds, bundles of different summands are unrelated.
    """
    functor = _functor(kind, u, v)
    _check_carriers(R, u, v)
    if functor is None:
        return LiftVerdict(False)
    allowed = _allowed(functor, R)
    if functor == "set":
        forth = all(any(allowed(e, f) for f in v.elems) for e in u.elems)
        back = all(any(allowed(e, f) for e in u.elems) for f in v.elems)
        if not (forth and back):
            return LiftVerdict(False)
        w = {(e, f): 1 for e in u.elems for f in v.elems if allowed(e, f)}
        return LiftVerdict(True, Coupling(w))
    flow = transport(_weights(u), _weights(v), allowed)
    if flow is None:
        return LiftVerdict(False)
    return LiftVerdict(True, Coupling(flow))


def check_witness(kind: str, R: Relation, u: Bundle, v: Bundle, w: Coupling) -> bool:
    """Whether ``w`` really witnesses ``(u, v) in Rel(F)(R)``."""
    functor = _functor(kind, u, v)
    if functor is None:
        return False
    allowed = _allowed(functor, R)
    if any(not allowed(e, f) or amount <= 0 for (e, f), amount in w.weight.items()):
        return False
    if functor == "set":
        return set(w.left_marginal()) == set(u.elems) and set(w.right_marginal()) == set(v.elems)
    return w.left_marginal() == dict(_weights(u)) and w.right_marginal() == dict(_weights(v))


def lift_dist_subsets_member(R: Relation, u: DistBundle, v: DistBundle) -> bool:
    """Subset-condition form of the distribution lifting.

    For all U within supp(u) and V within supp(v): if the related element
    pairs with left end in U are exactly those with right end in V, then
    u(U) = v(V).  Mass outside the supports is zero, so larger U and V add
    no constraint.  Exponential; supports are capped at
    ``SUBSET_SUPPORT_CAP`` elements.
    """
    if not isinstance(u, DistBundle) or not isinstance(v, DistBundle):
        raise KindMismatch("subset condition is defined on distribution bundles")
    _check_carriers(R, u, v)
    su = sorted(u.dist, key=sort_key)
    sv = sorted(v.dist, key=sort_key)
    if len(su) > SUBSET_SUPPORT_CAP or len(sv) > SUBSET_SUPPORT_CAP:
        raise ValueError(f"supports larger than {SUBSET_SUPPORT_CAP} elements")
    related = [(i, j) for i, e in enumerate(su) for j, f in enumerate(sv)
               if e[0] == f[0] and (e[1], f[1]) in R.pairs]
    for mask_u in range(1 << len(su)):
        pre_u = frozenset(p for p in related if mask_u >> p[0] & 1)
        mass_u = sum((u.dist[su[i]] for i in range(len(su)) if mask_u >> i & 1), Fraction(0))
        for mask_v in range(1 << len(sv)):
            pre_v = frozenset(p for p in related if mask_v >> p[1] & 1)
            if pre_u != pre_v:
                continue
            mass_v = sum((v.dist[sv[j]] for j in range(len(sv)) if mask_v >> j & 1), Fraction(0))
            if mass_u != mass_v:
                return False
    return True


def _kind_of_bundle(b: Bundle) -> str:
    return next(k for k, t in FUNCTOR_KINDS.items() if type(b) is t)


def lift_ordered_member(ord: OrderSpec, kind: str, R: Relation, u: Bundle, v: Bundle) -> bool:
    """Decide ``(u, v)`` in the lifting of R relaxed by ``ord`` on both sides:
    some witness w over R has ``u <= left(w)`` and ``right(w) <= v``.
    """
    functor = _functor(kind, u, v)
    if kind in _SYSTEM_TO_FUNCTOR or kind in BUNDLE_TYPES:
        sys_kind = kind
    else:
        sys_kind = {v_: k for k, v_ in _SYSTEM_TO_FUNCTOR.items()}[kind]
    if not applicable(ord, sys_kind):
        raise KindMismatch(f"{ord} is not an order on {sys_kind}")
    _check_carriers(R, u, v)
    if isinstance(ord, Equality):
        return lift_member(kind, R, u, v).holds
    if isinstance(ord, KernelOf):
        return lift_member(CODOMAIN[ord.alpha], R, alpha_bundle(ord.alpha, u), alpha_bundle(ord.alpha, v)).holds
    if isinstance(ord, InducedFrom):
        return lift_ordered_member(ord.base, CODOMAIN[ord.alpha], R,
                                   alpha_bundle(ord.alpha, u), alpha_bundle(ord.alpha, v))
    if functor is None:
        return False
    if isinstance(ord, PowersetInclusion):
        if isinstance(u, SetBundle):
            # u <= left(w) and right(w) <= v: every element of u has a partner in v
            allowed = _allowed("set", R)
            return all(any(allowed(e, f) for f in v.elems) for e in u.elems)
        return lift_member(kind, R, u, v).holds
    if isinstance(ord, MultisetInclusion):
        if isinstance(u, MsBundle):
            return transport(u.ms, v.ms, _allowed("multiset", R), saturate_right=False) is not None
        return lift_member(kind, R, u, v).holds
    if isinstance(ord, Extensional):
        fk = _kind_of_bundle(u)
        ups = sorted(ord.up(u), key=lambda b: sort_key(repr(b)))
        downs = sorted(ord.down(v), key=lambda b: sort_key(repr(b)))
        for u2, v2 in itertools.product(ups, downs):
            if type(u2) is not type(v2):
                continue
            if not (u2.targets() <= R.left and v2.targets() <= R.right):
                continue
            if lift_member(fk, R, u2, v2).holds:
                return True
        return False
    raise TypeError(f"not an order: {ord!r}")
