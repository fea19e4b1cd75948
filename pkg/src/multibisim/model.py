"""Finite systems and the containers their transitions live in.

Six kinds of system are supported.  Each maps every state to a *bundle* of
successors:

==========  ===============================================
lts         set of ``(label, state)``
mts         multiset of ``(label, state)``
pmts        multiset of ``(p, label, state)`` with sum n*p = 1
dts         distribution over ``(label, state)``
alt-mts     mts bundle at nondet states, pmts bundle at prob states
alt-gts     lts bundle at nondet states, dts bundle at prob states
==========  ===============================================

Probabilities are :class:`fractions.Fraction` throughout.  An empty pmts or
dts bundle marks a terminal state and is exempt from the sum-to-one rule.
"""
from __future__ import annotations

from collections.abc import Callable, Hashable, Iterable, Iterator, Mapping
from dataclasses import dataclass, field
from fractions import Fraction
from types import MappingProxyType
from typing import Any, Union

Rat = Fraction

KINDS = ("lts", "mts", "pmts", "dts", "alt-mts", "alt-gts")
ALT_KINDS = ("alt-mts", "alt-gts")


class KindMismatch(ValueError):
    pass


class CarrierError(ValueError):
    """A state or pair lies outside the carrier it was declared over."""


def _sort_key(e: Any) -> tuple:
    # total order over mixed tuples of str / Fraction / int
    if isinstance(e, tuple):
        return tuple(_sort_key(x) for x in e)
    if isinstance(e, (int, Fraction)):
        return (0, Fraction(e), "")
    return (1, Fraction(0), str(e))


def sort_key(e: Any) -> tuple:
    """Deterministic ordering key for bundle elements and states."""
    return _sort_key(e)


class Multiset(Mapping):
    """Immutable finite multiset, stored as its characteristic function.

    Accepts either a mapping ``element -> count`` or an iterable of
    elements (each occurrence counts once).  Zero counts are dropped.
    """

    __slots__ = ("_counts", "_hash")

    def __init__(self, items: Mapping | Iterable | None = None):
        counts: dict = {}
        if items is None:
            pass
        elif isinstance(items, Mapping):
            for e, n in items.items():
                if isinstance(n, bool) or not isinstance(n, int) or n < 0:
                    raise ValueError(f"multiset count for {e!r} must be a natural number, got {n!r}")
                if n:
                    counts[e] = counts.get(e, 0) + n
        else:
            for e in items:
                counts[e] = counts.get(e, 0) + 1
        self._counts = counts
        self._hash = None

    def __getitem__(self, e):
        return self._counts[e]

    def __iter__(self) -> Iterator:
        return iter(self._counts)

    def __len__(self) -> int:
        return len(self._counts)

    def count(self, e) -> int:
        return self._counts.get(e, 0)

    def support(self) -> frozenset:
        return frozenset(self._counts)

    def size(self) -> int:
        """Total number of occurrences."""
        return sum(self._counts.values())

    def elements(self) -> Iterator:
        for e in sorted(self._counts, key=sort_key):
            for _ in range(self._counts[e]):
                yield e

    def map(self, f: Callable) -> Multiset:
        """Image under ``f``; counts of merged elements are added."""
        out: dict = {}
        for e, n in self._counts.items():
            k = f(e)
            out[k] = out.get(k, 0) + n
        return Multiset(out)

    def __add__(self, other: Multiset) -> Multiset:
        out = dict(self._counts)
        for e, n in other.items():
            out[e] = out.get(e, 0) + n
        return Multiset(out)

    def issubset(self, other: Multiset) -> bool:
        """Pointwise <= on counts."""
        return all(other.count(e) >= n for e, n in self._counts.items())

    def __eq__(self, other):
        if isinstance(other, Multiset):
            return self._counts == other._counts
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._counts.items()))
        return self._hash

    def __repr__(self):
        body = ", ".join(f"{n}*{e!r}" for e, n in sorted(self._counts.items(), key=lambda t: sort_key(t[0])))
        return f"Multiset({{{body}}})"


class Distribution(Mapping):
    """Finite-support probability measure with exact rational masses.

    The empty distribution is allowed and stands for "no successor"; any
    non-empty one must sum to exactly 1.
    """

    __slots__ = ("_mass", "_hash")

    def __init__(self, mass: Mapping | None = None):
        m: dict = {}
        for e, p in (mass or {}).items():
            p = Fraction(p)
            if p < 0:
                raise ValueError(f"negative mass {p} for {e!r}")
            if p:
                m[e] = m.get(e, Fraction(0)) + p
        if m and sum(m.values()) != 1:
            raise ValueError(f"distribution mass sums to {sum(m.values())}, not 1")
        self._mass = m
        self._hash = None

    def __getitem__(self, e) -> Fraction:
        return self._mass[e]

    def __iter__(self):
        return iter(self._mass)

    def __len__(self):
        return len(self._mass)

    def mass(self, e) -> Fraction:
        return self._mass.get(e, Fraction(0))

    def support(self) -> frozenset:
        return frozenset(self._mass)

    def map(self, f: Callable) -> Distribution:
        out: dict = {}
        for e, p in self._mass.items():
            k = f(e)
            out[k] = out.get(k, Fraction(0)) + p
        return Distribution(out)

    def __eq__(self, other):
        if isinstance(other, Distribution):
            return self._mass == other._mass
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._mass.items()))
        return self._hash

    def __repr__(self):
        body = ", ".join(f"{e!r}: {p}" for e, p in sorted(self._mass.items(), key=lambda t: sort_key(t[0])))
        return f"Distribution({{{body}}})"


# -- bundles ---------------------------------------------------------------

@dataclass(frozen=True)
class SetBundle:
    elems: frozenset = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "elems", frozenset(self.elems))

    def targets(self) -> frozenset:
        return frozenset(x for _, x in self.elems)

    def labels(self) -> frozenset:
        return frozenset(a for a, _ in self.elems)

    def rename(self, f: Callable[[Hashable], Hashable]) -> SetBundle:
        return SetBundle(frozenset((a, f(x)) for a, x in self.elems))

    def __len__(self):
        return len(self.elems)


@dataclass(frozen=True)
class MsBundle:
    ms: Multiset = field(default_factory=Multiset)

    def __post_init__(self):
        if not isinstance(self.ms, Multiset):
            object.__setattr__(self, "ms", Multiset(self.ms))

    def targets(self) -> frozenset:
        return frozenset(x for _, x in self.ms)

    def labels(self) -> frozenset:
        return frozenset(a for a, _ in self.ms)

    def rename(self, f) -> MsBundle:
        return MsBundle(self.ms.map(lambda e: (e[0], f(e[1]))))

    def __len__(self):
        return len(self.ms)


@dataclass(frozen=True)
class M1Bundle:
    """Multiset of ``(p, label, state)`` triples."""

    ms: Multiset = field(default_factory=Multiset)

    def __post_init__(self):
        if not isinstance(self.ms, Multiset):
            object.__setattr__(self, "ms", Multiset(self.ms))
        object.__setattr__(
            self, "ms", self.ms.map(lambda e: (Fraction(e[0]), e[1], e[2]))
        )

    def total(self) -> Fraction:
        return sum((n * e[0] for e, n in self.ms.items()), Fraction(0))

    def targets(self) -> frozenset:
        return frozenset(x for _, _, x in self.ms)

    def labels(self) -> frozenset:
        return frozenset(a for _, a, _ in self.ms)

    def rename(self, f) -> M1Bundle:
        return M1Bundle(self.ms.map(lambda e: (e[0], e[1], f(e[2]))))

    def __len__(self):
        return len(self.ms)


@dataclass(frozen=True)
class DistBundle:
    dist: Distribution = field(default_factory=Distribution)

    def __post_init__(self):
        if not isinstance(self.dist, Distribution):
            object.__setattr__(self, "dist", Distribution(self.dist))

    def targets(self) -> frozenset:
        return frozenset(x for _, x in self.dist)

    def labels(self) -> frozenset:
        return frozenset(a for a, _ in self.dist)

    def rename(self, f) -> DistBundle:
        return DistBundle(self.dist.map(lambda e: (e[0], f(e[1]))))

    def __len__(self):
        return len(self.dist)


Bundle = Union[SetBundle, MsBundle, M1Bundle, DistBundle]

BUNDLE_TYPES: dict[str, tuple[type, ...]] = {
    "lts": (SetBundle,),
    "mts": (MsBundle,),
    "pmts": (M1Bundle,),
    "dts": (DistBundle,),
    "alt-mts": (MsBundle, M1Bundle),
    "alt-gts": (SetBundle, DistBundle),
}
PROB_BUNDLES = (M1Bundle, DistBundle)

# empty bundle per (kind, mode)
_EMPTY = {
    ("lts", "nondet"): SetBundle,
    ("mts", "nondet"): MsBundle,
    ("pmts", "prob"): M1Bundle,
    ("dts", "prob"): DistBundle,
    ("alt-mts", "nondet"): MsBundle,
    ("alt-mts", "prob"): M1Bundle,
    ("alt-gts", "nondet"): SetBundle,
    ("alt-gts", "prob"): DistBundle,
}


def default_mode(kind: str) -> str | None:
    return {"lts": "nondet", "mts": "nondet", "pmts": "prob", "dts": "prob"}.get(kind)


def empty_bundle(kind: str, mode: str | None = None) -> Bundle:
    mode = mode or default_mode(kind)
    try:
        return _EMPTY[(kind, mode)]()
    except KeyError:
        raise KindMismatch(f"no {mode!r} bundle for kind {kind!r}") from None


def bundle_mode(b: Bundle) -> str:
    return "prob" if isinstance(b, PROB_BUNDLES) else "nondet"


@dataclass(frozen=True, eq=False)
class System:
    """A finite coalgebra.  ``steps`` is total on ``states``.

    Build instances with :func:`make_system`, which fills in empty bundles
    and derives the label alphabet.
    """

    name: str
    kind: str
    states: tuple
    labels: frozenset
    steps: Mapping

    def step(self, x) -> Bundle:
        return self.steps[x]

    def mode(self, x) -> str:
        return bundle_mode(self.steps[x])

    def transitions(self) -> int:
        """Number of distinct successor elements over all bundles."""
        return sum(len(b) for b in self.steps.values())

    def __eq__(self, other):
        # names are presentation only
        if not isinstance(other, System):
            return NotImplemented
        return (
            self.kind == other.kind
            and self.states == other.states
            and self.labels == other.labels
            and dict(self.steps) == dict(other.steps)
        )

    def __hash__(self):
        return hash((self.kind, self.states))

    def __repr__(self):
        return f"System({self.name!r}, {self.kind}, {len(self.states)} states)"


def make_system(
    name: str,
    kind: str,
    states: Iterable,
    steps: Mapping | None = None,
    labels: Iterable | None = None,
    modes: Mapping | None = None,
) -> System:
    if kind not in KINDS:
        raise KindMismatch(f"unknown system kind {kind!r}")
    states = tuple(states)
    steps = dict(steps or {})
    modes = modes or {}
    for x in states:
        if x not in steps:
            mode = modes.get(x, default_mode(kind))
            if mode is None:
                raise KindMismatch(f"state {x!r} of {kind} system needs a nondet/prob mode")
            steps[x] = empty_bundle(kind, mode)
    if labels is None:
        labels = frozenset().union(*(b.labels() for b in steps.values()))
    return System(name, kind, states, frozenset(labels), MappingProxyType(steps))


@dataclass(frozen=True)
class Diagnostic:
    state: Any
    rule: str
    message: str

    def __str__(self):
        return self.message


def validate_system(sys: System) -> list[Diagnostic]:
    """Every violated invariant of ``sys``; empty iff the system is valid."""
    out: list[Diagnostic] = []
    if sys.kind not in KINDS:
        return [Diagnostic(None, "kind", f"unknown kind {sys.kind!r}")]
    if len(set(sys.states)) != len(sys.states):
        out.append(Diagnostic(None, "states", "duplicate state identifiers"))
    known = set(sys.states)
    for x in sorted(set(sys.steps) - known, key=sort_key):
        out.append(Diagnostic(x, "carrier", f"bundle given for undeclared state {x}"))
    allowed = BUNDLE_TYPES[sys.kind]
    for x in sys.states:
        b = sys.steps.get(x)
        if b is None:
            out.append(Diagnostic(x, "total", f"no bundle for state {x}"))
            continue
        if not isinstance(b, allowed):
            out.append(Diagnostic(x, "bundle-type",
                                  f"{type(b).__name__} not allowed in {sys.kind} system at {x}"))
            continue
        for t in sorted(b.targets() - known, key=sort_key):
            out.append(Diagnostic(x, "target", f"target {t} of {x} is not a state"))
        for a in sorted(b.labels() - sys.labels, key=sort_key):
            out.append(Diagnostic(x, "label", f"label {a} at {x} is not in the alphabet"))
        if isinstance(b, M1Bundle):
            for (p, a, t) in sorted(b.ms, key=sort_key):
                if not 0 < p <= 1:
                    out.append(Diagnostic(x, "weight", f"weight {p} of ({p},{a},{t}) at {x} outside (0,1]"))
            total = b.total()
            if len(b) and total != 1:
                out.append(Diagnostic(x, "mass", f"probability mass {total} ≠ 1 at {x}"))
        elif isinstance(b, DistBundle):
            total = sum(b.dist.values(), Fraction(0))
            if len(b) and total != 1:
                out.append(Diagnostic(x, "mass", f"probability mass {total} ≠ 1 at {x}"))
    return out


LEFT, RIGHT = "left:", "right:"


def disjoint_union(s1: System, s2: System) -> System:
    """Tagged sum of two systems of the same kind (states get ``left:``/``right:`` prefixes)."""
    if s1.kind != s2.kind:
        raise KindMismatch(f"cannot join {s1.kind} with {s2.kind}")
    tag1 = lambda x: LEFT + str(x)  # noqa: E731
    tag2 = lambda x: RIGHT + str(x)  # noqa: E731
    steps = {tag1(x): s1.step(x).rename(tag1) for x in s1.states}
    steps.update({tag2(y): s2.step(y).rename(tag2) for y in s2.states})
    states = tuple(map(tag1, s1.states)) + tuple(map(tag2, s2.states))
    return make_system(f"{s1.name}+{s2.name}", s1.kind, states, steps, s1.labels | s2.labels)


def untag(x: str) -> tuple[str, str]:
    """Inverse of the tagging done by :func:`disjoint_union`."""
    for side in (LEFT, RIGHT):
        if x.startswith(side):
            return side[:-1], x[len(side):]
    raise ValueError(f"{x!r} carries no disjoint-union tag")


def project(u: System, side: str) -> System:
    """Recover one summand of a disjoint union."""
    prefix = LEFT if side == "left" else RIGHT
    strip = lambda x: x[len(prefix):]  # noqa: E731
    states = [x for x in u.states if x.startswith(prefix)]
    steps = {strip(x): u.step(x).rename(strip) for x in states}
    return make_system(u.name, u.kind, map(strip, states), steps)


# -- relations and partitions ---------------------------------------------

@dataclass(frozen=True)
class Relation:
    pairs: frozenset
    left: frozenset
    right: frozenset

    def __post_init__(self):
        object.__setattr__(self, "pairs", frozenset(self.pairs))
        object.__setattr__(self, "left", frozenset(self.left))
        object.__setattr__(self, "right", frozenset(self.right))
        bad = [p for p in self.pairs if p[0] not in self.left or p[1] not in self.right]
        if bad:
            raise CarrierError(f"pairs outside the carrier: {sorted(bad, key=sort_key)[:3]}")

    @classmethod
    def full(cls, left: Iterable, right: Iterable) -> Relation:
        left, right = frozenset(left), frozenset(right)
        return cls(frozenset((x, y) for x in left for y in right), left, right)

    @classmethod
    def between(cls, c: System, d: System, pairs: Iterable = ()) -> Relation:
        return cls(frozenset(pairs), frozenset(c.states), frozenset(d.states))

    @classmethod
    def identity(cls, states: Iterable) -> Relation:
        s = frozenset(states)
        return cls(frozenset((x, x) for x in s), s, s)

    def transpose(self) -> Relation:
        return Relation(frozenset((y, x) for x, y in self.pairs), self.right, self.left)

    def with_pairs(self, pairs: Iterable) -> Relation:
        return Relation(frozenset(pairs), self.left, self.right)

    def image(self, x) -> frozenset:
        return frozenset(y for a, y in self.pairs if a == x)

    def preimage(self, y) -> frozenset:
        return frozenset(x for x, b in self.pairs if b == y)

    def sorted_pairs(self) -> list:
        return sorted(self.pairs, key=sort_key)

    def __contains__(self, pair):
        return pair in self.pairs

    def __iter__(self):
        return iter(self.sorted_pairs())

    def __len__(self):
        return len(self.pairs)

    def __le__(self, other: Relation) -> bool:
        return self.pairs <= other.pairs

    def is_equivalence(self) -> bool:
        if self.left != self.right:
            return False
        if any((x, x) not in self.pairs for x in self.left):
            return False
        if any((y, x) not in self.pairs for x, y in self.pairs):
            return False
        succ: dict = {}
        for x, y in self.pairs:
            succ.setdefault(x, set()).add(y)
        return all(succ.get(y, set()) <= succ[x] for x in succ for y in succ[x])


@dataclass(frozen=True)
class Partition:
    classes: frozenset
    carrier: frozenset

    def __post_init__(self):
        classes = frozenset(frozenset(c) for c in self.classes)
        object.__setattr__(self, "classes", classes)
        object.__setattr__(self, "carrier", frozenset(self.carrier))
        if any(not c for c in classes):
            raise CarrierError("partition classes must be nonempty")
        seen: set = set()
        for c in classes:
            if seen & c:
                raise CarrierError(f"classes overlap on {sorted(seen & c, key=sort_key)}")
            seen |= c
        if seen != self.carrier:
            missing = sorted(self.carrier - seen, key=sort_key)
            extra = sorted(seen - self.carrier, key=sort_key)
            raise CarrierError(f"partition does not cover its carrier (missing {missing}, extra {extra})")

    @classmethod
    def of(cls, classes: Iterable[Iterable], carrier: Iterable | None = None) -> Partition:
        classes = [frozenset(c) for c in classes]
        if carrier is None:
            carrier = frozenset().union(*classes)
        return cls(frozenset(classes), frozenset(carrier))

    @classmethod
    def from_relation(cls, rel: Relation) -> Partition:
        if not rel.is_equivalence():
            raise ValueError("relation is not an equivalence")
        return cls.of({rel.image(x) for x in rel.left}, rel.left)

    def class_of(self, x) -> frozenset:
        for c in self.classes:
            if x in c:
                return c
        raise KeyError(x)

    def sorted_classes(self) -> list[list]:
        cs = [sorted(c, key=sort_key) for c in self.classes]
        return sorted(cs, key=sort_key)

    def as_relation(self) -> Relation:
        pairs = frozenset((x, y) for c in self.classes for x in c for y in c)
        return Relation(pairs, self.carrier, self.carrier)

    def __len__(self):
        return len(self.classes)
