"""Seeded random systems at desk scale."""
from __future__ import annotations

import random
from dataclasses import dataclass, replace
from fractions import Fraction

from ..model import (
    ALT_KINDS,
    KINDS,
    Bundle,
    DistBundle,
    M1Bundle,
    MsBundle,
    Multiset,
    Relation,
    SetBundle,
    System,
    make_system,
    sort_key,
)
from ..transforms import bundle_representations, representation_kind

LABELS = "abc"


@dataclass(frozen=True)
class GenParams:
    seed: int = 0
    kind: str | None = None
    max_states: int = 6
    max_labels: int = 3
    max_multiplicity: int = 3
    max_denominator: int = 6
    # distinct successor elements per bundle
    max_branching: int = 3

    def __post_init__(self):
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        if self.kind is not None and self.kind not in KINDS:
            raise ValueError(f"unknown kind {self.kind!r}")
        for name, hi in (("max_states", 6), ("max_labels", 3), ("max_multiplicity", 3),
                         ("max_denominator", 6), ("max_branching", 3)):
            val = getattr(self, name)
            if not 1 <= val <= hi:
                raise ValueError(f"{name} must lie in 1..{hi}, got {val}")

    def with_kind(self, kind: str | None) -> GenParams:
        return replace(self, kind=kind)


def _composition(rng: random.Random, total: int, parts: int) -> list[int]:
    """``total`` split into ``parts`` positive integers."""
    cuts = sorted(rng.sample(range(1, total), parts - 1))
    return [b - a for a, b in zip([0] + cuts, cuts + [total])]


def _elements(rng, labels, targets, k):
    pool = [(a, x) for a in labels for x in targets]
    return rng.sample(pool, min(k, len(pool)))


def random_bundle(rng: random.Random, shape: str, targets, labels, p: GenParams,
                  terminal_chance: float = 0.2) -> Bundle:
    """A bundle of the given shape (set, multiset, m1 or dist) over ``targets``."""
    if shape in ("set", "multiset"):
        elems = _elements(rng, labels, targets, rng.randint(0, p.max_branching))
        if shape == "set":
            return SetBundle(frozenset(elems))
        return MsBundle(Multiset({e: rng.randint(1, p.max_multiplicity) for e in elems}))
    if rng.random() < terminal_chance:
        return DistBundle() if shape == "dist" else M1Bundle()
    den = rng.randint(1, p.max_denominator)
    k = min(rng.randint(1, p.max_branching), den)
    units = _composition(rng, den, k)
    if shape == "dist":
        elems = _elements(rng, labels, targets, k)
        units = units[:len(elems)]
        units[-1] += den - sum(units)
        return DistBundle({e: Fraction(w, den) for e, w in zip(elems, units)})
    counts: dict = {}
    for w in units:
        a, x = rng.choice(labels), rng.choice(targets)
        n = rng.choice([d for d in range(1, p.max_multiplicity + 1) if w % d == 0])
        key = (Fraction(w // n, den), a, x)
        counts[key] = counts.get(key, 0) + n
    return M1Bundle(Multiset(counts))


_SHAPES = {"lts": ("set", "set"), "mts": ("multiset", "multiset"), "pmts": ("m1", "m1"),
           "dts": ("dist", "dist"), "alt-mts": ("multiset", "m1"), "alt-gts": ("set", "dist")}


def random_system(rng: random.Random, kind: str, p: GenParams, name: str = "g",
                  n_states: int | None = None) -> System:
    n = n_states or rng.randint(1, p.max_states)
    states = [f"s{i}" for i in range(n)]
    labels = list(LABELS[: rng.randint(1, p.max_labels)])
    nondet, prob = _SHAPES[kind]
    steps = {}
    for x in states:
        shape = nondet if kind not in ALT_KINDS or rng.random() < 0.5 else prob
        steps[x] = random_bundle(rng, shape, states, labels, p)
    return make_system(name, kind, states, steps, labels)


def gen_system(p: GenParams) -> System:
    """Deterministic in ``p``; the default kind is lts."""
    rng = random.Random(p.seed)
    return random_system(rng, p.kind or "lts", p, name=f"gen{p.seed}")


def _split_fraction(rng, q: Fraction, parts: int, even: bool) -> list[Fraction]:
    if parts == 1:
        return [q]
    if even:
        return [q / parts] * parts
    weights = [rng.randint(1, 3) for _ in range(parts)]
    return [q * w / sum(weights) for w in weights]


def _first_key(item):
    return sort_key(item[0])


def _redistribute(rng, b: Bundle, copies: dict, even: bool) -> Bundle:
    """Spread each element of ``b`` over the copies of its target."""
    if isinstance(b, SetBundle):
        out = set()
        for a, x in sorted(b.elems, key=sort_key):
            cs = copies[x]
            out.update((a, c) for c in (cs if even else rng.sample(cs, rng.randint(1, len(cs)))))
        return SetBundle(frozenset(out))
    if isinstance(b, MsBundle):
        counts: dict = {}
        for (a, x), n in sorted(b.ms.items(), key=_first_key):
            cs = copies[x]
            for _ in range(n):
                c = cs[0] if even else rng.choice(cs)
                counts[(a, c)] = counts.get((a, c), 0) + 1
        return MsBundle(Multiset(counts))
    if isinstance(b, M1Bundle):
        counts = {}
        for (q, a, x), n in sorted(b.ms.items(), key=_first_key):
            cs = copies[x]
            for _ in range(n):
                c = cs[0] if even else rng.choice(cs)
                counts[(q, a, c)] = counts.get((q, a, c), 0) + 1
        return M1Bundle(Multiset(counts))
    mass: dict = {}
    for (a, x), q in sorted(b.dist.items(), key=_first_key):
        cs = copies[x]
        for c, part in zip(cs, _split_fraction(rng, q, len(cs), even)):
            mass[(a, c)] = mass.get((a, c), 0) + part
    return DistBundle(mass)


def gen_twin(rng: random.Random, sys: System, max_states: int = 6, identical: bool = False,
             perturb: bool = False) -> tuple[System, Relation]:
    """A copy of ``sys`` in which some states are duplicated.

    Returns the twin and the relation linking every state to its copies,
    which is a bisimulation unless ``perturb`` altered a bundle.  With
    ``identical`` all copies of a state share one bundle.
    """
    budget = max_states - len(sys.states)
    copies: dict = {}
    for x in sys.states:
        k = 2 if budget > 0 and rng.random() < 0.5 else 1
        budget -= k - 1
        copies[x] = [f"{x}.{j}" for j in range(k)]
    steps = {}
    for x in sys.states:
        shared = _redistribute(rng, sys.step(x), copies, even=False) if identical else None
        for c in copies[x]:
            steps[c] = shared if identical else _redistribute(rng, sys.step(x), copies, even=False)
    states = [c for x in sys.states for c in copies[x]]
    if perturb and states:
        victim = rng.choice(states)
        steps[victim] = _perturb(rng, steps[victim], states, sorted(sys.labels) or ["a"])
    twin = make_system(sys.name + "'", sys.kind, states, steps, sys.labels | frozenset(
        a for b in steps.values() for a in b.labels()))
    R = Relation(frozenset((x, c) for x in sys.states for c in copies[x]), frozenset(sys.states), frozenset(states))
    return twin, R


def _perturb(rng, b: Bundle, states, labels) -> Bundle:
    e = (rng.choice(labels), rng.choice(states))
    if isinstance(b, SetBundle):
        return SetBundle(b.elems ^ {e})
    if isinstance(b, MsBundle):
        return MsBundle(b.ms + Multiset([e]))
    if isinstance(b, M1Bundle):
        if not len(b):
            return M1Bundle(Multiset({(Fraction(1), *e): 1}))
        # move the weight of one element onto a fresh target
        old = sorted(b.ms, key=sort_key)[0]
        counts = dict(b.ms)
        counts[old] -= 1
        key = (old[0], *e)
        counts[key] = counts.get(key, 0) + 1
        return M1Bundle(Multiset(counts))
    if not len(b):
        return DistBundle({e: 1})
    old = sorted(b.dist, key=sort_key)[0]
    mass = dict(b.dist)
    q = mass.pop(old)
    mass[e] = mass.get(e, 0) + q
    return DistBundle(mass)


def random_relation(rng: random.Random, left, right, density: float | None = None) -> Relation:
    density = rng.random() if density is None else density
    left, right = sorted(left, key=sort_key), sorted(right, key=sort_key)
    pairs = frozenset((x, y) for x in left for y in right if rng.random() < density)
    return Relation(pairs, frozenset(left), frozenset(right))


def random_representation(rng: random.Random, sys: System, bound: int = 3) -> System:
    """A random F-representation with multiplicities at most ``bound``."""
    kind = representation_kind(sys.kind)
    steps = {}
    for x in sys.states:
        reps = list(bundle_representations(sys.step(x), bound))
        steps[x] = rng.choice(reps)
    return make_system(sys.name + "#", kind, sys.states, steps, sys.labels)


def random_renaming(rng: random.Random, states, size: int | None = None) -> dict:
    """A random (usually non-injective) map from ``states`` to fresh names."""
    states = sorted(states, key=sort_key)
    size = size or rng.randint(1, max(1, len(states)))
    return {x: f"r{rng.randrange(size)}" for x in states}
