"""Bisimulations, order-parameterised simulations and probabilistic bisimulation."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .lifting import lift_member, lift_ordered_member
from .model import (
    CarrierError,
    KindMismatch,
    M1Bundle,
    Partition,
    Relation,
    System,
    sort_key,
    validate_system,
)
from .orders import Equality, OrderSpec, applicable


@dataclass(frozen=True)
class Verdict:
    holds: bool
    counterexample: tuple | None = None
    detail: str = ""

    def __post_init__(self):
        if self.holds != (self.counterexample is None):
            raise ValueError("a counterexample is present exactly when the verdict fails")

    def __bool__(self):
        return self.holds


def _check_pair(c: System, d: System, R: Relation) -> None:
    if c.kind != d.kind:
        raise KindMismatch(f"{c.kind} system against {d.kind} system")
    if R.left != frozenset(c.states) or R.right != frozenset(d.states):
        raise CarrierError("relation carriers differ from the systems' state sets")


def is_simulation(c: System, d: System, R: Relation, ord: OrderSpec | None = None) -> Verdict:
    """Whether every pair of R steps into the ``ord``-relaxed lifting of R.

    With the default equality order this is the bisimulation condition.
    The counterexample is the first failing pair in sorted order.
    """
    ord = Equality() if ord is None else ord
    _check_pair(c, d, R)
    if not applicable(ord, c.kind):
        raise KindMismatch(f"{ord} is not an order on {c.kind}")
    for x, y in R.sorted_pairs():
        if not lift_ordered_member(ord, c.kind, R, c.step(x), d.step(y)):
            return Verdict(False, (x, y), f"steps of {x} and {y} are not related through R")
    return Verdict(True)


def is_bisimulation(c: System, d: System, R: Relation) -> Verdict:
    """Plain bisimulation check straight through :func:`lift_member`."""
    _check_pair(c, d, R)
    for x, y in R.sorted_pairs():
        if not lift_member(c.kind, R, c.step(x), d.step(y)):
            return Verdict(False, (x, y), f"steps of {x} and {y} are not related through R")
    return Verdict(True)


def largest_simulation(c: System, d: System, ord: OrderSpec | None = None) -> Relation:
    """Greatest ``ord``-simulation, by deleting failing pairs from the full product.

    Each round checks every surviving pair against the current relation and
    deletes the failures together.
    """
    ord = Equality() if ord is None else ord
    if c.kind != d.kind:
        raise KindMismatch(f"{c.kind} system against {d.kind} system")
    if not applicable(ord, c.kind):
        raise KindMismatch(f"{ord} is not an order on {c.kind}")
    R = Relation.full(c.states, d.states)
    while True:
        failing = [
            (x, y) for x, y in R.sorted_pairs()
            if not lift_ordered_member(ord, c.kind, R, c.step(x), d.step(y))
        ]
        if not failing:
            return R
        R = R.with_pairs(R.pairs - set(failing))


def _signature(sys: System, x, class_id: dict) -> frozenset:
    acc: dict = {}
    for (p, a, t), n in sys.step(x).ms.items():
        key = (a, class_id[t])
        acc[key] = acc.get(key, Fraction(0)) + n * p
    return frozenset(acc.items())


def _require_pmts(sys: System) -> None:
    if sys.kind != "pmts":
        raise KindMismatch(f"probabilistic bisimulation is defined on pmts, got {sys.kind}")


def is_prob_bisimulation(sys: System, P: Partition) -> Verdict:
    """Larsen–Skou condition: equivalent states send equal mass, per label,
    into every class."""
    _require_pmts(sys)
    if P.carrier != frozenset(sys.states):
        raise CarrierError("partition does not cover the system's states")
    ids = {x: i for i, c in enumerate(P.sorted_classes()) for x in c}
    for cls in P.sorted_classes():
        first = cls[0]
        sig = dict(_signature(sys, first, ids))
        for other in cls[1:]:
            sig2 = dict(_signature(sys, other, ids))
            if sig != sig2:
                key = min(set(sig) ^ set(sig2) or {k for k in sig if sig[k] != sig2[k]}, key=sort_key)
                a, target = key
                detail = (f"under {a} into class {P.sorted_classes()[target]}: "
                          f"{first} sends {sig.get(key, 0)}, {other} sends {sig2.get(key, 0)}")
                return Verdict(False, (first, other), detail)
    return Verdict(True)


def prob_bisimilarity(sys: System) -> Partition:
    """Coarsest probabilistic bisimulation, by signature refinement."""
    _require_pmts(sys)
    problems = validate_system(sys)
    if problems:
        raise ValueError("; ".join(map(str, problems)))
    assert all(isinstance(sys.step(x), M1Bundle) for x in sys.states)
    blocks = [list(sys.states)] if sys.states else []
    while True:
        ids = {x: i for i, b in enumerate(blocks) for x in b}
        refined: list[list] = []
        for b in blocks:
            groups: dict = {}
            for x in b:
                groups.setdefault(_signature(sys, x, ids), []).append(x)
            refined.extend(groups.values())
        if len(refined) == len(blocks):
            return Partition.of(refined, sys.states)
        blocks = refined


def relation_classes(R: Relation) -> Partition:
    """Partition of an equivalence relation."""
    return Partition.from_relation(R)
