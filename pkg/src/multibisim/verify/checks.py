"""Randomised checks of the theorems relating the functors.

Every check draws its instances from a seeded generator, so a report is a
function of ``(property id, seed, instance count)``.  Failing instances are
kept whole (systems rendered in the text format) so they can be replayed.
"""
from __future__ import annotations

import random
import time
from collections.abc import Callable
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

from ..equivalences import (
    is_bisimulation,
    is_prob_bisimulation,
    is_simulation,
    largest_simulation,
    prob_bisimilarity,
)
from ..lifting import (
    check_witness,
    lift_dist_subsets_member,
    lift_member,
    lift_ordered_member,
)
from ..model import (
    KINDS,
    Bundle,
    DistBundle,
    M1Bundle,
    MsBundle,
    Partition,
    Relation,
    SetBundle,
    System,
    disjoint_union,
    sort_key,
)
from ..orders import (
    Equality,
    InducedFrom,
    KernelOf,
    MultisetInclusion,
    PowersetInclusion,
    order_holds,
    projected_closure,
    projected_spec,
)
from ..textfmt import render_relation, render_system
from ..transforms import (
    ALPHA_KINDS,
    CODOMAIN,
    DOMAIN,
    alpha_bundle,
    alpha_for,
    alpha_image,
    bundle_representations,
    canonical_bundle,
    canonical_representation,
    enumerate_representations,
    kernel_related,
)
from .generate import (
    LABELS,
    GenParams,
    gen_system,
    gen_twin,
    random_bundle,
    random_relation,
    random_renaming,
    random_representation,
    random_system,
)

REPRESENTATION_BOUND = 3


@dataclass
class Outcome:
    ok: bool
    instance: dict = field(default_factory=dict)
    qualified: bool = True
    counters: dict = field(default_factory=dict)


@dataclass
class CheckReport:
    property_id: str
    instances: int
    failures: list = field(default_factory=list)
    elapsed: float = 0.0
    notes: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return not self.failures

    def summary(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        extra = "".join(f" {k}={v}" for k, v in sorted(self.notes.items()))
        return (f"{self.property_id:<22} {status}  instances={self.instances} "
                f"failures={len(self.failures)} time={self.elapsed:.2f}s{extra}")


# -- shared helpers --------------------------------------------------------

def _ser(**items) -> dict:
    out = {}
    for k, v in items.items():
        if isinstance(v, System):
            out[k] = render_system(v)
        elif isinstance(v, Relation):
            out[k] = render_relation(v)
        elif isinstance(v, Partition):
            out[k] = v.sorted_classes()
        else:
            out[k] = repr(v)
    return out


def _alpha(p: GenParams, i: int) -> str:
    return alpha_for(p.kind) if p.kind else ALPHA_KINDS[i % len(ALPHA_KINDS)]


def _pair(rng: random.Random, kind: str, p: GenParams, identical: bool = False):
    """Two systems of ``kind``: usually a system and a (maybe perturbed) twin."""
    if rng.random() < 0.6:
        base = random_system(rng, kind, p, "c", n_states=rng.randint(1, max(1, p.max_states // 2)))
        twin, link = gen_twin(rng, base, p.max_states, identical=identical, perturb=rng.random() < 0.3)
        return base, twin, link
    return random_system(rng, kind, p, "c"), random_system(rng, kind, p, "d"), None


def _toggle(rng, R: Relation) -> Relation:
    x = rng.choice(sorted(R.left, key=sort_key))
    y = rng.choice(sorted(R.right, key=sort_key))
    return R.with_pairs(R.pairs ^ {(x, y)})


def _relation_family(rng, c: System, d: System, star: Relation, link: Relation | None) -> list[Relation]:
    rels = [star, random_relation(rng, c.states, d.states), _toggle(rng, star)]
    if link is not None:
        rels.append(link)
    return rels


def _partition(R: Relation) -> Partition | None:
    return Partition.from_relation(R) if R.is_equivalence() else None


def near_injective(b1: System, b2: System, R: Relation) -> bool:
    for x in b1.states:
        if len({b2.step(y) for y in R.image(x)}) > 1:
            return False
    for y in b2.states:
        if len({b1.step(x) for x in R.preimage(y)}) > 1:
            return False
    return True


def _components(R: Relation) -> list[tuple[list, list]]:
    parent: dict = {}

    def find(n):
        while parent.setdefault(n, n) != n:
            parent[n] = parent[parent[n]]
            n = parent[n]
        return n

    for x, y in R.sorted_pairs():
        parent[find(("L", x))] = find(("R", y))
    groups: dict = {}
    for n in list(parent):
        groups.setdefault(find(n), []).append(n)
    out = []
    for members in groups.values():
        lefts = sorted((s for side, s in members if side == "L"), key=sort_key)
        rights = sorted((s for side, s in members if side == "R"), key=sort_key)
        out.append((lefts, rights))
    return sorted(out, key=sort_key)


def _label_signature(b: Bundle) -> frozenset:
    # a coupling needs equal totals per label (per weight and label for pmts)
    acc: dict = {}
    if isinstance(b, MsBundle):
        for (a, _), n in b.ms.items():
            acc[a] = acc.get(a, 0) + n
    else:
        for (q, a, _), n in b.ms.items():
            acc[(q, a)] = acc.get((q, a), 0) + n
    return frozenset(acc.items())


def find_related_representations(kind: str, R: Relation, gu: Bundle, gv: Bundle, bound: int):
    """Representations of ``gu`` and ``gv`` (multiplicity <= bound, equal
    splits) that are related by the plain lifting of R, or None."""
    if type(gu) is not type(gv):
        return None
    buckets: dict = {}
    for v2 in bundle_representations(gv, bound):
        buckets.setdefault(_label_signature(v2), []).append(v2)
    for u2 in bundle_representations(gu, bound):
        for v2 in buckets.get(_label_signature(u2), ()):
            if lift_member(kind, R, u2, v2):
                return u2, v2
    return None


def near_injective_witness(alpha: str, b1: System, b2: System, R: Relation, bound: int):
    """F-representations of b1, b2 on which R is a plain bisimulation.

    States of one connected component of R share their bundle on each side
    (near-injectivity), so one representation pair per component suffices.
    Returns None when some component has no pair within ``bound``.
    """
    F = DOMAIN[alpha]
    steps1 = {x: canonical_bundle(b1.step(x)) for x in b1.states}
    steps2 = {y: canonical_bundle(b2.step(y)) for y in b2.states}
    for lefts, rights in _components(R):
        found = find_related_representations(F, R, b1.step(lefts[0]), b2.step(rights[0]), bound)
        if found is None:
            return None
        for x in lefts:
            steps1[x] = found[0]
        for y in rights:
            steps2[y] = found[1]
    from ..model import make_system
    a1 = make_system(b1.name + "#", F, b1.states, steps1, b1.labels)
    a2 = make_system(b2.name + "#", F, b2.states, steps2, b2.labels)
    return a1, a2


def classical_alt_bisimilarity(sys: System) -> Partition:
    """Coarsest alternating bisimulation by direct refinement: the set
    clause at nondet states, the Larsen–Skou sums at prob states."""
    blocks = [list(sys.states)]
    while True:
        ids = {x: i for i, b in enumerate(blocks) for x in b}
        refined = []
        for b in blocks:
            groups: dict = {}
            for x in b:
                bundle = sys.step(x)
                if isinstance(bundle, SetBundle):
                    sig = ("nondet", frozenset((a, ids[t]) for a, t in bundle.elems))
                else:
                    acc: dict = {}
                    for (a, t), q in bundle.dist.items():
                        acc[(a, ids[t])] = acc.get((a, ids[t]), Fraction(0)) + q
                    sig = ("prob", frozenset(acc.items()))
                groups.setdefault(sig, []).append(x)
            refined.extend(groups.values())
        if len(refined) == len(blocks):
            return Partition.of(refined, sys.states)
        blocks = refined


# -- theorem-backed properties --------------------------------------------

def p1_preservation_bisim(rng, p, i) -> Outcome:
    alpha = _alpha(p, i)
    a, b, link = _pair(rng, DOMAIN[alpha], p)
    rels = [largest_simulation(a, b)]
    if link is not None and is_bisimulation(a, b, link):
        rels.append(link)
    ga, gb = alpha_image(alpha, a), alpha_image(alpha, b)
    broken = [R for R in rels if not is_simulation(ga, gb, R)]
    inside = largest_simulation(a, a) <= largest_simulation(ga, ga)
    ok = not broken and inside
    return Outcome(ok, _ser(alpha=alpha, a=a, b=b, broken=broken[0] if broken else None) if not ok else {})


def p2_reflection(rng, p, i) -> Outcome:
    alpha = _alpha(p, i)
    b1, b2, link = _pair(rng, CODOMAIN[alpha], p)
    a1, a2 = random_representation(rng, b1), random_representation(rng, b2)
    star = largest_simulation(b1, b2)
    mismatched = [
        R for R in _relation_family(rng, b1, b2, star, link)
        if is_simulation(b1, b2, R).holds != is_simulation(a1, a2, R, KernelOf(alpha)).holds
    ]
    reps_ok = alpha_image(alpha, a1) == b1 and alpha_image(alpha, a2) == b2
    largest_ok = largest_simulation(a1, a2, KernelOf(alpha)) == star
    ok = not mismatched and reps_ok and largest_ok
    inst = {} if ok else _ser(alpha=alpha, b1=b1, b2=b2, a1=a1, a2=a2,
                              relation=mismatched[0] if mismatched else star)
    return Outcome(ok, inst)


def p3_near_injective(rng, p, i) -> Outcome:
    alpha = _alpha(p, i)
    b1, b2, _ = _pair(rng, CODOMAIN[alpha], p, identical=True)
    R = largest_simulation(b1, b2)
    if not R or not near_injective(b1, b2, R):
        return Outcome(True, qualified=False)
    found = near_injective_witness(alpha, b1, b2, R, REPRESENTATION_BOUND)
    if found is not None:
        a1, a2 = found
        ok = (is_bisimulation(a1, a2, R).holds and alpha_image(alpha, a1) == b1
              and alpha_image(alpha, a2) == b2)
        return Outcome(ok, {} if ok else _ser(alpha=alpha, b1=b1, b2=b2, relation=R, a1=a1, a2=a2))
    # diagnose: does a larger bound find one?
    larger = None
    for bound in (4, 6):
        try:
            if near_injective_witness(alpha, b1, b2, R, bound) is not None:
                larger = bound
                break
        except MemoryError:  # pragma: no cover
            break
    inst = _ser(alpha=alpha, b1=b1, b2=b2, relation=R)
    inst["witness_at_bound"] = larger
    return Outcome(False, inst, counters={f"needs_bound_{larger}": 1})


def p4_lifting_agreement(rng, p, i) -> Outcome:
    X = [f"x{k}" for k in range(rng.randint(1, 4))]
    Y = [f"y{k}" for k in range(rng.randint(1, 4))]
    labels = LABELS[: rng.randint(1, 2)]
    q = GenParams(max_branching=3, max_denominator=p.max_denominator)
    u = random_bundle(rng, "dist", X, labels, q, terminal_chance=0.0)
    v = random_bundle(rng, "dist", Y, labels, q, terminal_chance=0.0)
    R = random_relation(rng, X, Y)
    coupled = lift_member("dist", R, u, v).holds
    subsets = lift_dist_subsets_member(R, u, v)
    counters = {"both_true": int(coupled and subsets), "both_false": int(not coupled and not subsets),
                "only_subsets": int(subsets and not coupled), "only_coupling": int(coupled and not subsets)}
    ok = coupled == subsets
    return Outcome(ok, {} if ok else _ser(u=u, v=v, relation=sorted(R.pairs), coupling=coupled,
                                            subsets=subsets), counters=counters)


def _p5_system(rng, p) -> System:
    q = GenParams(max_states=5, max_denominator=p.max_denominator, max_labels=p.max_labels,
                  max_multiplicity=p.max_multiplicity, max_branching=p.max_branching)
    if rng.random() < 0.5:
        return random_system(rng, "pmts", q, "p")
    base = random_system(rng, "pmts", q, "p", n_states=rng.randint(1, 2))
    twin, _ = gen_twin(rng, base, 5 - len(base.states), perturb=rng.random() < 0.3)
    return disjoint_union(base, twin)


def p5_ls_coincidence(rng, p, i) -> Outcome:
    sys = _p5_system(rng, p)
    ls = prob_bisimilarity(sys)
    dist = _partition(largest_simulation(alpha_image("dm", sys), alpha_image("dm", sys)))
    kernel = _partition(largest_simulation(sys, sys, KernelOf("dm")))
    ok = is_prob_bisimulation(sys, ls).holds and ls == dist == kernel
    return Outcome(ok, {} if ok else _ser(sys=sys, larsen_skou=ls, dist_bisim=dist, kernel_sim=kernel))


_F_ORDERS = {
    "support": (MultisetInclusion(), Equality(), KernelOf("support")),
    "dm": (Equality(), KernelOf("dm")),
    "dma": (MultisetInclusion(), Equality(), KernelOf("dma")),
}
_G_ORDERS = {
    "support": (Equality(), PowersetInclusion()),
    "dm": (Equality(),),
    "dma": (Equality(), PowersetInclusion()),
}


def p6_preservation_sim(rng, p, i) -> Outcome:
    alpha = _alpha(p, i)
    ordF = rng.choice(_F_ORDERS[alpha])
    ordG = projected_spec(alpha, ordF)
    a, b, link = _pair(rng, DOMAIN[alpha], p)
    rels = [largest_simulation(a, b, ordF)]
    if link is not None and is_simulation(a, b, link, ordF):
        rels.append(link)
    ga, gb = alpha_image(alpha, a), alpha_image(alpha, b)
    broken = [R for R in rels if not is_simulation(ga, gb, R, ordG)]
    # the closed form must agree with the transitive-closure definition
    bundles = {s.step(x) for s in (a, b) for x in s.states}
    universe = bundles | {canonical_bundle(alpha_bundle(alpha, u)) for u in bundles}
    closure = projected_closure(alpha, ordF, universe)
    images = sorted({alpha_bundle(alpha, u) for u in universe}, key=lambda g: sort_key(repr(g)))
    disagree = [(x, y) for x in images for y in images
                if ((x, y) in closure) != order_holds(ordG, x, y)]
    ok = not broken and not disagree
    return Outcome(ok, {} if ok else _ser(alpha=alpha, order=ordF, a=a, b=b,
                                          broken=broken[0] if broken else None,
                                          disagree=disagree[:3]))


def p7_reflection_ordered(rng, p, i) -> Outcome:
    alpha = _alpha(p, i)
    ordG = rng.choice(_G_ORDERS[alpha])
    b1, b2, link = _pair(rng, CODOMAIN[alpha], p)
    a1, a2 = random_representation(rng, b1), random_representation(rng, b2)
    induced = InducedFrom(alpha, ordG)
    star = largest_simulation(b1, b2, ordG)
    mismatched = [
        R for R in _relation_family(rng, b1, b2, star, link)
        if is_simulation(b1, b2, R, ordG).holds != is_simulation(a1, a2, R, induced).holds
    ]
    ok = not mismatched and largest_simulation(a1, a2, induced) == star
    return Outcome(ok, {} if ok else _ser(alpha=alpha, order=ordG, b1=b1, b2=b2, a1=a1, a2=a2,
                                          relation=mismatched[0] if mismatched else star))


def p8_equality_collapse(rng, p, i) -> Outcome:
    kind = p.kind or KINDS[i % len(KINDS)]
    c, d, link = _pair(rng, kind, p)
    rels = [largest_simulation(c, d), random_relation(rng, c.states, d.states),
            random_relation(rng, c.states, d.states)]
    if link is not None:
        rels.append(link)
    mismatched = [R for R in rels if is_simulation(c, d, R, Equality()) != is_bisimulation(c, d, R)]
    ok = not mismatched
    return Outcome(ok, {} if ok else _ser(c=c, d=d, relation=mismatched[0]))


def p9_alt_corollary(rng, p, i) -> Outcome:
    b1, b2, link = _pair(rng, "alt-gts", p)
    a1, a2 = random_representation(rng, b1), random_representation(rng, b2)
    star = largest_simulation(b1, b2)
    mismatched = [
        R for R in _relation_family(rng, b1, b2, star, link)
        if is_simulation(b1, b2, R).holds != is_simulation(a1, a2, R, KernelOf("dma")).holds
    ]
    joined = disjoint_union(b1, b2)
    classical = classical_alt_bisimilarity(joined)
    coalgebraic = _partition(largest_simulation(joined, joined))
    reps = disjoint_union(a1, a2)
    kernel = _partition(largest_simulation(reps, reps, KernelOf("dma")))
    ok = not mismatched and classical == coalgebraic == kernel
    return Outcome(ok, {} if ok else _ser(b1=b1, b2=b2, a1=a1, a2=a2, classical=classical,
                                          coalgebraic=coalgebraic, kernel=kernel))


def p10_ordered_crosscheck(rng, p, i) -> Outcome:
    alpha = _alpha(p, i)
    F = DOMAIN[alpha]
    X = [f"x{k}" for k in range(rng.randint(1, 3))]
    Y = [f"y{k}" for k in range(rng.randint(1, 3))]
    labels = LABELS[: rng.randint(1, 2)]
    shapes = {"support": ("multiset",), "dm": ("m1",), "dma": ("multiset", "m1")}[alpha]
    su = rng.choice(shapes)
    sv = su if rng.random() < 0.85 else rng.choice(shapes)
    u = random_bundle(rng, su, X, labels, p, terminal_chance=0.1)
    v = random_bundle(rng, sv, Y, labels, p, terminal_chance=0.1)
    R = random_relation(rng, X, Y)
    g_side = lift_ordered_member(KernelOf(alpha), F, R, u, v)
    found = find_related_representations(F, R, alpha_bundle(alpha, u), alpha_bundle(alpha, v),
                                         REPRESENTATION_BOUND)
    counters = {"witness_found": int(found is not None), "g_side_true": int(g_side)}
    small = max(len(alpha_bundle(alpha, u)), len(alpha_bundle(alpha, v))) <= 4
    if g_side and found is None and small:
        counters["bound_misses"] = 1
    ok = not (found is not None and not g_side)
    return Outcome(ok, {} if ok else _ser(alpha=alpha, u=u, v=v, relation=sorted(R.pairs)),
                   counters=counters)


# -- structural properties --------------------------------------------------

_SHAPE_KIND = {"set": "set", "multiset": "multiset", "m1": "m1", "dist": "dist"}


def _bundle_pair(rng, p, shape=None):
    shape = shape or rng.choice(("set", "multiset", "m1", "dist"))
    X = [f"x{k}" for k in range(rng.randint(1, 3))]
    Y = [f"y{k}" for k in range(rng.randint(1, 3))]
    labels = LABELS[: rng.randint(1, 2)]
    u = random_bundle(rng, shape, X, labels, p, terminal_chance=0.05)
    v = random_bundle(rng, shape, Y, labels, p, terminal_chance=0.05)
    return shape, X, Y, u, v


def s_monotonicity(rng, p, i) -> Outcome:
    shape, X, Y, u, v = _bundle_pair(rng, p)
    R = random_relation(rng, X, Y)
    bigger = R.with_pairs(R.pairs | random_relation(rng, X, Y).pairs)
    ok = not lift_member(shape, R, u, v) or lift_member(shape, bigger, u, v).holds
    return Outcome(ok, {} if ok else _ser(u=u, v=v, relation=sorted(R.pairs), bigger=sorted(bigger.pairs)))


def s_witness(rng, p, i) -> Outcome:
    shape, X, Y, u, v = _bundle_pair(rng, p)
    R = random_relation(rng, X, Y, density=rng.choice((0.5, 0.8, 1.0)))
    verdict = lift_member(shape, R, u, v)
    ok = not verdict or check_witness(shape, R, u, v, verdict.witness)
    return Outcome(ok, {} if ok else _ser(u=u, v=v, relation=sorted(R.pairs), witness=verdict.witness),
                   counters={"lifted": int(verdict.holds)})


def s_symmetry(rng, p, i) -> Outcome:
    shape, X, Y, u, v = _bundle_pair(rng, p)
    R = random_relation(rng, X, Y)
    ok = lift_member(shape, R, u, v).holds == lift_member(shape, R.transpose(), v, u).holds
    return Outcome(ok, {} if ok else _ser(u=u, v=v, relation=sorted(R.pairs)))


def s_equality_collapse(rng, p, i) -> Outcome:
    shape, X, Y, u, v = _bundle_pair(rng, p)
    R = random_relation(rng, X, Y)
    ok = lift_ordered_member(Equality(), shape, R, u, v) == lift_member(shape, R, u, v).holds
    return Outcome(ok, {} if ok else _ser(u=u, v=v, relation=sorted(R.pairs)))


def _naturality(shape: str, alpha: str):
    def check(rng, p, i) -> Outcome:
        X = [f"x{k}" for k in range(rng.randint(1, 4))]
        u = random_bundle(rng, shape, X, LABELS[: rng.randint(1, 3)], p, terminal_chance=0.05)
        f = random_renaming(rng, X)
        lhs = alpha_bundle(alpha, u.rename(f.__getitem__))
        rhs = alpha_bundle(alpha, u).rename(f.__getitem__)
        ok = lhs == rhs
        return Outcome(ok, {} if ok else _ser(u=u, renaming=f, lhs=lhs, rhs=rhs))
    return check


def s_kernel_functorial(rng, p, i) -> Outcome:
    alpha = _alpha(p, i)
    shape = {"support": "multiset", "dm": "m1", "dma": rng.choice(("multiset", "m1"))}[alpha]
    X = [f"x{k}" for k in range(rng.randint(1, 4))]
    u = random_bundle(rng, shape, X, LABELS[: rng.randint(1, 3)], p, terminal_chance=0.05)
    v = rng.choice(list(bundle_representations(alpha_bundle(alpha, u), REPRESENTATION_BOUND)))
    f = random_renaming(rng, X)
    ok = kernel_related(alpha, u, v) and kernel_related(alpha, u.rename(f.__getitem__), v.rename(f.__getitem__))
    return Outcome(ok, {} if ok else _ser(alpha=alpha, u=u, v=v, renaming=f))


def s_surjectivity(rng, p, i) -> Outcome:
    alpha = _alpha(p, i)
    b = random_system(rng, CODOMAIN[alpha], p, "g")
    ok = alpha_image(alpha, canonical_representation(b)) == b
    return Outcome(ok, {} if ok else _ser(alpha=alpha, b=b))


def s_representations(rng, p, i) -> Outcome:
    alpha = _alpha(p, i)
    q = GenParams(max_states=3, max_branching=2, max_denominator=p.max_denominator)
    b = random_system(rng, CODOMAIN[alpha], q, "g")
    reps = enumerate_representations(b, rng.randint(1, 3))
    unique = len(reps) == len({tuple(sorted(map(repr, r.steps.items()))) for r in reps})
    ok = unique and all(alpha_image(alpha, r) == b for r in reps)
    return Outcome(ok, {} if ok else _ser(alpha=alpha, b=b), counters={"representations": len(reps)})


def s_determinism(rng, p, i) -> Outcome:
    params = GenParams(seed=rng.getrandbits(64), kind=rng.choice(KINDS))
    first, second = render_system(gen_system(params)), render_system(gen_system(params))
    ok = first == second
    return Outcome(ok, {} if ok else {"params": repr(params), "first": first, "second": second})


PROPERTIES: dict[str, Callable] = {
    "P1": p1_preservation_bisim,
    "P2": p2_reflection,
    "P3": p3_near_injective,
    "P4": p4_lifting_agreement,
    "P5": p5_ls_coincidence,
    "P6": p6_preservation_sim,
    "P7": p7_reflection_ordered,
    "P8": p8_equality_collapse,
    "P9": p9_alt_corollary,
    "P10": p10_ordered_crosscheck,
    "S-monotonicity": s_monotonicity,
    "S-witness": s_witness,
    "S-symmetry": s_symmetry,
    "S-equality-collapse": s_equality_collapse,
    "S-naturality-support": _naturality("multiset", "support"),
    "S-naturality-dm": _naturality("m1", "dm"),
    "S-kernel-functorial": s_kernel_functorial,
    "S-surjectivity": s_surjectivity,
    "S-representations": s_representations,
    "S-determinism": s_determinism,
}


def instance_rng(property_id: str, seed: int, index: int) -> random.Random:
    return random.Random(f"{property_id}/{seed}/{index}")


def _run_one(property_id: str, params: GenParams, index: int) -> Outcome:
    return PROPERTIES[property_id](instance_rng(property_id, params.seed, index), params, index)


def run_check(property_id: str, params: GenParams | None = None, instances: int = 100,
              jobs: int = 1) -> CheckReport:
    if property_id not in PROPERTIES:
        raise KeyError(f"unknown property {property_id!r}; known: {', '.join(PROPERTIES)}")
    params = params or GenParams()
    start = time.perf_counter()
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            outcomes = list(pool.map(_run_one, [property_id] * instances, [params] * instances,
                                     range(instances), chunksize=max(1, instances // (4 * jobs))))
    else:
        outcomes = [_run_one(property_id, params, i) for i in range(instances)]
    report = CheckReport(property_id, instances)
    qualified = 0
    for i, o in enumerate(outcomes):
        qualified += o.qualified
        for k, v in o.counters.items():
            report.notes[k] = report.notes.get(k, 0) + v
        if not o.ok:
            report.failures.append({"index": i, **o.instance})
    if qualified != instances:
        report.notes["qualified"] = qualified
    report.elapsed = time.perf_counter() - start
    return report
