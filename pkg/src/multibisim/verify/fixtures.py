"""Golden replays of the small worked examples.

Systems are kept as text so a caller can substitute a corrupted copy
(``overrides``) and watch exactly the dependent fixtures fail.
"""
from __future__ import annotations

import tempfile
import time
from collections.abc import Callable
from fractions import Fraction
from pathlib import Path

from ..equivalences import (
    is_bisimulation,
    is_prob_bisimulation,
    is_simulation,
    largest_simulation,
    prob_bisimilarity,
)
from ..lifting import Coupling, check_witness, lift_dist_subsets_member, lift_member, lift_ordered_member
from ..model import (
    DistBundle,
    M1Bundle,
    MsBundle,
    Multiset,
    Partition,
    Relation,
    SetBundle,
    disjoint_union,
    validate_system,
)
from ..orders import Equality, InducedFrom, KernelOf, order_holds
from ..textfmt import parse_system, render_relation
from ..transforms import (
    alpha_bundle,
    alpha_image,
    bundle_representations,
    canonical_representation,
    enumerate_representations,
    kernel_related,
)
from .checks import CheckReport

SYSTEMS = {
    "sX": "system sX lts\nstate x\nstate x1\ntrans x a x1\nend\n",
    "sY": "system sY lts\nstate y\nstate y1\nstate y2\ntrans y a y1\ntrans y a y2\nend\n",
    "sX1": "system sX1 mts\nstate x\nstate x1\ntrans x a x1\nend\n",
    "sX2": "system sX2 mts\nstate x\nstate x1\ntrans x a x1 count=2\nend\n",
    "sY1": "system sY1 mts\nstate y\nstate y1\nstate y2\ntrans y a y1\ntrans y a y2\nend\n",
    "pa": "system pa pmts\nstate x\ntrans x a x p=1\nend\n",
    "pb": "system pb pmts\nstate y\ntrans y a y count=2 p=1/2\nend\n",
    "sXp": "system sXp dts\nstate x\nstate x1\nstate x2\ntrans x a x1 p=1/2\ntrans x a x2 p=1/2\nend\n",
    "sYp": ("system sYp dts\nstate y\nstate y1\nstate y2\nstate y3\n"
            "trans y a y1 p=1/3\ntrans y a y2 p=1/3\ntrans y a y3 p=1/3\nend\n"),
    "sXp3": ("system sXp3 pmts\nstate x\nstate x1\nstate x2\n"
             "trans x a x1 count=3 p=1/6\ntrans x a x2 count=3 p=1/6\nend\n"),
    "sYp2": ("system sYp2 pmts\nstate y\nstate y1\nstate y2\nstate y3\n"
             "trans y a y1 count=2 p=1/6\ntrans y a y2 count=2 p=1/6\ntrans y a y3 count=2 p=1/6\nend\n"),
}

# examples that are property runs rather than single goldens; replayed by run_check
DELEGATED = ("P2 reflection, 200 instances", "P5 coincidence, 200 instances",
             "P3 near-injective, 500 instances")

Q = Fraction


class _Env:
    def __init__(self, overrides: dict | None):
        texts = {**SYSTEMS, **(overrides or {})}
        self.texts = texts
        self.sys = {k: parse_system(v) for k, v in texts.items()}

    def rel(self, c, d, pairs) -> Relation:
        return Relation.between(self.sys[c], self.sys[d], pairs)


def _sxsy(env):
    return env.rel("sX", "sY", {("x", "y"), ("x1", "y1"), ("x1", "y2")})


def _rel(left, right, pairs) -> Relation:
    return Relation(frozenset(pairs), frozenset(left), frozenset(right))


def _primes():
    return _rel(["x1"], ["y1", "y2"], {("x1", "y1"), ("x1", "y2")})


def _lift_cases(env):
    R = _primes()
    dist_R = _rel(["x1", "x2"], ["y1", "y2", "y3"],
                  {(f"x{i}", f"y{j}") for i in (1, 2) for j in (1, 2, 3)})
    u_dist = env.sys["sXp"].step("x")
    v_dist = env.sys["sYp"].step("y")
    return [
        ("set", R, SetBundle({("a", "x1")}), SetBundle({("a", "y1"), ("a", "y2")}), True),
        ("multiset", R, MsBundle({("a", "x1"): 1}), MsBundle({("a", "y1"): 1, ("a", "y2"): 1}), False),
        ("multiset", R, env.sys["sX2"].step("x"), env.sys["sY1"].step("y"), True),
        ("m1", _rel(["x"], ["y"], {("x", "y")}), M1Bundle({(Q(1), "a", "x"): 1}),
         M1Bundle({(Q(1, 2), "a", "y"): 2}), False),
        ("dist", dist_R, u_dist, v_dist, True),
    ]


def _f_valid_pb(env):
    return not validate_system(env.sys["pb"])


def _lift_case(i):
    def check(env):
        kind, R, u, v, expected = _lift_cases(env)[i]
        return lift_member(kind, R, u, v).holds == expected
    return check


def _f_multiset_witness(env):
    kind, R, u, v, _ = _lift_cases(env)[2]
    verdict = lift_member(kind, R, u, v)
    stated = Coupling({(("a", "x1"), ("a", "y1")): 1, (("a", "x1"), ("a", "y2")): 1})
    return verdict.holds and verdict.witness == stated and check_witness(kind, R, u, v, stated)


def _f_subsets(env):
    _, R, u, v, _ = _lift_cases(env)[4]
    return lift_dist_subsets_member(R, u, v) is True


def _f_equality_reduces(env):
    return all(lift_ordered_member(Equality(), k, R, u, v) == lift_member(k, R, u, v).holds
               for k, R, u, v, _ in _lift_cases(env))


def _f_kernel_support_lift(env):
    return lift_ordered_member(KernelOf("support"), "mts", _primes(),
                               MsBundle({("a", "x1"): 1}), MsBundle({("a", "y1"): 1, ("a", "y2"): 1}))


def _f_sxsy_bisim(env):
    return is_simulation(env.sys["sX"], env.sys["sY"], _sxsy(env)).holds


def _mts_rel(env):
    return env.rel("sX1", "sY1", {("x", "y"), ("x1", "y1"), ("x1", "y2")})


def _f_canonical_not_bisim(env):
    v = is_simulation(env.sys["sX1"], env.sys["sY1"], _mts_rel(env))
    return not v.holds and v.counterexample == ("x", "y")


def _f_canonical_kernel(env):
    return is_simulation(env.sys["sX1"], env.sys["sY1"], _mts_rel(env), KernelOf("support")).holds


def _f_papb_kernel(env):
    return is_simulation(env.sys["pa"], env.sys["pb"], env.rel("pa", "pb", {("x", "y")}), KernelOf("dm")).holds


def _f_largest_sxsy(env):
    return ("x", "y") in largest_simulation(env.sys["sX"], env.sys["sY"]).pairs


def _f_largest_papb(env):
    return ("x", "y") not in largest_simulation(env.sys["pa"], env.sys["pb"]).pairs


def _joined_pmts(env):
    return disjoint_union(canonical_representation(env.sys["sXp"]), canonical_representation(env.sys["sYp"]))


def _f_prob_partition(env):
    sys = _joined_pmts(env)
    first = {"left:x", "right:y"}
    P = Partition.of([first, set(sys.states) - first], sys.states)
    return is_prob_bisimulation(sys, P).holds


def _f_prob_bisimilarity(env):
    return prob_bisimilarity(_joined_pmts(env)).class_of("left:x") == prob_bisimilarity(
        _joined_pmts(env)).class_of("right:y")


def _f_support_images(env):
    return alpha_image("support", env.sys["sX2"]) == alpha_image("support", env.sys["sX1"]) == env.sys["sX"]


def _f_dm_split(env):
    return alpha_bundle("dm", env.sys["sXp3"].step("x")) == DistBundle({("a", "x1"): Q(1, 2), ("a", "x2"): Q(1, 2)})


def _f_sx_representations(env):
    reps = enumerate_representations(env.sys["sX"], 3)
    return [r.step("x") for r in reps] == [MsBundle({("a", "x1"): m}) for m in (1, 2, 3)]


def _f_dist_split(env):
    return env.sys["sXp3"].step("x") in set(bundle_representations(env.sys["sXp"].step("x"), 3))


def _f_kernel_counts(env):
    return kernel_related("support", MsBundle({("a", "x1"): 1}), MsBundle({("a", "x1"): 2}))


def _f_induced_equality(env):
    bundles = [b for k in ("sX1", "sX2", "sY1") for b in env.sys[k].steps.values()]
    return all(order_holds(InducedFrom("support", Equality()), u, v) == kernel_related("support", u, v)
               for u in bundles for v in bundles)


def _f_parse_count(env):
    sys = parse_system("system q pmts\nstate y\ntrans y a y p=1/2 count=2\nend\n")
    return sys.step("y") == M1Bundle(Multiset({(Q(1, 2), "a", "y"): 2}))


def _cli(env, sys1, sys2, pairs, extra):
    from ..cli import run_command

    with tempfile.TemporaryDirectory() as tmp:
        d = Path(tmp)
        (d / "a.sys").write_text(env.texts[sys1])
        (d / "b.sys").write_text(env.texts[sys2])
        (d / "r.rel").write_text(render_relation(env.rel(sys1, sys2, pairs)))
        return run_command([*extra[:2], "--sys1", str(d / "a.sys"), "--sys2", str(d / "b.sys"),
                            "--rel", str(d / "r.rel"), *extra[2:]])


def _f_cli_kernel(env):
    code, _ = _cli(env, "sX1", "sY1", {("x", "y"), ("x1", "y1"), ("x1", "y2")},
                   ["check", "sim", "--order", "kernel-support"])
    return code == 0


def _f_cli_refuted(env):
    code, text = _cli(env, "pa", "pb", {("x", "y")}, ["check", "bisim"])
    return code == 1 and "(x, y)" in text


def _f_thirds_coupling(env):
    c, d = env.sys["sXp3"], env.sys["sYp2"]
    R = env.rel("sXp3", "sYp2", {("x", "y")} | {(f"x{i}", f"y{j}") for i in (1, 2) for j in (1, 2, 3)})
    sixth = Q(1, 6)
    stated = Coupling({((sixth, "a", f"x{i}"), (sixth, "a", f"y{j}")): 1 for i in (1, 2) for j in (1, 2, 3)})
    return is_bisimulation(c, d, R).holds and check_witness("pmts", R, c.step("x"), d.step("y"), stated)


FIXTURES: list[tuple[str, Callable]] = [
    ("pb bundle 2*(1/2,a,y) is valid", _f_valid_pb),
    ("set lifting: forth and back hold", _lift_case(0)),
    ("multiset lifting: counts 1 vs 2 admit no coupling", _lift_case(1)),
    ("multiset lifting: sX2 vs sY1 coupled by the stated witness", _f_multiset_witness),
    ("m1 lifting: weights 1 vs 1/2 unrelated", _lift_case(3)),
    ("dist lifting: halves vs thirds", _lift_case(4)),
    ("subset condition: halves vs thirds", _f_subsets),
    ("equality order reduces to plain lifting", _f_equality_reduces),
    ("kernel-support lifting of sX1 vs sY1 bundles", _f_kernel_support_lift),
    ("sX/sY set bisimulation", _f_sxsy_bisim),
    ("sX1/sY1 not a multiset bisimulation, fails at (x,y)", _f_canonical_not_bisim),
    ("sX1/sY1 kernel-support simulation", _f_canonical_kernel),
    ("pa/pb kernel-dm simulation", _f_papb_kernel),
    ("largest bisimulation sX/sY contains (x,y)", _f_largest_sxsy),
    ("largest bisimulation pa/pb omits (x,y)", _f_largest_papb),
    ("sXp+sYp partition is a probabilistic bisimulation", _f_prob_partition),
    ("sXp+sYp bisimilarity merges x and y", _f_prob_bisimilarity),
    ("support(sX2) = support(sX1) = sX", _f_support_images),
    ("dm(sXp3) is the half/half distribution", _f_dm_split),
    ("sX representations at bound 3", _f_sx_representations),
    ("half/half split into sixths is a representation", _f_dist_split),
    ("1*(a,x1) kernel-related to 2*(a,x1)", _f_kernel_counts),
    ("induced equality order is the kernel", _f_induced_equality),
    ("count=2 p=1/2 parses as 2*(1/2,a,y)", _f_parse_count),
    ("cli: kernel-support simulation exits 0", _f_cli_kernel),
    ("cli: pa/pb bisimulation refuted at (x,y)", _f_cli_refuted),
    ("sXp3/sYp2 m1 bisimulation via 1/6-weight coupling", _f_thirds_coupling),
]

TAGGED_EXAMPLES = len(FIXTURES) - 1 + len(DELEGATED)


def run_fixture_suite(overrides: dict | None = None) -> CheckReport:
    """Replay every golden fixture; ``overrides`` replaces system texts by name."""
    start = time.perf_counter()
    report = CheckReport("fixtures", len(FIXTURES))
    try:
        env = _Env(overrides)
    except ValueError as exc:
        report.failures.append({"fixture": "load systems", "error": str(exc)})
        report.elapsed = time.perf_counter() - start
        return report
    for name, check in FIXTURES:
        try:
            ok = bool(check(env))
            err = None
        except Exception as exc:  # a crash is a failed fixture, not a crashed suite
            ok, err = False, f"{type(exc).__name__}: {exc}"
        if not ok:
            report.failures.append({"fixture": name, **({"error": err} if err else {})})
    report.notes.update(tagged=TAGGED_EXAMPLES, replayed=len(FIXTURES), delegated=len(DELEGATED))
    report.elapsed = time.perf_counter() - start
    return report
