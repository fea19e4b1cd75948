import random

import pytest

from multibisim.model import ALT_KINDS, KINDS, M1Bundle, MsBundle, validate_system
from multibisim.textfmt import render_system
from multibisim.transforms import alpha_for, alpha_image
from multibisim.verify.checks import (
    PROPERTIES,
    classical_alt_bisimilarity,
    find_related_representations,
    near_injective,
    near_injective_witness,
    run_check,
)
from multibisim.verify.fixtures import FIXTURES, TAGGED_EXAMPLES, SYSTEMS, run_fixture_suite
from multibisim.verify.generate import (
    GenParams,
    gen_system,
    gen_twin,
    random_representation,
    random_system,
)
from multibisim.equivalences import is_bisimulation, largest_simulation
from multibisim.model import Partition, Relation
from multibisim.textfmt import parse_system


def test_params_bounds():
    with pytest.raises(ValueError):
        GenParams(max_states=7)
    with pytest.raises(ValueError):
        GenParams(seed=-1)
    with pytest.raises(ValueError):
        GenParams(kind="nfa")
    assert GenParams().with_kind("dts").kind == "dts"


def test_same_seed_same_bytes():
    p = GenParams(seed=12345, kind="alt-gts")
    assert render_system(gen_system(p)) == render_system(gen_system(p))
    assert gen_system(GenParams(seed=1)).kind == "lts"


def test_generated_pmts_are_valid():
    for seed in range(1000):
        assert validate_system(gen_system(GenParams(seed=seed, kind="pmts"))) == []


@pytest.mark.parametrize("kind", KINDS)
def test_generated_systems_valid_per_kind(kind):
    for seed in range(100):
        sys = gen_system(GenParams(seed=seed, kind=kind))
        assert validate_system(sys) == []
        assert 1 <= len(sys.states) <= 6


def test_alt_mts_never_mixes():
    for seed in range(200):
        sys = gen_system(GenParams(seed=seed, kind="alt-mts"))
        for x in sys.states:
            assert isinstance(sys.step(x), (MsBundle, M1Bundle))


@pytest.mark.parametrize("kind", KINDS)
def test_unperturbed_twin_is_bisimilar(kind):
    rng = random.Random(kind)
    for _ in range(30):
        base = random_system(rng, kind, GenParams(), "b", n_states=3)
        twin, link = gen_twin(rng, base)
        assert validate_system(twin) == []
        assert is_bisimulation(base, twin, link)


def test_random_representation_round_trips():
    rng = random.Random(3)
    for kind in ("lts", "dts", "alt-gts"):
        sys = random_system(rng, kind, GenParams(), "g")
        assert alpha_image(alpha_for(kind), random_representation(rng, sys)) == sys


def test_near_injective_witness_on_halves_and_thirds():
    sxp, syp = parse_system(SYSTEMS["sXp"]), parse_system(SYSTEMS["sYp"])
    R = largest_simulation(sxp, syp)
    assert near_injective(sxp, syp, R)
    a1, a2 = near_injective_witness("dm", sxp, syp, R, 3)
    assert is_bisimulation(a1, a2, R)


def test_related_representation_search_respects_bound():
    sx, sy = parse_system(SYSTEMS["sX"]), parse_system(SYSTEMS["sY"])
    R = Relation.between(sx, sy, {("x1", "y1"), ("x1", "y2")})
    found = find_related_representations("mts", R, sx.step("x"), sy.step("y"), 3)
    assert found == (MsBundle({("a", "x1"): 2}), MsBundle({("a", "y1"): 1, ("a", "y2"): 1}))
    assert find_related_representations("mts", R, sx.step("x"), sy.step("y"), 1) is None


def test_classical_alternating_refinement():
    sys = parse_system("system g alt-gts\nstate s nondet\nstate t prob\nstate u prob\n"
                       "trans s a t\ntrans t a s p=1\ntrans u a s p=1\nend\n")
    assert classical_alt_bisimilarity(sys) == Partition.of([{"s"}, {"t", "u"}])


def test_unknown_property():
    with pytest.raises(KeyError):
        run_check("P11", GenParams(), 1)


@pytest.mark.parametrize("pid", sorted(set(PROPERTIES) - {"P3", "P4"}))
def test_properties_pass_smoke(pid):
    report = run_check(pid, GenParams(seed=11), 15)
    assert report.passed, report.failures[:1]
    assert report.instances == 15


def test_reports_are_deterministic():
    a = run_check("P10", GenParams(seed=5), 20)
    b = run_check("P10", GenParams(seed=5), 20)
    assert (a.failures, a.notes) == (b.failures, b.notes)


def test_parallel_matches_serial():
    a = run_check("P4", GenParams(seed=2), 40)
    b = run_check("P4", GenParams(seed=2), 40, jobs=2)
    assert (a.failures, a.notes) == (b.failures, b.notes)


def test_p3_reports_qualification():
    report = run_check("P3", GenParams(seed=0), 20)
    assert 0 < report.notes["qualified"] <= 20


def test_failures_carry_whole_instances():
    report = run_check("P4", GenParams(seed=0), 500)
    for f in report.failures:
        assert {"index", "u", "v", "relation", "coupling", "subsets"} <= set(f)
        assert f["subsets"] == "True" and f["coupling"] == "False"


def test_fixture_suite():
    report = run_fixture_suite()
    assert report.passed, report.failures
    assert report.instances == len(FIXTURES) >= 12
    assert report.notes["tagged"] == TAGGED_EXAMPLES == 29
    assert report.elapsed < 1


def test_fixture_corruption_self_test():
    corrupted = SYSTEMS["sX2"].replace("count=2", "count=3")
    report = run_fixture_suite({"sX2": corrupted})
    assert [f["fixture"] for f in report.failures] == [
        "multiset lifting: sX2 vs sY1 coupled by the stated witness"]


def test_fixture_suite_reports_unloadable_systems():
    report = run_fixture_suite({"sX": "garbage"})
    assert not report.passed and report.failures[0]["fixture"] == "load systems"
