"""Acceptance criteria, one test each, at the stated instance counts and time limits.

Each test records a PASS/FAIL line that is printed in the terminal summary.
"""
import time

import pytest

from multibisim.verify.checks import run_check
from multibisim.verify.fixtures import run_fixture_suite
from multibisim.verify.generate import GenParams

from conftest import ACCEPTANCE_LINES

pytestmark = pytest.mark.acceptance

SEED = 0


def record(number, title, ok, detail):
    line = f"[{'PASS' if ok else 'FAIL'}] {number}. {title}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return ok


def _runs(ids_and_params, instances):
    start = time.perf_counter()
    reports = [run_check(pid, params, instances) for pid, params in ids_and_params]
    return reports, time.perf_counter() - start


def _failures(reports):
    return sum(len(r.failures) for r in reports)


def test_1_fixture_suite():
    report = run_fixture_suite()
    ok = report.passed and report.elapsed < 1.0
    record(1, "fixture suite", ok,
           f"{report.instances} fixtures, {len(report.failures)} failures, {report.elapsed:.3f}s (limit 1s)")
    assert ok, report.failures


def test_2_reflection_per_alpha_kind():
    # kind picks the alpha: lts -> support, dts -> dm, alt-gts -> dma
    runs = [("P2", GenParams(seed=SEED, kind=k)) for k in ("lts", "dts", "alt-gts")]
    reports, elapsed = _runs(runs, 200)
    ok = _failures(reports) == 0 and elapsed < 30
    record(2, "reflection (P2)", ok,
           f"3x200 instances, {_failures(reports)} failures, {elapsed:.1f}s (limit 30s)")
    assert ok, [r.failures[:1] for r in reports]


def test_3_preservation():
    reports, elapsed = _runs([("P1", GenParams(seed=SEED)), ("P6", GenParams(seed=SEED))], 200)
    ok = _failures(reports) == 0 and elapsed < 30
    record(3, "preservation (P1, P6)", ok,
           f"2x200 instances, {_failures(reports)} failures, {elapsed:.1f}s (limit 30s)")
    assert ok, [r.failures[:1] for r in reports]


def test_4_larsen_skou_coincidence():
    reports, elapsed = _runs([("P5", GenParams(seed=SEED, max_states=5, max_denominator=6))], 200)
    ok = _failures(reports) == 0 and elapsed < 60
    record(4, "Larsen-Skou coincidence (P5)", ok,
           f"200 pmts, {_failures(reports)} failures, {elapsed:.1f}s (limit 60s)")
    assert ok, reports[0].failures[:1]


def test_5_distribution_lifting_agreement():
    reports, elapsed = _runs([("P4", GenParams(seed=SEED))], 500)
    notes = reports[0].notes
    ok = _failures(reports) == 0 and elapsed < 60
    record(5, "coupling vs subset condition (P4)", ok,
           f"500 triples, {_failures(reports)} disagreements "
           f"(subset-only {notes.get('only_subsets', 0)}, coupling-only {notes.get('only_coupling', 0)}), "
           f"{elapsed:.1f}s (limit 60s)")
    # soundness direction holds regardless: coupling implies the subset condition
    assert notes.get("only_coupling", 0) == 0
    assert ok, reports[0].failures[:1]


def test_6_near_injective():
    reports, elapsed = _runs([("P3", GenParams(seed=SEED))], 500)
    r = reports[0]
    qualified = r.notes.get("qualified", r.instances)
    ok = r.passed
    resolved = {k: v for k, v in r.notes.items() if k.startswith("needs_bound_")}
    record(6, "near-injective representations (P3)", ok,
           f"{qualified} of 500 qualified, {len(r.failures)} without a witness at bound 3 "
           f"(found at larger bound: {resolved or 'none'}), {elapsed:.1f}s")
    assert ok, r.failures[:1]


def test_7_equality_collapse():
    reports, elapsed = _runs([("P8", GenParams(seed=SEED))], 500)
    ok = _failures(reports) == 0
    record(7, "equality collapse (P8)", ok, f"500 instances, {_failures(reports)} failures, {elapsed:.1f}s")
    assert ok, reports[0].failures[:1]


STRUCTURAL = ("S-monotonicity", "S-witness", "S-symmetry", "S-equality-collapse", "S-naturality-support",
              "S-naturality-dm", "S-kernel-functorial", "S-surjectivity", "S-representations", "S-determinism")


def test_8_structural_properties():
    reports, elapsed = _runs([(pid, GenParams(seed=SEED)) for pid in STRUCTURAL], 300)
    bad = [r.property_id for r in reports if not r.passed]
    ok = not bad
    record(8, "structural properties", ok,
           f"{len(STRUCTURAL)}x300 instances, failing: {bad or 'none'}, {elapsed:.1f}s")
    assert ok, [r.failures[:1] for r in reports if r.failures]
