from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from multibisim.lifting import (
    Coupling,
    check_witness,
    lift_dist_subsets_member,
    lift_member,
    lift_ordered_member,
    transport,
)
from multibisim.model import (
    CarrierError,
    DistBundle,
    KindMismatch,
    M1Bundle,
    MsBundle,
    Relation,
    SetBundle,
)
from multibisim.orders import Equality, Extensional, KernelOf, MultisetInclusion, PowersetInclusion

from conftest import bundles, seeds

Q = Fraction
X = ["x1", "x2", "x3"]
Y = ["y1", "y2", "y3"]


def rel(pairs, left=("x1",), right=("y1", "y2")):
    return Relation(frozenset(pairs), frozenset(left), frozenset(right))


PRIMES = rel({("x1", "y1"), ("x1", "y2")})


def test_set_forth_and_back():
    assert lift_member("set", PRIMES, SetBundle({("a", "x1")}), SetBundle({("a", "y1"), ("a", "y2")}))
    half = rel({("x1", "y1")})
    assert not lift_member("set", half, SetBundle({("a", "x1")}), SetBundle({("a", "y1"), ("a", "y2")}))


def test_set_labels_must_match():
    assert not lift_member("set", PRIMES, SetBundle({("a", "x1")}), SetBundle({("b", "y1")}))


def test_multiset_counts_one_versus_two():
    u = MsBundle({("a", "x1"): 1})
    v = MsBundle({("a", "y1"): 1, ("a", "y2"): 1})
    assert not lift_member("multiset", PRIMES, u, v)


def test_multiset_count_two_has_stated_witness():
    u = MsBundle({("a", "x1"): 2})
    v = MsBundle({("a", "y1"): 1, ("a", "y2"): 1})
    verdict = lift_member("multiset", PRIMES, u, v)
    assert verdict.witness == Coupling({(("a", "x1"), ("a", "y1")): 1, (("a", "x1"), ("a", "y2")): 1})


def test_m1_weights_must_agree():
    R = rel({("x", "y")}, ["x"], ["y"])
    assert not lift_member("m1", R, M1Bundle({(Q(1), "a", "x"): 1}), M1Bundle({(Q(1, 2), "a", "y"): 2}))
    assert lift_member("m1", R, M1Bundle({(Q(1, 2), "a", "x"): 2}), M1Bundle({(Q(1, 2), "a", "y"): 2}))


def test_dist_halves_versus_thirds():
    R = rel({(x, y) for x in ("x1", "x2") for y in Y}, ["x1", "x2"], Y)
    u = DistBundle({("a", "x1"): Q(1, 2), ("a", "x2"): Q(1, 2)})
    v = DistBundle({("a", y): Q(1, 3) for y in Y})
    verdict = lift_member("dist", R, u, v)
    assert verdict and check_witness("dist", R, u, v, verdict.witness)
    assert all(isinstance(w, Fraction) for w in verdict.witness.weight.values())
    assert lift_dist_subsets_member(R, u, v)


def test_subset_condition_empty_relation():
    R = rel(set(), ["x"], ["y"])
    assert not lift_dist_subsets_member(R, DistBundle({("a", "x"): 1}), DistBundle({("a", "y"): 1}))


def test_subset_condition_is_weaker_than_coupling():
    # non-equivalence R: every subset pair balances, yet no coupling exists
    R = rel({("x1", "y1"), ("x2", "y1"), ("x2", "y2")}, ["x1", "x2"], ["y1", "y2"])
    u = DistBundle({("a", "x1"): Q(1, 2), ("a", "x2"): Q(1, 2)})
    v = DistBundle({("a", "y1"): Q(1, 4), ("a", "y2"): Q(3, 4)})
    assert lift_dist_subsets_member(R, u, v)
    assert not lift_member("dist", R, u, v)


@given(seeds)
def test_coupling_implies_subset_condition(seed):
    import random
    from multibisim.verify.generate import GenParams, random_bundle, random_relation
    rng = random.Random(seed)
    u = random_bundle(rng, "dist", X, ["a"], GenParams(), terminal_chance=0)
    v = random_bundle(rng, "dist", Y, ["a"], GenParams(), terminal_chance=0)
    R = random_relation(rng, X, Y)
    if lift_member("dist", R, u, v):
        assert lift_dist_subsets_member(R, u, v)


def test_subset_condition_support_cap():
    big = [f"x{i}" for i in range(11)]
    u = DistBundle({("a", x): Q(1, 11) for x in big})
    R = Relation.full(big, big)
    with pytest.raises(ValueError, match="supports larger"):
        lift_dist_subsets_member(R, u, u)


def test_errors():
    with pytest.raises(KindMismatch):
        lift_member("multiset", PRIMES, SetBundle(), SetBundle())
    with pytest.raises(CarrierError):
        lift_member("set", PRIMES, SetBundle({("a", "zz")}), SetBundle())
    with pytest.raises(KindMismatch):
        lift_member("bogus", PRIMES, SetBundle(), SetBundle())


def test_alternating_summands_never_relate():
    R = rel(set(), ["x"], ["y"])
    assert not lift_member("alt-gts", R, SetBundle(), DistBundle())
    assert lift_member("alt-gts", R, SetBundle(), SetBundle())
    assert lift_member("alt-gts", R, DistBundle(), DistBundle())


def test_transport_exact_and_partial():
    assert transport({"a": 2}, {"b": 1, "c": 1}, lambda e, f: True) == {("a", "b"): 1, ("a", "c"): 1}
    assert transport({"a": 2}, {"b": 1}, lambda e, f: True) is None
    assert transport({"a": 1}, {"b": 1, "c": 1}, lambda e, f: True, saturate_right=False) is not None
    assert transport({"a": 1}, {}, lambda e, f: True, saturate_right=False) is None
    assert transport({}, {}, lambda e, f: True) == {}


# -- ordered lifting -----------------------------------------------------------

def test_ordered_kernel_support():
    u = MsBundle({("a", "x1"): 1})
    v = MsBundle({("a", "y1"): 1, ("a", "y2"): 1})
    assert lift_ordered_member(KernelOf("support"), "mts", PRIMES, u, v)


def test_ordered_kernel_dm():
    R = rel({("x", "y")}, ["x"], ["y"])
    assert lift_ordered_member(KernelOf("dm"), "pmts", R, M1Bundle({(Q(1), "a", "x"): 1}),
                               M1Bundle({(Q(1, 2), "a", "y"): 2}))


def test_ordered_inclusions():
    R = rel({("x1", "y1")}, ["x1"], ["y1", "y2"])
    small, big = SetBundle({("a", "x1")}), SetBundle({("a", "y1"), ("a", "y2")})
    assert lift_ordered_member(PowersetInclusion(), "lts", R, small, big)
    assert not lift_ordered_member(PowersetInclusion(), "lts", R, SetBundle({("a", "x1"), ("b", "x1")}), big)
    assert lift_ordered_member(MultisetInclusion(), "mts", R, MsBundle({("a", "x1"): 1}),
                               MsBundle({("a", "y1"): 2, ("a", "y2"): 1}))
    assert not lift_ordered_member(MultisetInclusion(), "mts", R, MsBundle({("a", "x1"): 3}),
                                   MsBundle({("a", "y1"): 2}))


def test_ordered_extensional_uses_chain():
    R = rel({("x1", "y1")}, ["x1"], ["y1"])
    lo, hi = MsBundle({("a", "x1"): 1}), MsBundle({("a", "x1"): 2})
    order = Extensional.closure("mts", {(lo, hi)})
    assert lift_ordered_member(order, "mts", R, lo, MsBundle({("a", "y1"): 2}))
    assert not lift_ordered_member(Equality(), "mts", R, lo, MsBundle({("a", "y1"): 2}))


def test_ordered_rejects_inapplicable_order():
    with pytest.raises(KindMismatch):
        lift_ordered_member(PowersetInclusion(), "mts", PRIMES, MsBundle(), MsBundle())


# -- properties -------------------------------------------------------------------

def _pair(shape, seed):
    import random
    from multibisim.verify.generate import GenParams, random_bundle, random_relation
    rng = random.Random(seed)
    u = random_bundle(rng, shape, X, ["a", "b"], GenParams(), terminal_chance=0.1)
    v = random_bundle(rng, shape, Y, ["a", "b"], GenParams(), terminal_chance=0.1)
    return u, v, random_relation(rng, X, Y), random_relation(rng, X, Y)


shapes = st.sampled_from(["set", "multiset", "m1", "dist"])


@given(shapes, seeds)
def test_monotone_in_relation(shape, seed):
    u, v, R, extra = _pair(shape, seed)
    if lift_member(shape, R, u, v):
        assert lift_member(shape, R.with_pairs(R.pairs | extra.pairs), u, v)


@given(shapes, seeds)
def test_witness_marginals(shape, seed):
    u, v, _, _ = _pair(shape, seed)
    R = Relation.full(X, Y)
    verdict = lift_member(shape, R, u, v)
    if verdict:
        assert check_witness(shape, R, u, v, verdict.witness)
        assert check_witness(shape, R.transpose(), v, u, verdict.witness.transpose())


@given(shapes, seeds)
def test_symmetric(shape, seed):
    u, v, R, _ = _pair(shape, seed)
    assert lift_member(shape, R, u, v).holds == lift_member(shape, R.transpose(), v, u).holds


@given(shapes, seeds)
def test_equality_order_collapses(shape, seed):
    u, v, R, _ = _pair(shape, seed)
    assert lift_ordered_member(Equality(), shape, R, u, v) == lift_member(shape, R, u, v).holds


@given(bundles())
def test_every_bundle_lifts_through_identity(u):
    R = Relation.identity(["x0", "x1", "x2"])
    verdict = lift_member(_shape(u), R, u, u)
    assert verdict


def _shape(u):
    return {SetBundle: "set", MsBundle: "multiset", M1Bundle: "m1", DistBundle: "dist"}[type(u)]


def test_bad_witness_is_rejected():
    u = MsBundle({("a", "x1"): 2})
    v = MsBundle({("a", "y1"): 1, ("a", "y2"): 1})
    assert not check_witness("multiset", PRIMES, u, v, Coupling({(("a", "x1"), ("a", "y1")): 2}))
    assert not check_witness("multiset", rel({("x1", "y1")}), u, v,
                             Coupling({(("a", "x1"), ("a", "y1")): 1, (("a", "x1"), ("a", "y2")): 1}))
