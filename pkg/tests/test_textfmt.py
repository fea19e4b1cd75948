from fractions import Fraction
from pathlib import Path

import pytest
from hypothesis import given

from multibisim.model import DistBundle, M1Bundle, MsBundle, Multiset, Partition, SetBundle
from multibisim.textfmt import (
    InvalidSystem,
    ParseError,
    format_rat,
    parse_bundle,
    parse_order,
    parse_partition,
    parse_rat,
    parse_relation,
    parse_system,
    render_partition,
    render_relation,
    render_system,
)
from multibisim.verify.fixtures import SYSTEMS

from conftest import systems

CORPUS = Path(__file__).parent / "corpus"


def test_sx_grammar_instance():
    s = parse_system("system sx lts\nstate x\nstate x1\ntrans x a x1\nend")
    assert s.states == ("x", "x1") and s.step("x") == SetBundle({("a", "x1")})


def test_count_and_weight():
    s = parse_system("system q pmts\nstate y\ntrans y a y p=1/2 count=2\nend\n")
    assert s.step("y") == M1Bundle(Multiset({(Fraction(1, 2), "a", "y"): 2}))


def test_decimals_rejected_with_position():
    with pytest.raises(ParseError) as err:
        parse_system("system q pmts\nstate y\ntrans y a y p=0.5\nend\n")
    assert err.value.message == "decimals not accepted; write 1/2"
    assert (err.value.line, err.value.col) == (3, 15)


def test_rationals():
    assert parse_rat("3/6") == Fraction(1, 2) and parse_rat("1") == 1
    assert format_rat(Fraction(2, 4)) == "1/2" and format_rat(Fraction(1)) == "1"
    with pytest.raises(ParseError):
        parse_rat("1/0")
    with pytest.raises(ParseError):
        parse_rat("x")


@pytest.mark.parametrize("text, fragment", [
    ("state x\nend\n", "system"),
    ("system q lts\nstate x\n", "missing 'end'"),
    ("system q foo\nend\n", "unknown kind"),
    ("system q lts\nstate x\nstate x\nend\n", "duplicate state"),
    ("system q lts\nstate x\ntrans x a y\nend\n", "undeclared state"),
    ("system q lts\nstate x\ntrans x a x count=2\nend\n", "no count"),
    ("system q pmts\nstate x\ntrans x a x\nend\n", "needs p="),
    ("system q mts\nstate x\ntrans x a x p=1\nend\n", "takes no p="),
    ("system q alt-mts\nstate x\nend\n", "needs a nondet|prob mode"),
    ("system q lts\nstate x prob\nend\n", "cannot be prob"),
    ("system q dts\nstate x\ntrans x a x p=1/2\ntrans x a x p=1/2\nend\n", "duplicate transition"),
    ("system q lts\nbogus\nend\n", "unknown declaration"),
    ("system q lts\nend\nstate x\n", "after 'end'"),
])
def test_syntax_errors(text, fragment):
    with pytest.raises(ParseError, match=fragment):
        parse_system(text)


def test_invalid_mass_is_forwarded():
    with pytest.raises(InvalidSystem) as err:
        parse_system("system q pmts\nstate x\ntrans x a x p=1/2\nend\n")
    assert [d.rule for d in err.value.diagnostics] == ["mass"]
    with pytest.raises(InvalidSystem, match="3/4"):
        parse_system("system q dts\nstate x\ntrans x a x p=3/4\nend\n")
    assert parse_system("system q pmts\nstate x\ntrans x a x p=1/2\nend\n", validate=False)


def test_comments_and_blank_lines():
    s = parse_system("# a comment\n\nsystem q lts  # trailing\nstate x\n\nend\n")
    assert s.states == ("x",)


@pytest.mark.parametrize("name", sorted(SYSTEMS))
def test_round_trip_worked_examples(name):
    assert render_system(parse_system(SYSTEMS[name])) == SYSTEMS[name]


@pytest.mark.parametrize("path", sorted(CORPUS.glob("*.sys")), ids=lambda p: p.name)
def test_round_trip_corpus(path):
    text = path.read_text()
    assert render_system(parse_system(text)).rstrip() == text.rstrip()


@given(systems())
def test_render_parse_round_trip(sys):
    text = render_system(sys)
    again = parse_system(text)
    assert render_system(again) == text
    assert dict(again.steps) == dict(sys.steps)


def test_relations_and_partitions():
    R = parse_relation("pair x y\n# c\npair x z\n", ["x"], ["y", "z"])
    assert R.pairs == {("x", "y"), ("x", "z")}
    assert parse_relation(render_relation(R), ["x"], ["y", "z"]) == R
    with pytest.raises(ParseError, match="left system"):
        parse_relation("pair q y\n", ["x"], ["y"])
    P = parse_partition("class a b\nclass c\n", {"a", "b", "c"})
    assert P == Partition.of([{"a", "b"}, {"c"}])
    assert render_partition(P) == "class a b\nclass c\n"
    with pytest.raises(ParseError, match="already in a class"):
        parse_partition("class a\nclass a\n")


def test_bundle_literals():
    assert parse_bundle("{a>x}", "lts") == SetBundle({("a", "x")})
    assert parse_bundle("[a>x*2,a>y]", "mts") == MsBundle({("a", "x"): 2, ("a", "y"): 1})
    assert parse_bundle("[1/2@a>x*2]", "pmts") == M1Bundle({(Fraction(1, 2), "a", "x"): 2})
    assert parse_bundle("<1/2@a>x,1/2@a>y>", "dts") == DistBundle({("a", "x"): Fraction(1, 2),
                                                                   ("a", "y"): Fraction(1, 2)})
    assert parse_bundle("prob<1@a>x>", "alt-gts") == DistBundle({("a", "x"): 1})
    assert parse_bundle("[]", "mts") == MsBundle()
    with pytest.raises(ParseError):
        parse_bundle("{a>x}", "mts")


def test_order_files():
    order = parse_order("order mts\nle [a>x] [a>x*2]\n")
    assert order.kind == "mts"
    assert (MsBundle({("a", "x"): 1}), MsBundle({("a", "x"): 2})) in order.pairs
    with pytest.raises(ParseError, match="order <kind>"):
        parse_order("le [a>x] [a>x]\n")
