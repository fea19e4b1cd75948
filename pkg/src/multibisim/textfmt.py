"""Line-oriented file formats.

System files::

    system <name> <lts|mts|pmts|dts|alt-mts|alt-gts>
    state <id> [nondet|prob]
    trans <src> <label> <tgt> [count=<int>] [p=<num>/<den>]
    end

Relation files hold ``pair <l> <r>`` lines, partition files hold
``class <id>...`` lines and order files hold an ``order <kind>`` header
followed by ``le <bundle> <bundle>`` lines.  ``#`` starts a comment.
"""
from __future__ import annotations

import re
from collections.abc import Iterable
from dataclasses import dataclass
from fractions import Fraction

from .model import (
    ALT_KINDS,
    KINDS,
    Bundle,
    Diagnostic,
    DistBundle,
    M1Bundle,
    MsBundle,
    Multiset,
    Partition,
    Relation,
    SetBundle,
    System,
    default_mode,
    make_system,
    sort_key,
    validate_system,
)
from .orders import Extensional


class ParseError(ValueError):
    def __init__(self, line: int, col: int, message: str):
        super().__init__(f"line {line}, column {col}: {message}")
        self.line, self.col, self.message = line, col, message


class InvalidSystem(ValueError):
    def __init__(self, diagnostics: list[Diagnostic]):
        super().__init__("; ".join(str(d) for d in diagnostics))
        self.diagnostics = diagnostics


_NUM = re.compile(r"^-?\d+(/\d+)?$")


def parse_rat(text: str, line: int = 0, col: int = 0) -> Fraction:
    if _NUM.match(text):
        num, _, den = text.partition("/")
        if den and int(den) == 0:
            raise ParseError(line, col, "zero denominator")
        return Fraction(int(num), int(den or 1))
    try:
        q = Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise ParseError(line, col, f"not a rational: {text!r}") from None
    raise ParseError(line, col, f"decimals not accepted; write {format_rat(q)}")


def format_rat(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


@dataclass
class _Tok:
    text: str
    col: int


def _tokens(line: str) -> list[_Tok]:
    line = line.split("#", 1)[0]
    return [_Tok(m.group(), m.start() + 1) for m in re.finditer(r"\S+", line)]


def _content_lines(text: str):
    for no, raw in enumerate(text.splitlines(), start=1):
        toks = _tokens(raw)
        if toks:
            yield no, toks


def parse_system(text: str, validate: bool = True) -> System:
    """Parse one system.  Raises :class:`ParseError` (with line and column)
    or :class:`InvalidSystem` when the parsed system breaks an invariant."""
    header = None
    ended = False
    states: list = []
    modes: dict = {}
    trans: list[tuple] = []
    last = 0
    for no, toks in _content_lines(text):
        last = no
        head = toks[0]
        if ended:
            raise ParseError(no, head.col, "content after 'end'")
        if header is None:
            if head.text != "system" or len(toks) != 3:
                raise ParseError(no, head.col, "expected 'system <name> <kind>'")
            if toks[2].text not in KINDS:
                raise ParseError(no, toks[2].col, f"unknown kind {toks[2].text!r}; expected one of {', '.join(KINDS)}")
            header = (toks[1].text, toks[2].text)
            continue
        kind = header[1]
        if head.text == "state":
            if len(toks) not in (2, 3):
                raise ParseError(no, head.col, "expected 'state <id> [nondet|prob]'")
            sid = toks[1].text
            if sid in modes:
                raise ParseError(no, toks[1].col, f"duplicate state id {sid!r}")
            if len(toks) == 3:
                tag = toks[2]
                if tag.text not in ("nondet", "prob"):
                    raise ParseError(no, tag.col, f"state mode must be nondet or prob, got {tag.text!r}")
                if kind not in ALT_KINDS and tag.text != default_mode(kind):
                    raise ParseError(no, tag.col, f"{kind} states cannot be {tag.text}")
                mode = tag.text
            elif kind in ALT_KINDS:
                raise ParseError(no, toks[1].col + len(sid), f"{kind} state {sid!r} needs a nondet|prob mode")
            else:
                mode = default_mode(kind)
            states.append(sid)
            modes[sid] = mode
        elif head.text == "trans":
            if len(toks) < 4:
                raise ParseError(no, head.col, "expected 'trans <src> <label> <tgt> [count=<int>] [p=<num>/<den>]'")
            count, p = 1, None
            for opt in toks[4:]:
                key, eq, val = opt.text.partition("=")
                if not eq or key not in ("count", "p"):
                    raise ParseError(no, opt.col, f"unexpected {opt.text!r}")
                if key == "count":
                    if not val.isdigit() or int(val) < 1:
                        raise ParseError(no, opt.col + 6, "count must be a positive integer")
                    count = int(val)
                else:
                    p = parse_rat(val, no, opt.col + 2)
            trans.append((no, toks, count, p))
        elif head.text == "end":
            if len(toks) != 1:
                raise ParseError(no, toks[1].col, "unexpected text after 'end'")
            ended = True
        else:
            raise ParseError(no, head.col, f"unknown declaration {head.text!r}")
    if header is None:
        raise ParseError(max(last, 1), 1, "missing 'system' header")
    if not ended:
        raise ParseError(last, 1, "missing 'end'")
    name, kind = header

    sets: dict = {x: set() for x in states}
    counts: dict = {x: {} for x in states}
    masses: dict = {x: {} for x in states}
    for no, toks, count, p in trans:
        src, label, tgt = toks[1], toks[2], toks[3]
        if src.text not in modes:
            raise ParseError(no, src.col, f"undeclared state {src.text!r}")
        if tgt.text not in modes:
            raise ParseError(no, tgt.col, f"undeclared state {tgt.text!r}")
        mode = modes[src.text]
        if mode == "prob" and p is None:
            raise ParseError(no, _head_col(toks), f"probabilistic state {src.text!r} needs p=<num>/<den>")
        if mode == "nondet" and p is not None:
            raise ParseError(no, _head_col(toks), f"non-deterministic state {src.text!r} takes no p=")
        elem = (label.text, tgt.text)
        x = src.text
        if kind in ("lts", "alt-gts") and mode == "nondet":
            if count != 1:
                raise ParseError(no, _head_col(toks), f"{kind} transitions carry no count")
            sets[x].add(elem)
        elif kind in ("dts", "alt-gts"):
            if count != 1:
                raise ParseError(no, _head_col(toks), "distribution transitions carry no count")
            if elem in masses[x]:
                raise ParseError(no, src.col, f"duplicate transition {x} {label.text} {tgt.text}")
            masses[x][elem] = p
        elif mode == "prob":
            key = (p, label.text, tgt.text)
            counts[x][key] = counts[x].get(key, 0) + count
        else:
            counts[x][elem] = counts[x].get(elem, 0) + count

    steps: dict = {}
    problems: list[Diagnostic] = []
    for x in states:
        mode = modes[x]
        if kind in ("lts", "alt-gts") and mode == "nondet":
            steps[x] = SetBundle(frozenset(sets[x]))
        elif kind in ("dts", "alt-gts"):
            total = sum(masses[x].values(), Fraction(0))
            if masses[x] and total != 1:
                problems.append(Diagnostic(x, "mass", f"probability mass {format_rat(total)} ≠ 1 at {x}"))
                steps[x] = DistBundle()
            else:
                steps[x] = DistBundle(masses[x])
        elif mode == "prob":
            steps[x] = M1Bundle(Multiset(counts[x]))
        else:
            steps[x] = MsBundle(Multiset(counts[x]))
    sys = make_system(name, kind, states, steps)
    problems += validate_system(sys)
    if validate and problems:
        raise InvalidSystem(problems)
    return sys


def _head_col(toks: list[_Tok]) -> int:
    return toks[0].col


def _elements_in_order(sys: System, x):
    index = {s: i for i, s in enumerate(sys.states)}
    b = sys.step(x)
    if isinstance(b, SetBundle):
        return [((a, t), 1, None) for a, t in sorted(b.elems, key=lambda e: (sort_key(e[0]), index[e[1]]))]
    if isinstance(b, MsBundle):
        return [((a, t), n, None) for (a, t), n in sorted(b.ms.items(), key=lambda kv: (sort_key(kv[0][0]), index[kv[0][1]]))]
    if isinstance(b, M1Bundle):
        return [((a, t), n, p) for (p, a, t), n in
                sorted(b.ms.items(), key=lambda kv: (sort_key(kv[0][1]), index[kv[0][2]], kv[0][0]))]
    return [((a, t), 1, q) for (a, t), q in sorted(b.dist.items(), key=lambda kv: (sort_key(kv[0][0]), index[kv[0][1]]))]


def render_system(sys: System) -> str:
    lines = [f"system {sys.name} {sys.kind}"]
    for x in sys.states:
        lines.append(f"state {x} {sys.mode(x)}" if sys.kind in ALT_KINDS else f"state {x}")
    for x in sys.states:
        for (a, t), n, p in _elements_in_order(sys, x):
            line = f"trans {x} {a} {t}"
            if n != 1:
                line += f" count={n}"
            if p is not None:
                line += f" p={format_rat(p)}"
            lines.append(line)
    lines.append("end")
    return "\n".join(lines) + "\n"


def parse_relation(text: str, left: Iterable, right: Iterable) -> Relation:
    left, right = frozenset(left), frozenset(right)
    pairs = set()
    for no, toks in _content_lines(text):
        if toks[0].text != "pair" or len(toks) != 3:
            raise ParseError(no, toks[0].col, "expected 'pair <left> <right>'")
        if toks[1].text not in left:
            raise ParseError(no, toks[1].col, f"{toks[1].text!r} is not a state of the left system")
        if toks[2].text not in right:
            raise ParseError(no, toks[2].col, f"{toks[2].text!r} is not a state of the right system")
        pairs.add((toks[1].text, toks[2].text))
    return Relation(frozenset(pairs), left, right)


def render_relation(R: Relation) -> str:
    return "".join(f"pair {x} {y}\n" for x, y in R.sorted_pairs())


def parse_partition(text: str, carrier: Iterable | None = None) -> Partition:
    classes = []
    seen: dict = {}
    for no, toks in _content_lines(text):
        if toks[0].text != "class" or len(toks) < 2:
            raise ParseError(no, toks[0].col, "expected 'class <id>...'")
        for t in toks[1:]:
            if t.text in seen:
                raise ParseError(no, t.col, f"{t.text!r} already in a class on line {seen[t.text]}")
            if carrier is not None and t.text not in carrier:
                raise ParseError(no, t.col, f"{t.text!r} is not a state")
            seen[t.text] = no
        classes.append(frozenset(t.text for t in toks[1:]))
    return Partition.of(classes, carrier if carrier is not None else seen)


def render_partition(P: Partition) -> str:
    return "".join("class " + " ".join(c) + "\n" for c in P.sorted_classes())


# bundle literals: [a>x*2,a>y] | [1/2@a>x*2] | {a>x} | <1/2@a>x,1/2@a>y>
# alternating kinds prefix with nondet/prob when the bracket is ambiguous
_ELEM = re.compile(r"^(?:(?P<p>[^@]+)@)?(?P<a>[^>*@]+)>(?P<x>[^*@]+)(?:\*(?P<n>\d+))?$")


def parse_bundle(text: str, kind: str, line: int = 0, col: int = 0) -> Bundle:
    shape = {"lts": "{", "mts": "[", "pmts": "[p", "dts": "<"}
    body = text
    mode = None
    for pre in ("nondet", "prob"):
        if body.startswith(pre):
            mode, body = pre, body[len(pre):]
    if kind == "alt-mts":
        want = "[p" if mode == "prob" else "["
    elif kind == "alt-gts":
        want = "<" if mode == "prob" else "{"
    else:
        want = shape[kind]
    opening = want[0]
    closing = {"{": "}", "[": "]", "<": ">"}[opening]
    if not (body.startswith(opening) and body.endswith(closing)):
        raise ParseError(line, col, f"expected a {kind} bundle written {opening}...{closing}")
    inner = body[1:-1]
    elems = []
    for part in filter(None, inner.split(",")):
        m = _ELEM.match(part)
        if not m:
            raise ParseError(line, col, f"bad bundle element {part!r}")
        p = parse_rat(m["p"], line, col) if m["p"] else None
        elems.append((m["a"], m["x"], int(m["n"] or 1), p))
    if want == "{":
        return SetBundle(frozenset((a, x) for a, x, _, _ in elems))
    if want == "<":
        return DistBundle({(a, x): p for a, x, _, p in elems})
    if want == "[p":
        ms: dict = {}
        for a, x, n, p in elems:
            if p is None:
                raise ParseError(line, col, "pmts elements need a weight p@")
            ms[(p, a, x)] = ms.get((p, a, x), 0) + n
        return M1Bundle(Multiset(ms))
    ms = {}
    for a, x, n, _ in elems:
        ms[(a, x)] = ms.get((a, x), 0) + n
    return MsBundle(Multiset(ms))


def parse_order(text: str) -> Extensional:
    """Extensional order file.  Reflexive pairs are implicit; the listed
    pairs must already be transitive."""
    kind = None
    pairs = []
    for no, toks in _content_lines(text):
        if kind is None:
            if toks[0].text != "order" or len(toks) != 2 or toks[1].text not in KINDS:
                raise ParseError(no, toks[0].col, "expected 'order <kind>'")
            kind = toks[1].text
            continue
        if toks[0].text != "le" or len(toks) != 3:
            raise ParseError(no, toks[0].col, "expected 'le <bundle> <bundle>'")
        pairs.append((parse_bundle(toks[1].text, kind, no, toks[1].col),
                      parse_bundle(toks[2].text, kind, no, toks[2].col)))
    if kind is None:
        raise ParseError(1, 1, "missing 'order <kind>' header")
    universe = {u for u, _ in pairs} | {v for _, v in pairs}
    return Extensional(kind, frozenset(pairs) | {(u, u) for u in universe}, frozenset(universe))
