"""Natural transformations between the functors and what they induce.

Three transformations are provided, each selected by an *alpha kind*:

``support``  multiset bundles -> set bundles (forget multiplicities)
``dm``       pmts bundles -> distributions, (a,x) |-> sum of n*p over (p,a,x)
``dma``      alternating: ``support`` at nondet states, ``dm`` at prob states
"""
from __future__ import annotations

import itertools
import os
from collections.abc import Iterable, Iterator
from fractions import Fraction

from .model import (
    Bundle,
    DistBundle,
    KindMismatch,
    M1Bundle,
    MsBundle,
    Multiset,
    SetBundle,
    System,
    make_system,
    sort_key,
)

ALPHA_KINDS = ("support", "dm", "dma")
DOMAIN = {"support": "mts", "dm": "pmts", "dma": "alt-mts"}
CODOMAIN = {"support": "lts", "dm": "dts", "dma": "alt-gts"}
_REPRESENTS = {v: k for k, v in CODOMAIN.items()}


def representation_kind(kind: str) -> str:
    """System kind of the F-representations of a ``kind`` system."""
    if kind not in _REPRESENTS:
        raise KindMismatch(f"{kind} is not the codomain of a natural transformation")
    return DOMAIN[_REPRESENTS[kind]]


DEFAULT_MAX_ENUM = 10_000


class EnumerationCapExceeded(RuntimeError):
    pass


def alpha_for(kind: str) -> str:
    """The alpha kind whose domain or codomain is the system kind ``kind``."""
    for alpha in ALPHA_KINDS:
        if kind in (DOMAIN[alpha], CODOMAIN[alpha]):
            return alpha
    raise KindMismatch(f"no natural transformation touches {kind!r}")


def _check_alpha(alpha: str) -> None:
    if alpha not in ALPHA_KINDS:
        raise KindMismatch(f"unknown alpha kind {alpha!r}")


def _support(b: MsBundle) -> SetBundle:
    return SetBundle(b.ms.support())


def _dm(b: M1Bundle) -> DistBundle:
    mass: dict = {}
    for (p, a, x), n in b.ms.items():
        mass[(a, x)] = mass.get((a, x), Fraction(0)) + n * p
    return DistBundle(mass)


def alpha_bundle(alpha: str, b: Bundle) -> Bundle:
    _check_alpha(alpha)
    if alpha in ("support", "dma") and isinstance(b, MsBundle):
        return _support(b)
    if alpha in ("dm", "dma") and isinstance(b, M1Bundle):
        return _dm(b)
    raise KindMismatch(f"{alpha} is not defined on {type(b).__name__}")


def alpha_image(alpha: str, sys: System) -> System:
    _check_alpha(alpha)
    if sys.kind != DOMAIN[alpha]:
        raise KindMismatch(f"{alpha} expects a {DOMAIN[alpha]} system, got {sys.kind}")
    steps = {x: alpha_bundle(alpha, sys.step(x)) for x in sys.states}
    return make_system(sys.name, CODOMAIN[alpha], sys.states, steps, sys.labels)


def canonical_bundle(b: Bundle) -> Bundle:
    """Count-1 preimage of a set or distribution bundle."""
    if isinstance(b, SetBundle):
        return MsBundle(Multiset({e: 1 for e in b.elems}))
    if isinstance(b, DistBundle):
        return M1Bundle(Multiset({(p, a, x): 1 for (a, x), p in b.dist.items()}))
    raise KindMismatch(f"no canonical representation for {type(b).__name__}")


def canonical_representation(sys: System) -> System:
    if sys.kind not in _REPRESENTS:
        raise KindMismatch(f"{sys.kind} is not the codomain of a natural transformation")
    alpha = _REPRESENTS[sys.kind]
    steps = {x: canonical_bundle(sys.step(x)) for x in sys.states}
    return make_system(sys.name, DOMAIN[alpha], sys.states, steps, sys.labels)


def _element_options(b: Bundle, bound: int) -> list[list[tuple]]:
    """Per G-element, the (F-element, count) choices for multiplicity 1..bound."""
    if isinstance(b, SetBundle):
        return [[(e, m) for m in range(1, bound + 1)] for e in sorted(b.elems, key=sort_key)]
    if isinstance(b, DistBundle):
        return [
            [((q / m, a, x), m) for m in range(1, bound + 1)]
            for (a, x), q in sorted(b.dist.items(), key=lambda t: sort_key(t[0]))
        ]
    raise KindMismatch(f"cannot represent {type(b).__name__}")


def bundle_representations(b: Bundle, bound: int) -> Iterator[Bundle]:
    """Preimages of ``b`` realising each element with multiplicity at most ``bound``.

    Distribution elements of mass q are split into m equal parts q/m.
    Unequal splits are not produced.
    """
    if bound < 1:
        raise ValueError("bound must be >= 1")
    wrap = MsBundle if isinstance(b, SetBundle) else M1Bundle
    for choice in itertools.product(*_element_options(b, bound)):
        yield wrap(Multiset(dict(choice)))


def count_representations(sys: System, bound: int) -> int:
    n = 1
    for x in sys.states:
        n *= bound ** len(sys.step(x))
    return n


def max_enum_default() -> int:
    try:
        return int(os.environ.get("COALG_MAX_ENUM", DEFAULT_MAX_ENUM))
    except ValueError:
        return DEFAULT_MAX_ENUM


def enumerate_representations(sys: System, bound: int, cap: int | None = None) -> list[System]:
    if sys.kind not in _REPRESENTS:
        raise KindMismatch(f"{sys.kind} is not the codomain of a natural transformation")
    if bound < 1:
        raise ValueError("bound must be >= 1")
    cap = max_enum_default() if cap is None else cap
    total = count_representations(sys, bound)
    if total > cap:
        raise EnumerationCapExceeded(f"{total} representations exceed the cap of {cap}")
    kind = DOMAIN[_REPRESENTS[sys.kind]]
    per_state = [list(bundle_representations(sys.step(x), bound)) for x in sys.states]
    return [
        make_system(sys.name, kind, sys.states, dict(zip(sys.states, combo)), sys.labels)
        for combo in itertools.product(*per_state)
    ]


def kernel_related(alpha: str, u: Bundle, v: Bundle) -> bool:
    return alpha_bundle(alpha, u) == alpha_bundle(alpha, v)


def quotient_classes(alpha: str, elements: Iterable[Bundle]) -> dict[Bundle, frozenset]:
    """Group ``elements`` by alpha-image; keys are the class representatives."""
    groups: dict = {}
    for e in elements:
        groups.setdefault(alpha_bundle(alpha, e), set()).add(e)
    return {k: frozenset(v) for k, v in groups.items()}
