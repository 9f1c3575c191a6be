"""Seeded random Delta sets and refutation distributions for experiments."""

from __future__ import annotations

from fractions import Fraction
from typing import Iterator, Optional, Sequence

import numpy as np

from .formulas import VarSpace, generate_family
from .random_resolution import RandomRefutationDistribution, Sample
from .resolution import ResolutionProof, saturation_refute

# (omega, xi) pairs used for corpus instances at each n
CORPUS_PARAMS = [(3, 2, 1), (3, 3, 1), (3, 3, 2), (4, 2, 1), (4, 3, 1), (4, 3, 2)]


def random_clause(vs: VarSpace, rng: np.random.Generator, max_width: int = 3) -> frozenset:
    width = int(rng.integers(1, max_width + 1))
    vars_ = rng.choice(vs.num_vars, size=min(width, vs.num_vars), replace=False) + 1
    signs = rng.integers(0, 2, size=len(vars_))
    return frozenset(int(v) if s else -int(v) for v, s in zip(vars_, signs))


def random_delta(vs: VarSpace, rng: np.random.Generator, max_clauses: int = 2,
                 max_width: int = 3) -> tuple:
    count = int(rng.integers(0, max_clauses + 1))
    out = []
    for _ in range(count):
        c = random_clause(vs, rng, max_width)
        if c not in out:
            out.append(c)
    return tuple(out)


def random_weights(rng: np.random.Generator, m: int) -> list[Fraction]:
    raw = [int(x) for x in rng.integers(1, 10, size=m)]
    total = sum(raw)
    return [Fraction(x, total) for x in raw]


def refute_with_delta(vs: VarSpace, delta: Sequence[frozenset]) -> ResolutionProof:
    """Davis-Putnam refutation of ``Clique ∪ Color ∪ delta``."""
    proof = saturation_refute(generate_family(vs) + tuple(delta), vs)
    if not isinstance(proof, ResolutionProof):
        raise AssertionError("the clique-coloring family is unsatisfiable")
    return proof


def make_distribution(vs: VarSpace, deltas: Sequence[Sequence[frozenset]],
                      weights: Sequence[Fraction]) -> RandomRefutationDistribution:
    samples = [Sample(Fraction(w), tuple(frozenset(c) for c in dl), refute_with_delta(vs, dl))
               for w, dl in zip(weights, deltas)]
    return RandomRefutationDistribution(vs, generate_family(vs), samples)


def random_distribution(vs: VarSpace, rng: np.random.Generator, max_samples: int = 3,
                        max_clauses: int = 2, max_width: int = 3) -> RandomRefutationDistribution:
    m = int(rng.integers(1, max_samples + 1))
    deltas = [random_delta(vs, rng, max_clauses, max_width) for _ in range(m)]
    return make_distribution(vs, deltas, random_weights(rng, m))


def corpus(seed: int, count: int = 100,
           params: Optional[Sequence[tuple]] = None) -> Iterator[tuple[int, RandomRefutationDistribution]]:
    """``count`` instances cycling through ``params``; instance ``i`` draws from
    its own child of ``SeedSequence(seed)``."""
    params = list(params or CORPUS_PARAMS)
    children = np.random.SeedSequence(seed).spawn(count)
    for i, child in enumerate(children):
        n, w, x = params[i % len(params)]
        yield i, random_distribution(VarSpace(n, w, x), np.random.default_rng(child))


def p_not_p_distribution(vs: Optional[VarSpace] = None) -> RandomRefutationDistribution:
    """Two samples of weight 1/2 with Delta = {{p12}} and {{~p12}}."""
    vs = vs or VarSpace(3, 2, 1)
    p = vs.p(1, 2)
    return make_distribution(vs, [[frozenset({p})], [frozenset({-p})]], [Fraction(1, 2)] * 2)
