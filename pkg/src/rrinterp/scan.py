"""Exhaustive assignment scans over bit-packed assignments (numpy, chunked)."""

from __future__ import annotations

from typing import Iterable, Iterator, Optional, Sequence

import numpy as np

from .formulas import VarSpace, clause_masks, generate_clique_clauses, generate_color_clauses
from .resolution import ResourceLimitExceeded

CHUNK = 1 << 20


def clause_sat(values: np.ndarray, c: Iterable[int]) -> np.ndarray:
    """Boolean array: which of ``values`` (bit-packed assignments) satisfy ``c``."""
    pos, neg = clause_masks(c)
    out = np.zeros(values.shape, dtype=bool)
    if pos:
        out |= (values & np.uint64(pos)) != 0
    if neg:
        out |= (~values & np.uint64(neg)) != 0
    return out


def cnf_sat(values: np.ndarray, cnf: Iterable[Iterable[int]]) -> np.ndarray:
    out = np.ones(values.shape, dtype=bool)
    for c in cnf:
        out &= clause_sat(values, c)
        if not out.any():
            break
    return out


def spread(k: np.ndarray, positions: Sequence[int]) -> np.ndarray:
    """Deposit bit ``t`` of each ``k`` at bit ``positions[t]`` (0-based)."""
    out = np.zeros(k.shape, dtype=np.uint64)
    for t, pos in enumerate(positions):
        out |= ((k >> np.uint64(t)) & np.uint64(1)) << np.uint64(pos)
    return out


def enumerate_over(variables: Sequence[int], base: int = 0, chunk: int = CHUNK) -> Iterator[np.ndarray]:
    """All assignments to ``variables`` (DIMACS ids), OR-ed onto ``base``, in chunks."""
    positions = [v - 1 for v in variables]
    total = 1 << len(positions)
    for start in range(0, total, chunk):
        k = np.arange(start, min(total, start + chunk), dtype=np.uint64)
        yield spread(k, positions) | np.uint64(base)


def find_model(cnf: Sequence[Iterable[int]], num_vars: int, budget: int = 1 << 26) -> Optional[int]:
    """First satisfying assignment (as bits) by brute force, or None."""
    if (1 << num_vars) > budget:
        raise ResourceLimitExceeded(f"2^{num_vars} assignments exceed the budget {budget}")
    for values in enumerate_over(range(1, num_vars + 1)):
        sat = cnf_sat(values, cnf)
        if sat.any():
            return int(values[np.argmax(sat)])
    return None


def restrict(cnf: Iterable[Iterable[int]], bits: int, mask: int) -> Optional[list]:
    """Clauses left after fixing the variables in ``mask`` to ``bits``.

    Satisfied clauses are dropped and falsified literals removed; returns None
    if some clause becomes empty.
    """
    out = []
    for c in cnf:
        rest = []
        sat = False
        for lit in c:
            b = 1 << (abs(lit) - 1)
            if mask & b:
                if bool(bits & b) == (lit > 0):
                    sat = True
                    break
            else:
                rest.append(lit)
        if sat:
            continue
        if not rest:
            return None
        out.append(rest)
    return out


def block_models(cnf: Iterable[Iterable[int]], vs: VarSpace, block: str, p_bits: int) -> np.ndarray:
    """All assignments to ``block`` (in full-assignment bit layout) that,
    together with the p-part ``p_bits``, satisfy ``cnf``.  ``cnf`` may only use
    p-variables and variables of ``block``."""
    reduced = restrict(cnf, p_bits, vs.block_mask("p"))
    if reduced is None:
        return np.zeros(0, dtype=np.uint64)
    parts = []
    for values in enumerate_over(vs.block_vars(block)):
        parts.append(values[cnf_sat(values, reduced)])
    return np.concatenate(parts) if parts else np.zeros(0, dtype=np.uint64)


def family_scan(vs: VarSpace, budget: int = 1 << 26) -> dict:
    """Exhaustive satisfiability scan of the clique-coloring family.

    Clique clauses mention only p and q, color clauses only p and r, so a total
    assignment satisfies the family iff for its p-part both the q-restricted
    clique side and the r-restricted color side are satisfiable.  Scanning every
    p-part against every q-part and every r-part therefore covers all
    ``2^(P+Q+R)`` total assignments with ``2^P * (2^Q + 2^R)`` evaluations.

    Returns per-graph side satisfiability, the number of evaluations and the
    list of satisfying total assignments (empty iff unsatisfiable).
    """
    P = vs.num_p
    evals = (1 << P) * ((1 << vs.num_q) + (1 << vs.num_r))
    if evals > budget:
        raise ResourceLimitExceeded(f"{evals} evaluations exceed the budget {budget}")
    clique = generate_clique_clauses(vs)
    color = generate_color_clauses(vs)
    clique_sat = {}
    color_sat = {}
    models = []
    for a in range(1 << P):
        qs = block_models(clique, vs, "q", a)
        rs = block_models(color, vs, "r", a)
        clique_sat[a] = len(qs) > 0
        color_sat[a] = len(rs) > 0
        if len(qs) and len(rs):
            models.append(a | int(qs[0]) | int(rs[0]))
    return {"clique_sat": clique_sat, "color_sat": color_sat, "evaluations": evals, "models": models}
