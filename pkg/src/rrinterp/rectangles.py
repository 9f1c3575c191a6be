"""Rectangle covers of the bad set and the pruning that restores a KW protocol.

For a clause D the pairs ``(u, v)`` whose ``w(u, v)`` falsifies D form a
combinatorial rectangle: the q-literals of D only look at ``q^u`` and the p-
and r-literals only at ``(v, r^v)``.  Deleting one side of every rectangle
(the smaller one relative to its universe) leaves ``U' x V'`` free of bad
pairs, on which the protocol never answers bottom.

All measures are exact ``Fraction``s; square roots are compared in squared
form.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from decimal import Decimal, getcontext
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from .formulas import Graph, VarSpace, all_graphs, falsifies, is_in_U, is_in_V
from .interpolation import GameContext, KWProtocol, run_protocol
from .random_resolution import RandomRefutationDistribution

SCHEMA_VERSION = 1


class Universe:
    """U and V at desk scale with their fixed (lexicographically first) witnesses."""

    def __init__(self, vs: VarSpace):
        self.vs = vs
        self.U: list[Graph] = []
        self.V: list[Graph] = []
        self.qwit, self.rwit = {}, {}
        self.qbits, self.vrbits = {}, {}
        for g in all_graphs(vs.n):
            qw = is_in_U(g, vs)
            if qw is not None:
                self.U.append(g)
                self.qwit[g] = qw
                self.qbits[g] = qw.q_bits(vs)
            rw = is_in_V(g, vs)
            if rw is not None:
                self.V.append(g)
                self.rwit[g] = rw
                self.vrbits[g] = g.bits | rw.r_bits(vs)

    def w(self, u: Graph, v: Graph) -> int:
        return self.vrbits[v] | self.qbits[u]

    def context(self, u: Graph, v: Graph) -> GameContext:
        return GameContext(self.vs, u, v, self.qwit[u], self.rwit[v], self.w(u, v))


@dataclass(frozen=True)
class Rectangle:
    u_side: frozenset
    v_side: frozenset
    clause: frozenset = frozenset()

    def __contains__(self, pair) -> bool:
        u, v = pair
        return u in self.u_side and v in self.v_side

    def pairs(self) -> set:
        return {(u, v) for u in self.u_side for v in self.v_side}

    @property
    def size(self) -> int:
        return len(self.u_side) * len(self.v_side)


def clause_rectangle(D: Iterable[int], universe: Universe) -> Rectangle:
    D = frozenset(D)
    vs = universe.vs
    q_lits = [l for l in D if vs.block_of(l) == "q"]
    pr_lits = [l for l in D if vs.block_of(l) != "q"]
    u_side = frozenset(u for u in universe.U if falsifies(universe.qbits[u], q_lits))
    v_side = frozenset(v for v in universe.V if falsifies(universe.vrbits[v], pr_lits))
    return Rectangle(u_side, v_side, D)


def bad_set(delta: Iterable[Iterable[int]], universe: Universe) -> set:
    """Union of the clause rectangles of ``delta``."""
    out = set()
    for D in delta:
        out |= clause_rectangle(D, universe).pairs()
    return out


def bad_set_direct(delta: Iterable[Iterable[int]], universe: Universe) -> set:
    """Pairs whose ``w(u, v)`` falsifies a clause of ``delta``, by direct scan."""
    delta = [frozenset(c) for c in delta]
    return {(u, v) for u in universe.U for v in universe.V
            if any(falsifies(universe.w(u, v), D) for D in delta)}


@dataclass
class BestSample:
    index: int
    fraction: Fraction
    fractions: list
    average: Fraction


def best_sample(d: RandomRefutationDistribution, universe: Universe) -> BestSample:
    """The sample with the smallest bad fraction (lowest index on ties)."""
    total = len(universe.U) * len(universe.V)
    if not d.samples:
        raise ValueError("empty distribution")
    fracs = []
    for s in d.samples:
        bad = len(bad_set(s.delta, universe))
        fracs.append(Fraction(bad, total) if total else Fraction(0))
    idx = min(range(len(fracs)), key=lambda i: (fracs[i], i))
    avg = sum((s.weight * f for s, f in zip(d.samples, fracs)), Fraction(0))
    return BestSample(idx, fracs[idx], fracs, avg)


# -- exact square-root comparisons -----------------------------------------------

def le_sqrt(a: Fraction, b: Fraction) -> bool:
    """``a <= sqrt(b)`` for ``b >= 0``."""
    return a <= 0 or a * a <= b


def ge_one_minus_c_sqrt(m: Fraction, c: Fraction, b: Fraction) -> bool:
    """``m >= 1 - c*sqrt(b)`` for ``c, b >= 0``."""
    gap = 1 - m
    return gap <= 0 or c * c * b >= gap * gap


def dec_sqrt(x: Fraction) -> Decimal:
    getcontext().prec = 40
    return (Decimal(x.numerator) / Decimal(x.denominator)).sqrt()


def render(x) -> str:
    if isinstance(x, Fraction):
        x = Decimal(x.numerator) / Decimal(x.denominator)
    return format(x.quantize(Decimal("1e-12")).normalize(), "f")


# -- pruning ----------------------------------------------------------------------

@dataclass(frozen=True)
class Deletion:
    index: int
    side: str
    mu: Fraction
    u_size: int
    v_size: int
    removed: int

    def to_dict(self) -> dict:
        return {"index": self.index, "side": self.side, "mu": str(self.mu),
                "u_size": self.u_size, "v_size": self.v_size, "removed": self.removed}


@dataclass
class PruneResult:
    u_prime: list
    v_prime: list
    deletions: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {"u_prime": [str(g) for g in self.u_prime], "v_prime": [str(g) for g in self.v_prime],
                "deletions": [x.to_dict() for x in self.deletions]}


def prune(rects: Sequence[Rectangle], U: Sequence[Graph], V: Sequence[Graph]) -> PruneResult:
    """Delete the U-side of rectangle i if ``|U_i| <= mu_i^(1/2) |U|``, else its V-side.

    ``mu_i = |U_i||V_i| / (|U||V|)``; the measure and both thresholds always
    refer to the original ``U`` and ``V``.  Rectangles are processed in order.
    """
    Uset, Vset = set(U), set(V)
    nu, nv = len(U), len(V)
    u_del, v_del = set(), set()
    deletions = []
    for i, r in enumerate(rects):
        if not (r.u_side <= Uset and r.v_side <= Vset):
            raise ValueError(f"rectangle {i} is not contained in U x V")
        a, b = len(r.u_side), len(r.v_side)
        mu = Fraction(a * b, nu * nv) if nu and nv else Fraction(0)
        # |U_i| <= sqrt(mu) |U|  <=>  |U_i|^2 <= mu |U|^2
        if Fraction(a) ** 2 <= mu * nu * nu:
            removed = len(r.u_side - u_del)
            u_del |= r.u_side
            side = "U"
        else:
            removed = len(r.v_side - v_del)
            v_del |= r.v_side
            side = "V"
        deletions.append(Deletion(i, side, mu, a, b, removed))
    return PruneResult([u for u in U if u not in u_del], [v for v in V if v not in v_del], deletions)


def prune_checks(result: PruneResult, rects: Sequence[Rectangle], U: Sequence[Graph],
                 V: Sequence[Graph]) -> dict:
    """Exact verification of the pruning guarantees; every value must be True."""
    nu, nv = len(U), len(V)
    up, vp = set(result.u_prime), set(result.v_prime)
    disjoint = all(not (r.u_side & up and r.v_side & vp) for r in rects)
    claim2 = per_term = True
    if nu and nv:
        claim2 = all(le_sqrt(Fraction(len(r.u_side), nu), x.mu) or le_sqrt(Fraction(len(r.v_side), nv), x.mu)
                     for r, x in zip(rects, result.deletions))
        # the deleted side of each rectangle has relative size <= sqrt(mu_i)
        per_term = all(le_sqrt(Fraction(x.u_size, nu) if x.side == "U" else Fraction(x.v_size, nv), x.mu)
                       for x in result.deletions)
    u_union = nu - len(up) <= sum(x.u_size for x in result.deletions if x.side == "U")
    v_union = nv - len(vp) <= sum(x.v_size for x in result.deletions if x.side == "V")
    return {"subsets": up <= set(U) and vp <= set(V), "disjoint": disjoint, "claim2": claim2,
            "per_term_sqrt": per_term, "u_union_bound": u_union, "v_union_bound": v_union}


def restricted_kw_check(protocol: KWProtocol, u_prime: Iterable[Graph], v_prime: Iterable[Graph],
                        universe: Universe) -> Optional[tuple]:
    """Run the protocol on every pair of ``U' x V'``; return ``(u, v, result)``
    for the first pair not answered by a valid edge, or None."""
    v_prime = list(v_prime)
    for u in u_prime:
        for v in v_prime:
            res = run_protocol(protocol, universe.context(u, v))
            if res.edge is None or not (u.has_edge(*res.edge) and not v.has_edge(*res.edge)):
                return u, v, res
    return None


# -- report ---------------------------------------------------------------------

@dataclass
class BoundReport:
    k: int
    k_derived: int
    dmax: int
    delta_star: Fraction
    chosen_sample: int
    sample_delta_size: int
    distinct_rectangles: int
    min_bad_fraction: Fraction
    avg_bad_fraction: Fraction
    u_measure: Optional[Fraction]
    v_measure: Optional[Fraction]
    sum_sqrt_mu: Decimal
    factor1: Optional[Decimal]
    factor1_positive: bool
    d_delta_lt_1: bool
    factor2: str
    checks: dict
    degenerate: bool = False
    restricted_kw: Optional[str] = None

    @property
    def ok(self) -> bool:
        return all(v for v in self.checks.values() if v is not None)

    def to_dict(self) -> dict:
        def frac(x):
            return None if x is None else f"{x.numerator}/{x.denominator}"

        def dec(x):
            return None if x is None else render(x)

        return {
            "schema_version": SCHEMA_VERSION,
            "k": self.k,
            "k_derived": self.k_derived,
            "dmax": self.dmax,
            "delta_star": frac(self.delta_star),
            "delta_star_decimal": dec(self.delta_star),
            "chosen_sample": self.chosen_sample,
            "sample_delta_size": self.sample_delta_size,
            "distinct_rectangles": self.distinct_rectangles,
            "min_bad_fraction": frac(self.min_bad_fraction),
            "avg_bad_fraction": frac(self.avg_bad_fraction),
            "min_bad_fraction_strictly_below_delta": self.min_bad_fraction < self.delta_star,
            "u_measure": frac(self.u_measure),
            "v_measure": frac(self.v_measure),
            "u_measure_decimal": dec(self.u_measure),
            "v_measure_decimal": dec(self.v_measure),
            "sum_sqrt_mu": dec(self.sum_sqrt_mu),
            "factor_one_minus_d_sqrt_delta": dec(self.factor1),
            "factor_positive": self.factor1_positive,
            "d_delta_lt_1": self.d_delta_lt_1,
            "factor_half_inv_sqrt_delta": self.factor2,
            "checks": self.checks,
            "degenerate": self.degenerate,
            "restricted_kw": self.restricted_kw,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1, sort_keys=True) + "\n"


def bound_report(d: RandomRefutationDistribution, universe: Universe, best: BestSample,
                 rects: Sequence[Rectangle], result: PruneResult, delta_star: Fraction,
                 restricted: Optional[str] = None) -> BoundReport:
    """Assemble the bound quantities and decide the exact inequalities.

    The asymptotic factors are rendered only; constants hidden in the
    polynomial and the clique-coloring lower bound are not evaluated.
    """
    from .random_resolution import size_metrics
    from .resolution import num_derived

    k, dmax = size_metrics(d)
    k_der = max((num_derived(s.proof) for s in d.samples), default=0)
    nu, nv = len(universe.U), len(universe.V)
    degenerate = not (nu and nv and result.u_prime and result.v_prime)
    um = Fraction(len(result.u_prime), nu) if nu else None
    vm = Fraction(len(result.v_prime), nv) if nv else None
    sum_sqrt = sum((dec_sqrt(x.mu) for x in result.deletions), Decimal(0))
    sq = dec_sqrt(delta_star)
    factor1 = Decimal(1) - dmax * sq
    factor2 = "unbounded" if delta_star == 0 else render(Decimal(1) / (2 * sq))

    checks = {"min_fraction_le_delta": best.fraction <= delta_star,
              "average_le_delta": best.average <= delta_star,
              "min_le_average": best.fraction <= best.average}
    checks.update(prune_checks(result, rects, universe.U, universe.V))
    if nu and nv:
        # 1 - |U'|/|U| <= sum over U-deletions of |U_i|/|U| <= sum sqrt(mu_i): each term exact
        checks["u_measure_ge_1_minus_sum_sqrt_mu"] = checks["u_union_bound"] and checks["per_term_sqrt"]
        checks["v_measure_ge_1_minus_sum_sqrt_mu"] = checks["v_union_bound"] and checks["per_term_sqrt"]
        all_below = all(x.mu < delta_star for x in result.deletions)
        # d * sqrt(delta) < 1  <=>  d^2 delta < 1
        if all_below and dmax * dmax * delta_star < 1:
            checks["u_measure_ge_1_minus_d_sqrt_delta"] = ge_one_minus_c_sqrt(um, Fraction(dmax), delta_star)
            checks["v_measure_ge_1_minus_d_sqrt_delta"] = ge_one_minus_c_sqrt(vm, Fraction(dmax), delta_star)
        else:
            checks["u_measure_ge_1_minus_d_sqrt_delta"] = None
            checks["v_measure_ge_1_minus_d_sqrt_delta"] = None
    s = d.samples[best.index]
    distinct = len({(r.u_side, r.v_side) for r in rects if r.size})
    return BoundReport(
        k=k, k_derived=k_der, dmax=dmax, delta_star=delta_star, chosen_sample=best.index,
        sample_delta_size=len(s.delta), distinct_rectangles=distinct,
        min_bad_fraction=best.fraction, avg_bad_fraction=best.average, u_measure=um, v_measure=vm,
        sum_sqrt_mu=sum_sqrt, factor1=factor1, factor1_positive=dmax * dmax * delta_star < 1,
        d_delta_lt_1=dmax * delta_star < 1, factor2=factor2, checks=checks, degenerate=degenerate,
        restricted_kw=restricted)
