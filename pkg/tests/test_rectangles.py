from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from rrinterp import corpus
from rrinterp.formulas import Graph, VarSpace
from rrinterp.interpolation import build_protocol
from rrinterp.random_resolution import delta_of
from rrinterp.rectangles import (Rectangle, Universe, bad_set, bad_set_direct, best_sample, bound_report,
                                 clause_rectangle, ge_one_minus_c_sqrt, le_sqrt, prune, prune_checks,
                                 restricted_kw_check)

VS = VarSpace(3, 2, 1)
UNI = Universe(VS)


def graphs(k):
    return [Graph(3, b) for b in range(k)]


def test_universe_sizes():
    assert (len(UNI.U), len(UNI.V)) == (7, 1)
    uni = Universe(VarSpace(4, 3, 2))
    # on four vertices the only odd cycle is a triangle, so U and V partition all 64 graphs
    assert len(uni.U) + len(uni.V) == 64


def test_clause_rectangle_q_and_p():
    D = {-VS.q(1, 1), VS.p(1, 3)}
    r = clause_rectangle(D, UNI)
    # the first clique of any graph containing edge 12 or 13 starts at vertex 1
    assert len(r.u_side) == 6
    assert r.v_side == frozenset(UNI.V)
    assert r.pairs() == bad_set_direct([D], UNI)


def test_clause_rectangle_empty_sides():
    assert clause_rectangle({-VS.p(1, 2)}, UNI).size == 0
    assert clause_rectangle({VS.q(1, 1), VS.q(1, 2), VS.q(1, 3)}, UNI).size == 0
    full = clause_rectangle(set(), UNI)
    assert full.size == 7


def test_bad_set_union():
    delta = [{VS.p(1, 2)}, {-VS.q(2, 3)}]
    assert bad_set(delta, UNI) == bad_set_direct(delta, UNI)
    assert len(bad_set(delta, UNI)) == 7
    assert bad_set([], UNI) == set()


def test_best_sample_p_not_p():
    d = corpus.p_not_p_distribution(VS)
    best = best_sample(d, UNI)
    assert best.fractions == [1, 0]
    assert best.index == 1 and best.fraction == 0
    assert best.average == Fraction(1, 2)


def test_best_sample_average_arithmetic():
    vs = VarSpace(4, 3, 2)
    uni = Universe(vs)
    d = corpus.make_distribution(vs, [[{vs.p(1, 2)}], [{-vs.q(1, 1)}]], [Fraction(1, 4), Fraction(3, 4)])
    best = best_sample(d, uni)
    total = len(uni.U) * len(uni.V)
    f0 = Fraction(len(bad_set_direct([{vs.p(1, 2)}], uni)), total)
    f1 = Fraction(len(bad_set_direct([{-vs.q(1, 1)}], uni)), total)
    assert best.fractions == [f0, f1]
    assert best.average == f0 / 4 + 3 * f1 / 4
    assert best.fraction == min(f0, f1) <= best.average


def test_prune_thin_rectangle():
    U, V = graphs(4), graphs(4)
    r = Rectangle(frozenset(U[:1]), frozenset(V))
    res = prune([r], U, V)
    (x,) = res.deletions
    assert x.mu == Fraction(1, 4) and x.side == "U"
    assert res.u_prime == U[1:] and res.v_prime == V
    assert all(prune_checks(res, [r], U, V).values())


def test_prune_no_rectangles():
    U, V = graphs(4), graphs(2)
    res = prune([], U, V)
    assert (res.u_prime, res.v_prime, res.deletions) == (U, V, [])


def test_prune_full_rectangle_ties_go_to_u():
    U, V = graphs(4), graphs(4)
    res = prune([Rectangle(frozenset(U), frozenset(V))], U, V)
    assert res.deletions[0].side == "U" and res.deletions[0].mu == 1
    assert res.u_prime == [] and res.v_prime == V


def test_prune_rejects_foreign_rectangle():
    with pytest.raises(ValueError):
        prune([Rectangle(frozenset(graphs(3)), frozenset())], graphs(2), graphs(2))


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 8), st.integers(1, 8), st.lists(st.tuples(st.integers(0, 255), st.integers(0, 255)),
                                                     max_size=5))
def test_prune_random_rectangles(nu, nv, masks):
    U, V = graphs(nu), graphs(nv)
    rects = [Rectangle(frozenset(u for k, u in enumerate(U) if a >> k & 1),
                       frozenset(v for k, v in enumerate(V) if b >> k & 1)) for a, b in masks]
    res = prune(rects, U, V)
    assert all(prune_checks(res, rects, U, V).values())
    for r in rects:
        assert not (r.pairs() & {(u, v) for u in res.u_prime for v in res.v_prime})


def test_sqrt_comparisons():
    assert le_sqrt(Fraction(1, 2), Fraction(1, 4))
    assert not le_sqrt(Fraction(1, 2), Fraction(1, 5))
    assert le_sqrt(Fraction(-1), Fraction(0))
    # 3/4 >= 1 - 1*sqrt(1/16) = 3/4
    assert ge_one_minus_c_sqrt(Fraction(3, 4), Fraction(1), Fraction(1, 16))
    assert not ge_one_minus_c_sqrt(Fraction(1, 2), Fraction(1), Fraction(1, 16))


def _pipeline(d, uni):
    best = best_sample(d, uni)
    s = d.samples[best.index]
    rects = [clause_rectangle(D, uni) for D in s.delta]
    res = prune(rects, uni.U, uni.V)
    protocol = build_protocol(s.proof, d.vs, s.delta)
    ce = restricted_kw_check(protocol, res.u_prime, res.v_prime, uni)
    return best, rects, res, ce


def test_p_not_p_report():
    d = corpus.p_not_p_distribution(VS)
    best, rects, res, ce = _pipeline(d, UNI)
    assert ce is None
    rep = bound_report(d, UNI, best, rects, res, delta_of(d).value, "ok")
    assert rep.ok and not rep.degenerate
    assert rep.delta_star == Fraction(1, 2)
    # d = 1 and sqrt(1/2) < 1, every mu is 0 < 1/2
    assert rep.checks["u_measure_ge_1_minus_d_sqrt_delta"] is True
    assert rep.to_dict()["factor_half_inv_sqrt_delta"] == rep.factor2


def test_report_with_zero_delta_star():
    d = corpus.make_distribution(VS, [[]], [Fraction(1)])
    best, rects, res, ce = _pipeline(d, UNI)
    rep = bound_report(d, UNI, best, rects, res, delta_of(d).value)
    assert rep.factor2 == "unbounded"
    assert rep.ok and rep.dmax == 0
    assert rep.u_measure == 1 and rep.v_measure == 1


def test_report_flags_large_d_sqrt_delta():
    p, q = VS.p(1, 2), VS.p(1, 3)
    d = corpus.make_distribution(VS, [[{p}, {q}]], [Fraction(1)])
    best, rects, res, ce = _pipeline(d, UNI)
    rep = bound_report(d, UNI, best, rects, res, delta_of(d).value)
    assert rep.delta_star == 1 and rep.dmax == 2
    assert not rep.factor1_positive
    assert rep.checks["u_measure_ge_1_minus_d_sqrt_delta"] is None
    assert rep.ok


def test_restricted_check_finds_bottom_on_unpruned_pairs():
    p = VS.p(1, 2)
    d = corpus.make_distribution(VS, [[{p}]], [Fraction(1)])
    s = d.samples[0]
    protocol = build_protocol(s.proof, VS, s.delta)
    if not any(st_.clause == frozenset({p}) for st_ in s.proof.axioms()):
        pytest.skip("the refutation does not use the Delta clause")
    ce = restricted_kw_check(protocol, UNI.U, UNI.V, UNI)
    assert ce is not None and ce[2].is_bottom
    _, rects, res, ce = _pipeline(d, UNI)
    assert ce is None and (res.u_prime == [] or res.v_prime == [])
