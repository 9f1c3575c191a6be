import pytest

from rrinterp.formulas import (Graph, VarSpace, all_graphs, generate_color_clauses, generate_family, is_in_U,
                               is_in_V)
from rrinterp.interpolation import (DELTA, Gate, GameContext, InterpolationError, ProtocolError, build_protocol,
                                    check_clause_invariant, check_monotone, comm_cost, consistency,
                                    eval_circuit, extract_circuit, format_circuit, parse_circuit, run_protocol,
                                    separation_report, strategy_step, tag_axioms, truth_tables)
from rrinterp.resolution import ProofStep, ResolutionProof, check_refutation, saturation_refute

# two vertices, one pair variable; enough room for hand-made A/B splits
VS2 = VarSpace(2, 1, 1, checked=False)
P = VS2.p(1, 2)
Q = VS2.q(1, 1)
R = VS2.r(1, 1)


def proof(*steps):
    return ResolutionProof([ProofStep(i, frozenset(c), tuple(par)) for i, c, par in steps])


def table_of(circuit):
    return truth_tables(circuit)[circuit.output]


def test_interpolant_single_variable():
    pr = proof((1, {P}, ()), (2, {-P}, ()), (3, set(), (1, 2)))
    c = extract_circuit(pr, VS2, [{P}], [{-P}])
    assert check_monotone(c)
    # bit a of the table is the output on graph a; graph 1 has the edge
    assert table_of(c) == 0b10


def test_interpolant_through_q_pivot():
    pr = proof((1, {Q}, ()), (2, {-Q, P}, ()), (3, {P}, (1, 2)), (4, {-P}, ()), (5, set(), (3, 4)))
    A, B = [{Q}, {-Q, P}], [{-P}]
    assert check_refutation(pr, A + B).ok
    c = extract_circuit(pr, VS2, A, B)
    assert table_of(c) == 0b10
    assert len(c) <= 3 * 5


def test_interpolant_through_r_pivot():
    pr = proof((1, {P}, ()), (2, {-P, R}, ()), (3, {-P, -R}, ()), (4, {-P}, (2, 3)), (5, set(), (1, 4)))
    c = extract_circuit(pr, VS2, [{P}], [{-P, R}, {-P, -R}])
    assert [g.kind for g in c.gates].count("AND") == 2
    assert table_of(c) == 0b10


def test_extraction_rejects_bad_split():
    pr = proof((1, {P}, ()), (2, {-P}, ()), (3, set(), (1, 2)))
    with pytest.raises(InterpolationError):
        extract_circuit(pr, VS2, [{-P}], [{P}])
    with pytest.raises(InterpolationError):
        extract_circuit(pr, VS2, [{P}], [{-P}], delta=[{P}])


def test_family_interpolant_n3(family_proofs):
    vs, _, pr = family_proofs[(3, 2, 1)]
    c = extract_circuit(pr, vs)
    rep = separation_report(c, vs)
    assert rep.ok
    assert (rep.u_ones, rep.u_total, rep.v_zeros, rep.v_total) == (7, 7, 1, 1)
    assert len(c) <= 3 * len(pr.steps)
    for g in all_graphs(3):
        assert eval_circuit(c, g) == table_of(c) >> g.bits & 1


def test_circuit_file_round_trip(family_proofs):
    vs, _, pr = family_proofs[(3, 3, 2)]
    c = extract_circuit(pr, vs)
    text = format_circuit(c)
    back = parse_circuit(text, vs.n)
    assert back == c
    assert format_circuit(back) == text


@pytest.mark.parametrize("text", ["g0 = CONST 2\noutput g0\n", "g0 = AND g0 g1\n", "g1 = CONST 0\noutput g1\n"])
def test_circuit_parse_errors(text):
    with pytest.raises(ValueError):
        parse_circuit(text, 3)


def test_check_monotone_rejects_forward_reference():
    c = parse_circuit("g0 = CONST 1\ng1 = OR g0 g0\noutput g1\n", 3)
    assert check_monotone(c)
    assert not check_monotone(c.replace(1, Gate("OR", (0, 2))))
    assert not check_monotone(c.replace(0, Gate("INPUT", (2, 2))))


def test_invariant_holds_and_corruption_is_caught(family_proofs):
    vs, _, pr = family_proofs[(3, 2, 1)]
    c = extract_circuit(pr, vs)
    assert check_clause_invariant(pr, vs, c).ok
    color = set(generate_color_clauses(vs))
    b_axiom = next(s for s in pr.axioms() if s.clause in color)
    bad = c.replace(c.step_gates[b_axiom.id], Gate("CONST0"))
    assert not check_clause_invariant(pr, vs, bad).ok


def test_protocol_single_edge():
    vs = VarSpace(3, 2, 1)
    pr = saturation_refute(generate_family(vs), vs)
    protocol = build_protocol(pr, vs)
    assert protocol.size == len(pr.steps) + 3
    u, v = Graph.from_edges(3, [(1, 2)]), Graph(3, 0)
    ctx = GameContext.make(u, v, vs)
    assert consistency(protocol, protocol.root, ctx)
    res = run_protocol(protocol, ctx)
    assert res.edge == (1, 2)
    assert res.trace[0] == protocol.root and res.trace[-1] == protocol.leaf(1, 2)
    for a, b in zip(res.trace, res.trace[1:]):
        assert strategy_step(protocol, a, ctx) == b
        assert b in protocol.successors(a)


def test_context_requires_witnesses():
    vs = VarSpace(3, 2, 1)
    with pytest.raises(ValueError):
        GameContext.make(Graph(3, 0), Graph(3, 0), vs)
    with pytest.raises(ValueError):
        GameContext.make(Graph(3, 1), Graph(3, 1), vs)


def test_explicit_delta_tag_routes_to_bottom():
    vs = VarSpace(3, 2, 1)
    pr = saturation_refute(generate_family(vs), vs)
    u, v = Graph.from_edges(3, [(1, 2)]), Graph(3, 0)
    plain = build_protocol(pr, vs)
    ctx = GameContext.make(u, v, vs)
    last = plain.step_of(run_protocol(plain, ctx).trace[-2])
    assert last.is_axiom and plain.tags[last.id] == 3
    # the same clause, declared a Delta clause by tag
    tagged = build_protocol(pr, vs, [last.clause], tags={last.id: DELTA})
    res = run_protocol(tagged, ctx)
    assert res.is_bottom and res.trace[-1] == tagged.bottom
    # without the tag family membership wins
    assert build_protocol(pr, vs, [last.clause]).tags[last.id] == 3


def test_tag_validation():
    vs = VarSpace(3, 2, 1)
    pr = saturation_refute(generate_family(vs), vs)
    ax = pr.axioms()[0]
    with pytest.raises(InterpolationError):
        tag_axioms(pr, vs, [], {ax.id: DELTA})
    with pytest.raises(InterpolationError):
        tag_axioms(pr, vs, [], {ax.id: 99})


def test_unit_delta_reaches_bottom_or_edge():
    vs = VarSpace(3, 2, 1)
    p = vs.p(1, 2)
    pr = saturation_refute(generate_family(vs) + (frozenset({p}),), vs)
    protocol = build_protocol(pr, vs, [{p}])
    for u in all_graphs(3):
        if is_in_U(u, vs) is None:
            continue
        ctx = GameContext.make(u, Graph(3, 0), vs)
        res = run_protocol(protocol, ctx)
        # v is empty so w falsifies {p12}: either terminal is consistent
        assert res.is_bottom or (u.has_edge(*res.edge) and not ctx.v.has_edge(*res.edge))


def test_protocol_detects_broken_witness():
    vs = VarSpace(3, 2, 1)
    pr = saturation_refute(generate_family(vs), vs)
    protocol = build_protocol(pr, vs)
    ctx = GameContext.make(Graph.from_edges(3, [(1, 2)]), Graph(3, 0), vs)
    broken = GameContext(vs, ctx.u, ctx.v, ctx.qwit, ctx.rwit, 0)
    with pytest.raises(ProtocolError):
        run_protocol(protocol, broken)


@pytest.mark.parametrize("n,w,x", [(3, 2, 1), (4, 3, 2)])
def test_comm_cost(family_proofs, n, w, x):
    vs, _, pr = family_proofs[(n, w, x)]
    cost = comm_cost(build_protocol(pr, vs))
    assert cost.consistency_bound == 2 and cost.strategy_bound == 6
    assert cost.within_bounds
    assert cost.max_strategy_realized <= 1
    assert cost.bottom_consistency is None
    assert len(cost.consistency) == len(pr.steps) + vs.num_p


def test_every_pair_yields_edge(family_proofs):
    vs, _, pr = family_proofs[(4, 3, 1)]
    protocol = build_protocol(pr, vs)
    U = [g for g in all_graphs(4) if is_in_U(g, vs)]
    V = [g for g in all_graphs(4) if is_in_V(g, vs)]
    for u in U:
        for v in V:
            edge = run_protocol(protocol, GameContext.make(u, v, vs)).edge
            assert u.has_edge(*edge) and not v.has_edge(*edge)
