import pytest
from hypothesis import given, strategies as st

from rrinterp.formulas import VarSpace, eval_cnf, generate_family, is_tautology
from rrinterp.resolution import (ProofParseError, ProofStep, ResolutionError, ResolutionProof, ResourceLimitExceeded,
                                 Satisfiable, check_refutation, format_proof, num_clauses, parse_proof,
                                 prune_dead_steps, resolve, saturation_refute)
from rrinterp.scan import find_model

X, Y, Z = 1, 2, 3


def three_step():
    return ResolutionProof([ProofStep(1, frozenset({X})), ProofStep(2, frozenset({-X})),
                            ProofStep(3, frozenset(), (1, 2), X)])


def test_resolve_examples():
    assert resolve({X}, {-X}, X) == frozenset()
    assert resolve({X, Y}, {-X, Z}, X) == frozenset({Y, Z})
    taut = resolve({X, Y}, {-X, -Y}, X)
    assert taut == frozenset({Y, -Y}) and is_tautology(taut)


@pytest.mark.parametrize("c1, c2", [({-X}, {X}), ({X}, {X}), ({Y}, {-X})])
def test_resolve_bad_pivot(c1, c2):
    with pytest.raises(ResolutionError):
        resolve(c1, c2, X)


def test_check_examples():
    assert check_refutation(three_step(), [{X}, {-X}]).ok
    rep = check_refutation(three_step(), [{X}])
    assert [(e.step, e.kind) for e in rep.errors] == [(2, "axiom-not-in-input")]
    bogus = ResolutionProof([ProofStep(1, frozenset({X})), ProofStep(2, frozenset({-X})),
                             ProofStep(3, frozenset({Y}), (1, 2), X)])
    kinds = check_refutation(bogus, [{X}, {-X}]).kinds()
    assert "wrong-resolvent" in kinds and "nonempty-root" in kinds


def test_check_recovers_pivot_and_flags_tautologies():
    proof = ResolutionProof([ProofStep(1, frozenset({X, Y})), ProofStep(2, frozenset({-X, -Y})),
                             ProofStep(3, frozenset({Y, -Y}), (1, 2))])
    rep = check_refutation(proof, [{X, Y}, {-X, -Y}])
    assert rep.pivots == {3: X}
    assert rep.tautologies == [3]
    assert rep.kinds() == {"nonempty-root"}


def test_check_bad_parent_order():
    proof = ResolutionProof([ProofStep(1, frozenset(), (2, 3), X), ProofStep(2, frozenset({X})),
                             ProofStep(3, frozenset({-X}))])
    assert "bad-parents" in check_refutation(proof, [{X}, {-X}]).kinds()


def test_num_clauses():
    assert num_clauses(three_step()) == 3
    assert num_clauses(ResolutionProof([ProofStep(1, frozenset())])) == 1


def test_saturation_examples():
    proof = saturation_refute([{X}, {-X}])
    assert isinstance(proof, ResolutionProof) and num_clauses(proof) == 3
    res = saturation_refute([{X, Y}])
    assert isinstance(res, Satisfiable)
    assert res.model[X] == 1 or res.model[Y] == 1
    assert eval_cnf([{X, Y}], res.model)


def test_saturation_budget():
    vs = VarSpace(4, 4, 3)
    with pytest.raises(ResourceLimitExceeded):
        saturation_refute(generate_family(vs), vs, max_clauses=50)


def test_family_refutation_and_file_roundtrip(family_proofs):
    vs, f, proof = family_proofs[(3, 2, 1)]
    assert check_refutation(proof, f).ok
    text = format_proof(proof)
    assert len(text.splitlines()) == num_clauses(proof)
    parsed = parse_proof(text)
    assert check_refutation(parsed, f).ok
    assert [s.clause for s in parsed.steps] == [s.clause for s in proof.steps]


def test_parse_errors():
    with pytest.raises(ProofParseError):
        parse_proof("1 1 0\n")
    with pytest.raises(ProofParseError):
        parse_proof("1 1 0 2 0\n")
    with pytest.raises(ProofParseError):
        parse_proof("")
    with pytest.raises(ProofParseError):
        parse_proof("1 1 0 0\n1 -1 0 0\n")


def test_prune_dead_steps():
    proof = ResolutionProof([ProofStep(1, frozenset({X})), ProofStep(2, frozenset({Y})),
                             ProofStep(3, frozenset({-X})), ProofStep(4, frozenset(), (1, 3), X)])
    pruned = prune_dead_steps(proof)
    assert num_clauses(pruned) == 3 <= num_clauses(proof)
    assert check_refutation(pruned, [{X}, {Y}, {-X}]).ok


cnfs = st.lists(st.frozensets(st.integers(-5, 5).filter(bool), min_size=0, max_size=3), min_size=1, max_size=9)


@given(cnfs)
def test_saturation_agrees_with_brute_force(f):
    res = saturation_refute(f)
    model = find_model(f, 5)
    if isinstance(res, ResolutionProof):
        assert model is None
        assert check_refutation(res, f).ok
        assert check_refutation(prune_dead_steps(res), f).ok
    else:
        assert model is not None
        assert eval_cnf(f, res.model)
