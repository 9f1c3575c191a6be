import pytest

from rrinterp import corpus
from rrinterp.formulas import VarSpace, generate_family
from rrinterp.resolution import saturation_refute

ALL_PARAMS = [(n, w, x) for n in (2, 3, 4) for w in range(2, n + 1) for x in range(1, w)]

_criteria = []


def record(criterion: str, ok: bool, detail: str = "") -> None:
    _criteria.append((criterion, ok, detail))


@pytest.fixture(scope="session")
def family_proofs():
    """Davis-Putnam refutations of every clique-coloring family with n <= 4."""
    out = {}
    for n, w, x in ALL_PARAMS:
        vs = VarSpace(n, w, x)
        out[(n, w, x)] = (vs, generate_family(vs), saturation_refute(generate_family(vs), vs))
    return out


@pytest.fixture(scope="session")
def corpus_instances():
    return list(corpus.corpus(seed=2024, count=100))


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok, detail in _criteria:
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}  {detail}")
