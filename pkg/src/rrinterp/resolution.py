"""Resolution proofs: data model, checker, text format and a Davis-Putnam
refutation generator.

Proof text format, one step per line::

    <id> <lit>* 0 <parent-id>* 0

Axioms have an empty parent list.  Resolve steps list exactly two parents; the
pivot is not written and is recovered by the checker (it must be unique).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from .formulas import Assignment, VarSpace, eval_cnf, is_tautology, plain_space


class ResolutionError(ValueError):
    pass


class ProofParseError(ValueError):
    pass


class ResourceLimitExceeded(RuntimeError):
    pass


def resolve(c1: Iterable[int], c2: Iterable[int], pivot: int) -> frozenset:
    """Resolvent of ``c1`` (containing ``pivot``) and ``c2`` (containing ``-pivot``).

    Tautological resolvents are returned as is; use ``is_tautology`` to flag them.
    """
    c1, c2 = frozenset(c1), frozenset(c2)
    pivot = abs(pivot)
    if pivot not in c1:
        raise ResolutionError(f"pivot {pivot} does not occur positively in the first clause")
    if -pivot not in c2:
        raise ResolutionError(f"pivot {pivot} does not occur negatively in the second clause")
    return (c1 - {pivot}) | (c2 - {-pivot})


@dataclass(frozen=True)
class ProofStep:
    id: int
    clause: frozenset
    parents: tuple = ()
    pivot: Optional[int] = None

    @property
    def is_axiom(self) -> bool:
        return not self.parents


@dataclass(frozen=True)
class ResolutionProof:
    steps: tuple
    root: Optional[int] = None

    def __post_init__(self):
        object.__setattr__(self, "steps", tuple(self.steps))
        if self.root is None and self.steps:
            object.__setattr__(self, "root", self.steps[-1].id)
        index = {}
        for pos, s in enumerate(self.steps):
            if s.id in index:
                raise ResolutionError(f"duplicate step id {s.id}")
            index[s.id] = pos
        object.__setattr__(self, "_index", index)

    def __len__(self) -> int:
        return len(self.steps)

    def step(self, sid: int) -> ProofStep:
        return self.steps[self._index[sid]]

    def position(self, sid: int) -> int:
        return self._index[sid]

    def __contains__(self, sid: int) -> bool:
        return sid in self._index

    def axioms(self) -> list[ProofStep]:
        return [s for s in self.steps if s.is_axiom]


def num_clauses(proof: ResolutionProof) -> int:
    """Number of steps, axioms included."""
    return len(proof.steps)


def num_derived(proof: ResolutionProof) -> int:
    return sum(1 for s in proof.steps if not s.is_axiom)


# -- checking -----------------------------------------------------------------

@dataclass(frozen=True)
class StepError:
    step: Optional[int]
    kind: str
    message: str

    def __str__(self) -> str:
        where = f"step {self.step}" if self.step is not None else "proof"
        return f"{where}: {self.kind}: {self.message}"


@dataclass
class CheckReport:
    errors: list = field(default_factory=list)
    tautologies: list = field(default_factory=list)
    pivots: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.errors

    def kinds(self) -> set:
        return {e.kind for e in self.errors}


def find_pivot(c1: frozenset, c2: frozenset, resolvent: Optional[frozenset] = None) -> list[int]:
    """Candidate pivots: variables positive in ``c1`` and negative in ``c2``.

    If ``resolvent`` is given, only candidates that reproduce it are kept.
    """
    cands = sorted(l for l in c1 if l > 0 and -l in c2)
    if resolvent is not None:
        cands = [x for x in cands if resolve(c1, c2, x) == resolvent]
    return cands


def check_refutation(proof: ResolutionProof, f: Iterable[Iterable[int]]) -> CheckReport:
    """Check that ``proof`` is a resolution refutation of ``f``.

    Axioms must be members of ``f`` (exact literal-set match); resolve steps must
    reference earlier steps and produce exactly the resolvent; the root must be
    the empty clause.  Steps without a stored pivot get it recovered here.
    """
    inputs = {frozenset(c) for c in f}
    report = CheckReport()
    seen: dict[int, frozenset] = {}
    for s in proof.steps:
        if s.is_axiom:
            if s.clause not in inputs:
                report.errors.append(StepError(s.id, "axiom-not-in-input", "clause is not an input clause"))
        elif len(s.parents) != 2:
            report.errors.append(StepError(s.id, "bad-parents", f"expected 2 parents, got {len(s.parents)}"))
        elif any(p not in seen for p in s.parents):
            report.errors.append(StepError(s.id, "bad-parents", "parent missing or not earlier"))
        else:
            c1, c2 = seen[s.parents[0]], seen[s.parents[1]]
            if s.pivot is None:
                cands = find_pivot(c1, c2, s.clause)
                if len(cands) == 1:
                    report.pivots[s.id] = cands[0]
                elif len(cands) > 1:
                    report.errors.append(StepError(s.id, "ambiguous-pivot", f"candidates {cands}"))
                elif find_pivot(c1, c2):
                    report.errors.append(StepError(s.id, "wrong-resolvent", "no pivot yields the stated clause"))
                else:
                    report.errors.append(StepError(s.id, "bad-pivot", "parents do not clash as (+x, -x)"))
            else:
                x = abs(s.pivot)
                if x not in c1 or -x not in c2:
                    report.errors.append(StepError(s.id, "bad-pivot", f"pivot {x} not +/- in parents"))
                elif resolve(c1, c2, x) != s.clause:
                    report.errors.append(StepError(s.id, "wrong-resolvent", "clause differs from the resolvent"))
                else:
                    report.pivots[s.id] = x
        if is_tautology(s.clause):
            report.tautologies.append(s.id)
        seen[s.id] = s.clause
    if not proof.steps:
        report.errors.append(StepError(None, "nonempty-root", "proof has no steps"))
    elif proof.root not in proof:
        report.errors.append(StepError(proof.root, "nonempty-root", "root step does not exist"))
    elif proof.step(proof.root).clause:
        report.errors.append(StepError(proof.root, "nonempty-root", "root clause is not empty"))
    return report


def with_pivots(proof: ResolutionProof) -> ResolutionProof:
    """Copy of a checkable proof with every resolve step's pivot filled in."""
    rep = check_refutation(proof, [s.clause for s in proof.axioms()])
    bad = [e for e in rep.errors if e.kind != "nonempty-root"]
    if bad:
        raise ResolutionError(str(bad[0]))
    steps = [s if s.is_axiom or s.pivot is not None
             else ProofStep(s.id, s.clause, s.parents, rep.pivots[s.id]) for s in proof.steps]
    return ResolutionProof(steps, proof.root)


# -- text format --------------------------------------------------------------

def format_proof(proof: ResolutionProof) -> str:
    lines = []
    for s in proof.steps:
        lits = sorted(s.clause, key=lambda l: (abs(l), l))
        lines.append(" ".join(map(str, [s.id, *lits, 0, *s.parents, 0])))
    return "\n".join(lines) + "\n"


def parse_proof(text: str) -> ResolutionProof:
    steps = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        try:
            nums = [int(x) for x in line.split()]
        except ValueError:
            raise ProofParseError(f"line {lineno}: not an integer list") from None
        if nums.count(0) != 2 or nums[-1] != 0 or len(nums) < 3:
            raise ProofParseError(f"line {lineno}: expected '<id> <lit>* 0 <parent>* 0'")
        sid = nums[0]
        if sid <= 0:
            raise ProofParseError(f"line {lineno}: step id must be positive")
        sep = nums.index(0, 1)
        lits = nums[1:sep]
        parents = tuple(nums[sep + 1:-1])
        if len(set(lits)) != len(lits):
            raise ProofParseError(f"line {lineno}: repeated literal")
        if len(parents) not in (0, 2):
            raise ProofParseError(f"line {lineno}: a step has 0 or 2 parents")
        steps.append(ProofStep(sid, frozenset(lits), parents))
    if not steps:
        raise ProofParseError("empty proof")
    try:
        return ResolutionProof(steps)
    except ResolutionError as e:
        raise ProofParseError(str(e)) from None


# -- Davis-Putnam oracle --------------------------------------------------------

def default_order(vs: VarSpace) -> list[int]:
    """Elimination order q-block, r-block, p-block."""
    return [*vs.block_vars("q"), *vs.block_vars("r"), *vs.block_vars("p")]


@dataclass
class Satisfiable:
    model: Assignment


def prune_dead_steps(proof: ResolutionProof) -> ResolutionProof:
    """Keep the steps the root depends on, renumbered 1..k in their order."""
    live = {proof.root}
    for s in reversed(proof.steps):
        if s.id in live:
            live.update(s.parents)
    renum = {}
    steps = []
    for s in proof.steps:
        if s.id in live:
            renum[s.id] = len(steps) + 1
            steps.append(ProofStep(renum[s.id], s.clause, tuple(renum[p] for p in s.parents), s.pivot))
    return ResolutionProof(steps, renum[proof.root])


def saturation_refute(f: Sequence[Iterable[int]], vs: Optional[VarSpace] = None,
                      order: Optional[Sequence[int]] = None, max_clauses: int = 200_000):
    """Davis-Putnam variable elimination recording every resolvent as a step.

    Returns a pruned ``ResolutionProof`` if ``f`` is unsatisfiable, otherwise
    ``Satisfiable(model)``.  Tautological resolvents and clauses subsumed by
    another live clause are dropped from the working set (they are never
    needed for a refutation).  Raises ``ResourceLimitExceeded`` when more than
    ``max_clauses`` steps would be recorded.
    """
    clauses = [frozenset(c) for c in f]
    if order is None:
        order = default_order(vs) if vs is not None else []
    order = list(order) + sorted({abs(l) for c in clauses for l in c} - set(order))

    steps: list[ProofStep] = []
    live: dict[frozenset, int] = {}  # clause -> step id

    def add(c, parents=(), pivot=None) -> int:
        if len(steps) >= max_clauses:
            raise ResourceLimitExceeded(f"more than {max_clauses} clauses")
        sid = len(steps) + 1
        steps.append(ProofStep(sid, c, parents, pivot))
        return sid

    def subsumed(c) -> bool:
        return any(d <= c for d in live if len(d) <= len(c))

    def insert(c, sid):
        for d in [d for d in live if c < d]:
            del live[d]
        live[c] = sid

    def finish(sid):
        return prune_dead_steps(ResolutionProof(steps, sid))

    for c in clauses:
        if c in live or is_tautology(c) or subsumed(c):
            continue
        sid = add(c)
        if not c:
            return finish(sid)
        insert(c, sid)

    eliminated = []  # (var, clauses removed at elimination) for model recovery
    for x in order:
        pos = [(c, i) for c, i in live.items() if x in c]
        neg = [(c, i) for c, i in live.items() if -x in c]
        if not pos and not neg:
            continue
        for c, _ in pos + neg:
            del live[c]
        eliminated.append((x, [c for c, _ in pos + neg]))
        for c1, i1 in pos:
            for c2, i2 in neg:
                r = (c1 - {x}) | (c2 - {-x})
                if is_tautology(r) or r in live or subsumed(r):
                    continue
                sid = add(r, (i1, i2), x)
                if not r:
                    return finish(sid)
                insert(r, sid)

    # every live clause was eliminated without producing the empty clause
    bits = 0
    for x, removed in reversed(eliminated):
        def sat_without_x(c):
            return any(abs(l) != x and bool(bits >> (abs(l) - 1) & 1) == (l > 0) for l in c)
        if any(x in c and not sat_without_x(c) for c in removed):
            bits |= 1 << (x - 1)
    model = Assignment(vs if vs is not None else plain_space(max(order, default=1)), bits)
    if not eval_cnf(clauses, model):
        raise AssertionError("Davis-Putnam model check failed")
    return Satisfiable(model)
