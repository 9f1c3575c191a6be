"""Finite delta-random resolution refutation distributions and their audit."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from fractions import Fraction
from math import lcm
from typing import Optional, Sequence

import numpy as np

from .formulas import Assignment, VarSpace, eval_cnf, falsifies, format_dimacs, is_tautology, parse_dimacs
from .resolution import (ResolutionProof, ResourceLimitExceeded, check_refutation, format_proof, num_clauses,
                         parse_proof)

EXACT_THRESHOLD = 24


class DistributionError(ValueError):
    pass


@dataclass(frozen=True)
class Sample:
    weight: Fraction
    delta: tuple
    proof: ResolutionProof


@dataclass
class RandomRefutationDistribution:
    vs: VarSpace
    base: tuple
    samples: list = field(default_factory=list)

    def __post_init__(self):
        self.base = tuple(frozenset(c) for c in self.base)
        self.samples = [Sample(Fraction(s.weight), tuple(frozenset(c) for c in s.delta), s.proof)
                        for s in self.samples]

    def total_weight(self) -> Fraction:
        return sum((s.weight for s in self.samples), Fraction(0))


@dataclass
class SamplesReport:
    errors: list
    per_sample: list

    @property
    def ok(self) -> bool:
        return not self.errors


def validate_weights(d: RandomRefutationDistribution) -> list[str]:
    errs = []
    if not d.samples:
        errs.append("empty distribution")
        return errs
    for i, s in enumerate(d.samples):
        if not 0 < s.weight <= 1:
            errs.append(f"sample {i}: weight {s.weight} outside (0, 1]")
    total = d.total_weight()
    if total != 1:
        errs.append(f"weights sum to {total}, not 1")
    return errs


def check_samples(d: RandomRefutationDistribution) -> SamplesReport:
    """Check every sample's proof against ``base ∪ delta``.

    Errors are ``(sample index or None, message)`` pairs.
    """
    errors = [(None, e) for e in validate_weights(d)]
    per_sample = []
    for i, s in enumerate(d.samples):
        for c in s.delta:
            for lit in c:
                try:
                    d.vs.block_of(lit)
                except ValueError as e:
                    errors.append((i, f"delta literal: {e}"))
        rep = check_refutation(s.proof, d.base + s.delta)
        per_sample.append(rep)
        errors.extend((i, str(e)) for e in rep.errors)
    return SamplesReport(errors, per_sample)


def size_metrics(d: RandomRefutationDistribution) -> tuple[int, int]:
    """``(k, dmax)``: largest proof size and largest ``|Delta_s|``."""
    k = max((num_clauses(s.proof) for s in d.samples), default=0)
    dmax = max((len(s.delta) for s in d.samples), default=0)
    return k, dmax


@dataclass
class DeltaResult:
    value: Fraction
    exact: bool
    support: tuple
    witness: Optional[dict] = None
    radius: Optional[Fraction] = None
    upper_bound: Optional[Fraction] = None
    num_samples: int = 0

    def to_dict(self) -> dict:
        out = {"delta_star": str(self.value), "exact": self.exact, "support_vars": len(self.support)}
        if not self.exact:
            out.update(radius=str(self.radius), upper_bound=str(self.upper_bound), samples=self.num_samples)
        return out


def _falsified(values: np.ndarray, delta: Sequence[frozenset], pos_of: dict) -> np.ndarray:
    """Which packed assignments (over the support, compact positions) falsify
    some clause of ``delta``."""
    out = np.zeros(values.shape, dtype=bool)
    for c in delta:
        pos = neg = 0
        for lit in c:
            b = 1 << pos_of[abs(lit)]
            if lit > 0:
                pos |= b
            else:
                neg |= b
        out |= ((values & np.uint64(pos)) == 0) & ((~values & np.uint64(neg)) == 0)
    return out


def _support(d: RandomRefutationDistribution) -> tuple:
    return tuple(sorted({abs(l) for s in d.samples for c in s.delta for l in c}))


def _weights(d: RandomRefutationDistribution) -> tuple[list[int], int]:
    den = lcm(*(s.weight.denominator for s in d.samples)) if d.samples else 1
    return [int(s.weight * den) for s in d.samples], den


def _scores(d, values, pos_of, nums) -> np.ndarray:
    total = np.zeros(values.shape, dtype=np.int64)
    for s, a in zip(d.samples, nums):
        if s.delta:
            total += a * _falsified(values, s.delta, pos_of)
    return total


def _clause_directed(d: RandomRefutationDistribution, pos_of: dict, fill: int) -> list[int]:
    """Candidates built by falsifying one seed clause, then greedily every
    other clause (heaviest sample first) that stays consistent."""
    clauses = sorted(((s.weight, i, c) for i, s in enumerate(d.samples) for c in s.delta
                      if not is_tautology(c)), key=lambda t: (-t[0], t[1]))
    out = []
    for _, _, seed in clauses:
        fixed = {}
        for _, _, c in [(None, None, seed)] + clauses:
            if all(fixed.get(abs(l), l < 0) == (l < 0) for l in c):
                fixed.update((abs(l), l < 0) for l in c)
        bits = fill
        for v, val in fixed.items():
            b = 1 << pos_of[v]
            bits = bits | b if val else bits & ~b
        out.append(bits)
    return out


def delta_of(d: RandomRefutationDistribution, mode: str = "exact", threshold: int = EXACT_THRESHOLD,
             num_samples: int = 4096, seed: int = 0) -> DeltaResult:
    """Least delta for which the distribution satisfies its defining condition:
    the maximum over total assignments of the weight of samples whose Delta it
    falsifies.

    Only variables occurring in some Delta can change the score, so the exact
    mode enumerates assignments to that support.  The sampling mode evaluates
    uniformly drawn support assignments, improves the best ones by greedy bit
    flips and reports the best score found together with a certified radius
    (the gap to an upper bound, the total weight of samples whose Delta
    contains a non-tautological clause).
    """
    if mode not in ("exact", "sample"):
        raise ValueError(f"unknown mode {mode!r}")
    support = _support(d)
    pos_of = {v: k for k, v in enumerate(support)}
    nums, den = _weights(d)
    m = len(support)
    if mode == "exact":
        if m > threshold:
            raise ResourceLimitExceeded(
                f"{m} support variables exceed the exact threshold {threshold}; use sampling mode")
        best, arg = -1, 0
        chunk = 1 << 20
        for start in range(0, 1 << m, chunk):
            values = np.arange(start, min(1 << m, start + chunk), dtype=np.uint64)
            sc = _scores(d, values, pos_of, nums)
            i = int(np.argmax(sc))
            if sc[i] > best:
                best, arg = int(sc[i]), int(values[i])
        witness = {v: arg >> k & 1 for v, k in pos_of.items()}
        return DeltaResult(Fraction(best, den), True, support, witness)

    if m > 63:
        raise ResourceLimitExceeded("sampling mode supports at most 63 support variables")
    rng = np.random.default_rng(seed)
    values = rng.integers(0, 1 << m, size=num_samples, dtype=np.uint64) if m else np.zeros(1, np.uint64)
    sc = _scores(d, values, pos_of, nums)
    best = int(sc.max())
    arg = int(values[int(np.argmax(sc))])
    starts = [int(x) for x in np.unique(values[np.argsort(-sc, kind="stable")[:8]])]
    starts += _clause_directed(d, pos_of, arg)
    for start in starts:
        cur = int(start)
        cur_sc = int(_scores(d, np.array([cur], np.uint64), pos_of, nums)[0])
        improved = True
        while improved:
            flips = np.array([cur ^ (1 << k) for k in range(m)], dtype=np.uint64)
            if not len(flips):
                break
            fs = _scores(d, flips, pos_of, nums)
            j = int(np.argmax(fs))
            improved = fs[j] > cur_sc
            if improved:
                cur, cur_sc = int(flips[j]), int(fs[j])
        if cur_sc > best:
            best, arg = cur_sc, cur
    upper = sum((s.weight for s in d.samples if any(not is_tautology(c) for c in s.delta)), Fraction(0))
    est = Fraction(best, den)
    witness = {v: arg >> k & 1 for v, k in pos_of.items()}
    return DeltaResult(est, False, support, witness, upper - est, upper, num_samples)


@dataclass
class AuditReport:
    applicable: bool
    per_sample: list
    violations: list

    @property
    def ok(self) -> bool:
        return not self.violations


def soundness_audit(d: RandomRefutationDistribution, alpha: Assignment) -> AuditReport:
    """If ``alpha`` satisfies the base clauses, every sample whose proof checks
    must have ``alpha`` falsify some clause of its Delta (otherwise the proof
    would refute a satisfiable clause set)."""
    if not alpha.is_total:
        raise ValueError("the audit needs a total assignment")
    applicable = eval_cnf(d.base, alpha)
    per_sample, violations = [], []
    for i, s in enumerate(d.samples):
        proof_ok = check_refutation(s.proof, d.base + s.delta).ok
        fals = any(falsifies(alpha.bits, c) for c in s.delta)
        status = "n/a"
        if applicable and proof_ok:
            status = "pass" if fals else "violation"
            if not fals:
                violations.append(i)
        per_sample.append({"sample": i, "proof_ok": proof_ok, "falsifies_delta": fals, "status": status})
    return AuditReport(applicable, per_sample, violations)


# -- JSON file ------------------------------------------------------------------

def load_distribution(path: str) -> RandomRefutationDistribution:
    """Read a distribution file; ``cnf`` and ``proof`` paths are relative to it."""
    base_dir = os.path.dirname(os.path.abspath(path))
    with open(path) as fh:
        doc = json.load(fh)
    try:
        cnf_path = os.path.join(base_dir, doc["cnf"])
        raw_samples = doc["samples"]
    except (KeyError, TypeError) as e:
        raise DistributionError(f"malformed distribution file: missing {e}") from None
    with open(cnf_path) as fh:
        dimacs = parse_dimacs(fh.read())
    if dimacs.vs is None:
        raise DistributionError("the CNF file lacks the 'c params' line")
    samples = []
    for i, raw in enumerate(raw_samples):
        try:
            weight = Fraction(raw["weight"])
            delta = tuple(frozenset(int(l) for l in c) for c in raw["delta"])
            proof_path = os.path.join(base_dir, raw["proof"])
        except (KeyError, TypeError, ValueError, ZeroDivisionError) as e:
            raise DistributionError(f"sample {i}: {e}") from None
        with open(proof_path) as fh:
            proof = parse_proof(fh.read())
        samples.append(Sample(weight, delta, proof))
    return RandomRefutationDistribution(dimacs.vs, dimacs.clauses, samples)


def save_distribution(d: RandomRefutationDistribution, path: str) -> list[str]:
    """Write the JSON file plus ``<stem>.cnf`` and ``<stem>.s<i>.proof`` beside it."""
    base_dir = os.path.dirname(os.path.abspath(path))
    stem = os.path.splitext(os.path.basename(path))[0]
    written = []
    cnf_name = f"{stem}.cnf"
    with open(os.path.join(base_dir, cnf_name), "w") as fh:
        fh.write(format_dimacs(d.base, d.vs))
    written.append(cnf_name)
    samples = []
    for i, s in enumerate(d.samples):
        proof_name = f"{stem}.s{i}.proof"
        with open(os.path.join(base_dir, proof_name), "w") as fh:
            fh.write(format_proof(s.proof))
        written.append(proof_name)
        samples.append({
            "weight": f"{s.weight.numerator}/{s.weight.denominator}",
            "delta": [sorted(c, key=lambda l: (abs(l), l)) for c in s.delta],
            "proof": proof_name,
        })
    with open(path, "w") as fh:
        json.dump({"cnf": cnf_name, "samples": samples}, fh, indent=1)
        fh.write("\n")
    return written
