"""Karchmer-Wigderson protocols and monotone interpolants from refutations.

A refutation of ``Clique ∪ Color ∪ Delta`` becomes a dag-like protocol: one
inner node per proof step, one leaf per vertex pair and a separate bottom
terminal.  The players hold ``u`` (with clique witness ``q^u``) and ``v``
(with coloring witness ``r^v``); a node is consistent when the combined
assignment ``w(u, v) = (v, q^u, r^v)`` falsifies its clause.  Starting at the
empty clause the strategy keeps moving to a falsified parent until it meets a
clique axiom of the third kind (which names an edge of ``u`` missing from
``v``) or a Delta axiom (bottom).

For plain refutations (Delta empty) ``extract_circuit`` builds a monotone
interpolant directly, with gate count at most three times the proof size.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from math import ceil, comb, log2
from typing import Iterable, Mapping, Optional, Sequence

import numpy as np

from .formulas import (CliqueWitness, ColoringWitness, Graph, VarSpace, all_graphs, clause_masks,
                       falsifies, generate_clique_clauses, generate_color_clauses, is_in_U, is_in_V,
                       item_index)
from .resolution import ResolutionProof, with_pivots
from .scan import block_models

DELTA = "delta"


class ProtocolError(RuntimeError):
    """The protocol left its consistency condition (indicates a bug)."""


class InterpolationError(ValueError):
    pass


# -- protocol -----------------------------------------------------------------

def tag_axioms(proof: ResolutionProof, vs: VarSpace, delta: Iterable[Iterable[int]] = (),
               tags: Optional[Mapping[int, object]] = None) -> dict:
    """Origin of every axiom step: an item number 1-6 or ``"delta"``.

    Explicit ``tags`` (step id -> origin) win; otherwise family membership is
    tried first, then Delta.
    """
    items = item_index(vs)
    delta = {frozenset(c) for c in delta}
    out = {}
    for s in proof.axioms():
        if tags and s.id in tags:
            tag = tags[s.id]
            if tag == DELTA and s.clause not in delta:
                raise InterpolationError(f"step {s.id} tagged Delta but not in Delta")
            if tag != DELTA and items.get(s.clause) != tag:
                raise InterpolationError(f"step {s.id} is not a clause of item {tag}")
            out[s.id] = tag
        elif s.clause in items:
            out[s.id] = items[s.clause]
        elif s.clause in delta:
            out[s.id] = DELTA
        else:
            raise InterpolationError(f"axiom step {s.id} belongs to neither the family nor Delta")
    return out


@dataclass(frozen=True)
class GameContext:
    vs: VarSpace
    u: Graph
    v: Graph
    qwit: CliqueWitness
    rwit: ColoringWitness
    w: int

    @classmethod
    def make(cls, u: Graph, v: Graph, vs: VarSpace,
             qwit: Optional[CliqueWitness] = None, rwit: Optional[ColoringWitness] = None) -> "GameContext":
        qwit = qwit or is_in_U(u, vs)
        rwit = rwit or is_in_V(v, vs)
        if qwit is None:
            raise ValueError(f"{u} has no {vs.omega}-clique")
        if rwit is None:
            raise ValueError(f"{v} is not {vs.xi}-colorable")
        qwit.validate(u, vs)
        rwit.validate(v, vs)
        return cls(vs, u, v, qwit, rwit, v.bits | qwit.q_bits(vs) | rwit.r_bits(vs))


@dataclass(frozen=True)
class ProtocolResult:
    edge: Optional[tuple]
    trace: tuple

    @property
    def is_bottom(self) -> bool:
        return self.edge is None

    def to_json(self) -> str:
        result = "bottom" if self.edge is None else list(self.edge)
        return json.dumps({"trace": list(self.trace), "result": result})


class KWProtocol:
    """Protocol graph built from a refutation.

    Nodes ``0..k-1`` are the proof steps (in proof order), ``k..k+C(n,2)-1``
    the leaves (pairs in lexicographic order) and ``k+C(n,2)`` is the bottom
    terminal.  Only the first ``k + C(n,2)`` nodes count towards the size.
    """

    def __init__(self, proof: ResolutionProof, vs: VarSpace, delta: Iterable[Iterable[int]] = (),
                 tags: Optional[Mapping[int, object]] = None):
        self.proof = with_pivots(proof)
        self.vs = vs
        self.delta = tuple(frozenset(c) for c in delta)
        self.tags = tag_axioms(self.proof, vs, self.delta, tags)
        self.k = len(self.proof.steps)
        self.pairs = vs.pairs()
        self.bottom = self.k + len(self.pairs)
        root = self.proof.step(self.proof.root)
        if root.clause:
            raise InterpolationError("the root of the proof is not the empty clause")
        self.root = self.proof.position(root.id)

    @property
    def size(self) -> int:
        return self.k + len(self.pairs)

    @property
    def num_nodes(self) -> int:
        return self.size + 1

    def is_leaf(self, node: int) -> bool:
        return self.k <= node < self.bottom

    def label(self, node: int) -> tuple:
        if not self.is_leaf(node):
            raise ValueError(f"node {node} is not a leaf")
        return self.pairs[node - self.k]

    def leaf(self, i: int, j: int) -> int:
        return self.k + self.vs.p(i, j) - 1

    def step_of(self, node: int):
        return self.proof.steps[node]

    def successors(self, node: int) -> list[int]:
        """Edges of the protocol graph."""
        if node >= self.k:
            return []
        s = self.step_of(node)
        if not s.is_axiom:
            return [self.proof.position(p) for p in s.parents]
        tag = self.tags[s.id]
        if tag == DELTA:
            return [self.bottom]
        if tag == 3:
            return [self.leaf(*self._item3_pair(s.clause))]
        return []

    def _item3_pair(self, c: frozenset) -> tuple:
        (p,) = [l for l in c if l > 0]
        _, i, j = self.vs.index_of(p)
        return i, j

    def describe(self, node: int) -> str:
        if node == self.bottom:
            return "bottom"
        if self.is_leaf(node):
            return "leaf {%d,%d}" % self.label(node)
        s = self.step_of(node)
        return f"step {s.id} {self.vs.clause_str(s.clause)}"


def build_protocol(proof: ResolutionProof, vs: VarSpace, delta: Iterable[Iterable[int]] = (),
                   tags: Optional[Mapping[int, object]] = None) -> KWProtocol:
    return KWProtocol(proof, vs, delta, tags)


def consistency(protocol: KWProtocol, node: int, ctx: GameContext) -> bool:
    if node == protocol.bottom:
        return any(falsifies(ctx.w, d) for d in protocol.delta)
    if protocol.is_leaf(node):
        i, j = protocol.label(node)
        return ctx.u.has_edge(i, j) and not ctx.v.has_edge(i, j)
    return falsifies(ctx.w, protocol.step_of(node).clause)


def strategy_step(protocol: KWProtocol, node: int, ctx: GameContext) -> int:
    if node >= protocol.k:
        raise ValueError(f"{protocol.describe(node)} has no successor")
    s = protocol.step_of(node)
    if not s.is_axiom:
        x = s.pivot
        # parent1 holds +x, parent2 holds -x; the falsified one is fixed by w(x)
        chosen = s.parents[1] if ctx.w >> (x - 1) & 1 else s.parents[0]
        return protocol.proof.position(chosen)
    tag = protocol.tags[s.id]
    if tag == DELTA:
        return protocol.bottom
    if tag == 3:
        return protocol.leaf(*protocol._item3_pair(s.clause))
    raise ProtocolError(f"reached axiom of item {tag} at step {s.id}; w(u,v) satisfies those")


def run_protocol(protocol: KWProtocol, ctx: GameContext, check: bool = True) -> ProtocolResult:
    node = protocol.root
    trace = [node]
    while node < protocol.k:
        if check and not consistency(protocol, node, ctx):
            raise ProtocolError(f"inconsistent node {protocol.describe(node)}")
        node = strategy_step(protocol, node, ctx)
        trace.append(node)
    if check and not consistency(protocol, node, ctx):
        raise ProtocolError(f"inconsistent terminal {protocol.describe(node)}")
    edge = None if node == protocol.bottom else protocol.label(node)
    return ProtocolResult(edge, tuple(trace))


@dataclass
class CostReport:
    consistency: dict
    strategy: dict
    strategy_realized: dict
    bottom_consistency: Optional[int]
    max_consistency: int
    max_strategy: int
    max_strategy_realized: int
    consistency_bound: int
    strategy_bound: int

    @property
    def within_bounds(self) -> bool:
        return self.max_consistency <= self.consistency_bound and self.max_strategy <= self.strategy_bound

    def to_dict(self) -> dict:
        return {k: getattr(self, k) for k in ("max_consistency", "max_strategy", "max_strategy_realized",
                                              "consistency_bound", "strategy_bound", "bottom_consistency")}


def comm_cost(protocol: KWProtocol, vs: Optional[VarSpace] = None) -> CostReport:
    """Per-node communication cost under a fixed cost model.

    Consistency of an inner node costs 2 bits: the u-player reports whether
    all q-literals are false under ``q^u`` and the v-player does the same for
    the p- and r-literals.  A leaf costs 2 bits (``u_ij`` and ``v_ij``).  A
    resolve step costs 1 bit from the owner of the pivot.  The move from a
    clique axiom to its leaf is budgeted at ``2*ceil(log2 n)`` bits although
    the leaf is fixed by the node (realized cost 0).  The bottom terminal is
    not a node of the size count; its condition is reported separately as
    ``2*|Delta|``.
    """
    vs = vs or protocol.vs
    logn = ceil(log2(vs.n)) if vs.n > 1 else 0
    cons, strat, real = {}, {}, {}
    for node in range(protocol.size):
        cons[node] = 2
        if node >= protocol.k:
            continue
        s = protocol.step_of(node)
        if not s.is_axiom:
            strat[node] = real[node] = 1
        elif protocol.tags[s.id] == 3:
            strat[node], real[node] = 2 * logn, 0
        else:
            strat[node] = real[node] = 0
    return CostReport(
        consistency=cons, strategy=strat, strategy_realized=real,
        bottom_consistency=2 * len(protocol.delta) if protocol.delta else None,
        max_consistency=max(cons.values(), default=0),
        max_strategy=max(strat.values(), default=0),
        max_strategy_realized=max(real.values(), default=0),
        consistency_bound=2, strategy_bound=2 + 2 * logn)


# -- monotone circuits --------------------------------------------------------

GATE_KINDS = ("AND", "OR", "CONST0", "CONST1", "INPUT")


@dataclass(frozen=True)
class Gate:
    kind: str
    args: tuple = ()


@dataclass(frozen=True)
class MonotoneCircuit:
    n: int
    gates: tuple
    output: int
    step_gates: Mapping[int, int] = field(default_factory=dict, compare=False)

    def __len__(self) -> int:
        return len(self.gates)

    def replace(self, gate_id: int, gate: Gate) -> "MonotoneCircuit":
        gates = list(self.gates)
        gates[gate_id] = gate
        return MonotoneCircuit(self.n, tuple(gates), self.output, dict(self.step_gates))


class _Builder:
    def __init__(self):
        self.gates = []

    def add(self, kind, *args) -> int:
        self.gates.append(Gate(kind, tuple(args)))
        return len(self.gates) - 1


def extract_circuit(proof: ResolutionProof, vs: VarSpace,
                    a_clauses: Optional[Iterable[Iterable[int]]] = None,
                    b_clauses: Optional[Iterable[Iterable[int]]] = None,
                    delta: Iterable[Iterable[int]] = ()) -> MonotoneCircuit:
    """Monotone interpolant of a refutation of ``A ∪ B``.

    ``A`` (default: the clique clauses) may contain p only positively and no
    r-variables; ``B`` (default: the color clauses) p only negatively and no
    q-variables.  Per step: A-axiom -> 0, B-axiom -> 1, q-pivot -> OR,
    r-pivot -> AND, p-pivot x -> OR(AND(x, D2), D1) where D1 belongs to the
    parent holding +x.  The output is 1 on graphs for which ``A`` is
    satisfiable and 0 on graphs for which ``B`` is.
    """
    if any(True for _ in delta):
        raise InterpolationError("circuit extraction needs Delta = {}; use the pruning pipeline instead")
    A = {frozenset(c) for c in (generate_clique_clauses(vs) if a_clauses is None else a_clauses)}
    B = {frozenset(c) for c in (generate_color_clauses(vs) if b_clauses is None else b_clauses)}
    proof = with_pivots(proof)
    b = _Builder()
    gate_of: dict[int, int] = {}
    for s in proof.steps:
        if s.is_axiom:
            in_a, in_b = s.clause in A, s.clause in B
            if in_a == in_b:
                raise InterpolationError(f"axiom step {s.id} must belong to exactly one of A, B")
            for lit in s.clause:
                blk = vs.block_of(lit)
                if in_a and (blk == "r" or (blk == "p" and lit < 0)):
                    raise InterpolationError(f"A-axiom step {s.id} has literal {vs.lit_name(lit)}")
                if in_b and (blk == "q" or (blk == "p" and lit > 0)):
                    raise InterpolationError(f"B-axiom step {s.id} has literal {vs.lit_name(lit)}")
            gate_of[s.id] = b.add("CONST0" if in_a else "CONST1")
            continue
        d1, d2 = gate_of[s.parents[0]], gate_of[s.parents[1]]
        blk = vs.block_of(s.pivot)
        if blk == "q":
            gate_of[s.id] = b.add("OR", d1, d2)
        elif blk == "r":
            gate_of[s.id] = b.add("AND", d1, d2)
        else:
            _, i, j = vs.index_of(s.pivot)
            x = b.add("INPUT", i, j)
            gate_of[s.id] = b.add("OR", b.add("AND", x, d2), d1)
    return MonotoneCircuit(vs.n, tuple(b.gates), gate_of[proof.root], gate_of)


def check_monotone(c: MonotoneCircuit) -> bool:
    """Structural check: known gate kinds only, arguments point backwards,
    inputs are vertex pairs of ``[n]``."""
    for gid, g in enumerate(c.gates):
        if g.kind not in GATE_KINDS:
            return False
        if g.kind in ("AND", "OR"):
            if len(g.args) != 2 or not all(0 <= a < gid for a in g.args):
                return False
        elif g.kind == "INPUT":
            if len(g.args) != 2:
                return False
            i, j = g.args
            if not (1 <= i < j <= c.n):
                return False
        elif g.args:
            return False
    return 0 <= c.output < len(c.gates)


def _values(c: MonotoneCircuit, input_value) -> list:
    vals = []
    for g in c.gates:
        if g.kind == "CONST0":
            vals.append(input_value(None, 0))
        elif g.kind == "CONST1":
            vals.append(input_value(None, 1))
        elif g.kind == "INPUT":
            vals.append(input_value(g.args, None))
        elif g.kind == "AND":
            vals.append(vals[g.args[0]] & vals[g.args[1]])
        elif g.kind == "OR":
            vals.append(vals[g.args[0]] | vals[g.args[1]])
        else:
            raise ValueError(f"unknown gate kind {g.kind}")
    return vals


def eval_circuit(c: MonotoneCircuit, g: Graph) -> int:
    if g.n != c.n:
        raise ValueError("graph size does not match the circuit")
    vals = _values(c, lambda pair, const: const if pair is None else int(g.has_edge(*pair)))
    return vals[c.output]


def truth_tables(c: MonotoneCircuit) -> list[int]:
    """Bit-parallel evaluation: gate value on graph ``a`` is bit ``a`` of its
    table, for every graph on ``n`` vertices at once."""
    m = comb(c.n, 2)
    full = (1 << (1 << m)) - 1
    var_tables = {}
    for k in range(m):
        t = 0
        for a in range(1 << m):
            if a >> k & 1:
                t |= 1 << a
        var_tables[k] = t
    pairs = VarSpace(c.n, 0, 0, checked=False)

    def value(pair, const):
        if pair is None:
            return full if const else 0
        return var_tables[pairs.p(*pair) - 1]

    return _values(c, value)


def format_circuit(c: MonotoneCircuit) -> str:
    lines = []
    for gid, g in enumerate(c.gates):
        if g.kind in ("AND", "OR"):
            rhs = f"{g.kind} g{g.args[0]} g{g.args[1]}"
        elif g.kind == "INPUT":
            rhs = f"INPUT p {g.args[0]} {g.args[1]}"
        else:
            rhs = f"CONST {g.kind[-1]}"
        lines.append(f"g{gid} = {rhs}")
    lines.append(f"output g{c.output}")
    return "\n".join(lines) + "\n"


def parse_circuit(text: str, n: int) -> MonotoneCircuit:
    gates = []
    output = None

    def ref(tok):
        if not tok.startswith("g"):
            raise ValueError(f"bad gate reference {tok!r}")
        return int(tok[1:])

    for lineno, raw in enumerate(text.splitlines(), start=1):
        parts = raw.split()
        if not parts:
            continue
        if parts[0] == "output":
            output = ref(parts[1])
            continue
        if len(parts) < 3 or parts[1] != "=" or ref(parts[0]) != len(gates):
            raise ValueError(f"line {lineno}: expected 'g{len(gates)} = ...'")
        kind, args = parts[2], parts[3:]
        if kind in ("AND", "OR") and len(args) == 2:
            gates.append(Gate(kind, (ref(args[0]), ref(args[1]))))
        elif kind == "CONST" and args in (["0"], ["1"]):
            gates.append(Gate("CONST" + args[0]))
        elif kind == "INPUT" and len(args) == 3 and args[0] == "p":
            gates.append(Gate("INPUT", (int(args[1]), int(args[2]))))
        else:
            raise ValueError(f"line {lineno}: bad gate {raw!r}")
    if output is None:
        raise ValueError("missing output line")
    return MonotoneCircuit(n, tuple(gates), output)


@dataclass
class SeparationReport:
    u_total: int
    u_ones: int
    v_total: int
    v_zeros: int
    errors: list

    @property
    def ok(self) -> bool:
        return not self.errors

    def summary(self) -> str:
        return (f"separates {self.u_ones}/{self.u_total} U-graphs and "
                f"{self.v_zeros}/{self.v_total} V-graphs")


def separation_report(c: MonotoneCircuit, vs: VarSpace) -> SeparationReport:
    out = truth_tables(c)[c.output]
    rep = SeparationReport(0, 0, 0, 0, [])
    for g in all_graphs(vs.n):
        val = out >> g.bits & 1
        if is_in_U(g, vs) is not None:
            rep.u_total += 1
            rep.u_ones += val
            if not val:
                rep.errors.append(f"outputs 0 on U-graph {g}")
        if is_in_V(g, vs) is not None:
            rep.v_total += 1
            rep.v_zeros += 1 - val
            if val:
                rep.errors.append(f"outputs 1 on V-graph {g}")
    return rep


@dataclass
class InvariantReport:
    violations: list
    checked: int

    @property
    def ok(self) -> bool:
        return not self.violations


def check_clause_invariant(proof: ResolutionProof, vs: VarSpace, circuit: Optional[MonotoneCircuit] = None,
                           a_clauses: Optional[Sequence[Iterable[int]]] = None,
                           b_clauses: Optional[Sequence[Iterable[int]]] = None) -> InvariantReport:
    """Exhaustively verify the step-wise interpolation invariant.

    For every step C with subcircuit D_C and every p-assignment a:

    (i)  D_C(a) = 0 and a falsifies the positive p-literals of C  =>  every
         q-assignment satisfying A under a satisfies a q-literal of C;
    (ii) D_C(a) = 1 and a falsifies the negative p-literals of C  =>  every
         r-assignment satisfying B under a satisfies an r-literal of C.

    At the empty clause this is exactly the separation property.
    """
    proof = with_pivots(proof)
    A = list(generate_clique_clauses(vs) if a_clauses is None else a_clauses)
    B = list(generate_color_clauses(vs) if b_clauses is None else b_clauses)
    if circuit is None:
        circuit = extract_circuit(proof, vs, A, B)
    tables = truth_tables(circuit)
    qmask, rmask, pmask = vs.block_mask("q"), vs.block_mask("r"), vs.block_mask("p")
    info = []
    for s in proof.steps:
        pos, neg = clause_masks(s.clause)
        info.append((s.id, tables[circuit.step_gates[s.id]], pos & pmask, neg & pmask,
                     np.uint64(pos & qmask), np.uint64(neg & qmask),
                     np.uint64(pos & rmask), np.uint64(neg & rmask)))
    violations = []
    checked = 0
    for a in range(1 << vs.num_p):
        qs = block_models(A, vs, "q", a)
        rs = block_models(B, vs, "r", a)
        for sid, table, ppos, pneg, qpos, qneg, rpos, rneg in info:
            d = table >> a & 1
            if d == 0 and not a & ppos and len(qs):
                checked += 1
                bad = ((qs & qpos) == 0) & ((~qs & qneg) == 0)
                if bad.any():
                    violations.append((sid, a, "i"))
            elif d == 1 and not ~a & pneg and len(rs):
                checked += 1
                bad = ((rs & rpos) == 0) & ((~rs & rneg) == 0)
                if bad.any():
                    violations.append((sid, a, "ii"))
    return InvariantReport(violations, checked)
