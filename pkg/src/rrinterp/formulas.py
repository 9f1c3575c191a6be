"""Clique-coloring clause families over a p/q/r partitioned variable space.

Variables are DIMACS integers numbered block-wise: the p-block (one variable
per unordered vertex pair, pairs in lexicographic order), then the q-block
``q(u, i)`` for ``u in [omega]``, ``i in [n]``, then the r-block ``r(i, c)``
for ``i in [n]``, ``c in [xi]``.  Literals are signed integers and a clause is
a ``frozenset`` of literals.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from math import comb
from typing import Iterable, Iterator, Optional, Sequence, Union

Clause = frozenset
CNF = tuple


class ParameterError(ValueError):
    """Raised for variable-space parameters outside the supported range."""


class UnassignedVariable(KeyError):
    pass


class WitnessError(ValueError):
    """A witness does not certify membership of its graph (a caller bug)."""


@dataclass(frozen=True)
class VarSpace:
    n: int
    omega: int
    xi: int
    checked: bool = True

    def __post_init__(self):
        if self.n < 1 or self.omega < 0 or self.xi < 0:
            raise ParameterError(f"invalid parameters n={self.n} omega={self.omega} xi={self.xi}")
        if self.checked and not (self.n >= self.omega > self.xi >= 1):
            raise ParameterError(
                f"need n >= omega > xi >= 1, got n={self.n} omega={self.omega} xi={self.xi}")

    # block sizes
    @property
    def num_p(self) -> int:
        return comb(self.n, 2)

    @property
    def num_q(self) -> int:
        return self.omega * self.n

    @property
    def num_r(self) -> int:
        return self.n * self.xi

    @property
    def num_vars(self) -> int:
        return self.num_p + self.num_q + self.num_r

    def pairs(self) -> list[tuple[int, int]]:
        return list(itertools.combinations(range(1, self.n + 1), 2))

    def p(self, i: int, j: int) -> int:
        if i == j or not (1 <= i <= self.n and 1 <= j <= self.n):
            raise ValueError(f"bad vertex pair ({i}, {j})")
        if i > j:
            i, j = j, i
        # index of (i, j) among lexicographically ordered pairs
        before = (i - 1) * self.n - (i - 1) * i // 2
        return before + (j - i)

    def q(self, u: int, i: int) -> int:
        if not (1 <= u <= self.omega and 1 <= i <= self.n):
            raise ValueError(f"bad q index ({u}, {i})")
        return self.num_p + (u - 1) * self.n + i

    def r(self, i: int, c: int) -> int:
        if not (1 <= i <= self.n and 1 <= c <= self.xi):
            raise ValueError(f"bad r index ({i}, {c})")
        return self.num_p + self.num_q + (i - 1) * self.xi + c

    def block_range(self, block: str) -> tuple[int, int]:
        """Inclusive ``(lo, hi)`` variable range of a block; ``lo > hi`` if empty."""
        if block == "p":
            return 1, self.num_p
        if block == "q":
            return self.num_p + 1, self.num_p + self.num_q
        if block == "r":
            return self.num_p + self.num_q + 1, self.num_vars
        raise ValueError(block)

    def block_of(self, var: int) -> str:
        var = abs(var)
        if 1 <= var <= self.num_p:
            return "p"
        if var <= self.num_p + self.num_q:
            return "q"
        if var <= self.num_vars:
            return "r"
        raise ValueError(f"variable {var} outside the space (1..{self.num_vars})")

    def block_vars(self, block: str) -> range:
        lo, hi = self.block_range(block)
        return range(lo, hi + 1)

    def index_of(self, var: int) -> tuple:
        """Inverse of ``p``/``q``/``r``: returns ``(block, a, b)``."""
        var = abs(var)
        block = self.block_of(var)
        if block == "p":
            i, j = self.pairs()[var - 1]
            return ("p", i, j)
        if block == "q":
            k = var - self.num_p - 1
            return ("q", k // self.n + 1, k % self.n + 1)
        k = var - self.num_p - self.num_q - 1
        return ("r", k // self.xi + 1, k % self.xi + 1)

    def var_name(self, var: int) -> str:
        block, a, b = self.index_of(var)
        return f"p{{{a},{b}}}" if block == "p" else f"{block}({a},{b})"

    def lit_name(self, lit: int) -> str:
        return ("~" if lit < 0 else "") + self.var_name(lit)

    def clause_str(self, clause: Iterable[int]) -> str:
        lits = sorted(clause, key=lambda l: (abs(l), l))
        return "{" + ", ".join(self.lit_name(l) for l in lits) + "}"

    def block_mask(self, block: str) -> int:
        lo, hi = self.block_range(block)
        if lo > hi:
            return 0
        return ((1 << (hi - lo + 1)) - 1) << (lo - 1)


def clause(lits: Iterable[int]) -> frozenset:
    c = frozenset(lits)
    if 0 in c:
        raise ValueError("0 is not a literal")
    return c


def is_tautology(c: Iterable[int]) -> bool:
    c = set(c)
    return any(-l in c for l in c)


def dedup(clauses: Iterable[Iterable[int]]) -> tuple:
    """Order-preserving deduplication of clauses as literal sets."""
    seen = set()
    out = []
    for c in clauses:
        c = frozenset(c)
        if c not in seen:
            seen.add(c)
            out.append(c)
    return tuple(out)


def check_vars(cnf: Iterable[Iterable[int]], vs: VarSpace) -> None:
    for c in cnf:
        for lit in c:
            vs.block_of(lit)


# -- generators ---------------------------------------------------------------

def clique_items(vs: VarSpace) -> dict[int, tuple]:
    """The clique clauses split by item number 1, 2, 3 (deduplicated)."""
    n, w = vs.n, vs.omega
    rows = [frozenset(vs.q(u, i) for i in range(1, n + 1)) for u in range(1, w + 1)]
    item2 = []
    item3 = []
    for u, v in itertools.permutations(range(1, w + 1), 2):
        for i in range(1, n + 1):
            item2.append(frozenset((-vs.q(u, i), -vs.q(v, i))))
        for i, j in itertools.permutations(range(1, n + 1), 2):
            item3.append(frozenset((-vs.q(u, i), -vs.q(v, j), vs.p(i, j))))
    return {1: dedup(rows), 2: dedup(item2), 3: dedup(item3)}


def color_items(vs: VarSpace) -> dict[int, tuple]:
    """The coloring clauses split by item number 4, 5, 6 (deduplicated)."""
    n, x = vs.n, vs.xi
    rows = [frozenset(vs.r(i, c) for c in range(1, x + 1)) for i in range(1, n + 1)]
    item5 = []
    item6 = []
    for i in range(1, n + 1):
        for c, d in itertools.permutations(range(1, x + 1), 2):
            item5.append(frozenset((-vs.r(i, c), -vs.r(i, d))))
    for c in range(1, x + 1):
        for i, j in itertools.permutations(range(1, n + 1), 2):
            item6.append(frozenset((-vs.r(i, c), -vs.r(j, c), -vs.p(i, j))))
    return {4: dedup(rows), 5: dedup(item5), 6: dedup(item6)}


def generate_clique_clauses(vs: VarSpace) -> tuple:
    items = clique_items(vs)
    return dedup(itertools.chain(items[1], items[2], items[3]))


def generate_color_clauses(vs: VarSpace) -> tuple:
    items = color_items(vs)
    return dedup(itertools.chain(items[4], items[5], items[6]))


def generate_family(vs: VarSpace) -> tuple:
    return generate_clique_clauses(vs) + generate_color_clauses(vs)


def item_index(vs: VarSpace) -> dict[frozenset, int]:
    """Map every family clause to its item number (1-6)."""
    out = {}
    for items in (clique_items(vs), color_items(vs)):
        for k, cls in items.items():
            for c in cls:
                out.setdefault(c, k)
    return out


# -- assignments --------------------------------------------------------------

@dataclass(frozen=True)
class Assignment:
    """Bit-packed assignment: bit ``v-1`` of ``bits`` is the value of variable
    ``v``; ``mask`` marks which variables are assigned."""

    vs: VarSpace
    bits: int
    mask: int = -1

    def __post_init__(self):
        full = (1 << self.vs.num_vars) - 1
        mask = full if self.mask == -1 else self.mask
        object.__setattr__(self, "mask", mask & full)
        object.__setattr__(self, "bits", self.bits & mask & full)

    @classmethod
    def from_dict(cls, vs: VarSpace, values: dict[int, int]) -> "Assignment":
        bits = mask = 0
        for var, val in values.items():
            vs.block_of(var)
            mask |= 1 << (var - 1)
            if val:
                bits |= 1 << (var - 1)
        return cls(vs, bits, mask)

    @property
    def is_total(self) -> bool:
        return self.mask == (1 << self.vs.num_vars) - 1

    def value(self, var: int) -> int:
        bit = 1 << (abs(var) - 1)
        if not self.mask & bit:
            raise UnassignedVariable(var)
        return 1 if self.bits & bit else 0

    def __getitem__(self, var: int) -> int:
        return self.value(var)

    def block(self, name: str) -> int:
        """Bits of one block, shifted so the block's first variable is bit 0."""
        lo, hi = self.vs.block_range(name)
        if lo > hi:
            return 0
        return (self.bits >> (lo - 1)) & ((1 << (hi - lo + 1)) - 1)

    def to_dict(self) -> dict[int, int]:
        return {v: self.value(v) for v in range(1, self.vs.num_vars + 1) if self.mask >> (v - 1) & 1}


def eval_clause(c: Iterable[int], a: Assignment) -> bool:
    for lit in c:
        val = a.value(lit)
        if (val == 1) == (lit > 0):
            return True
    return False


def eval_cnf(f: Iterable[Iterable[int]], a: Assignment) -> bool:
    return all(eval_clause(c, a) for c in f)


def clause_masks(c: Iterable[int]) -> tuple[int, int]:
    """``(pos, neg)`` bitmasks of a clause's positive/negative variables."""
    pos = neg = 0
    for lit in c:
        if lit > 0:
            pos |= 1 << (lit - 1)
        else:
            neg |= 1 << (-lit - 1)
    return pos, neg


def falsifies(bits: int, c: Iterable[int]) -> bool:
    """True iff the total assignment ``bits`` makes every literal of ``c`` false."""
    pos, neg = clause_masks(c)
    return not (bits & pos) and not (~bits & neg)


# -- graphs -------------------------------------------------------------------

@dataclass(frozen=True, order=True)
class Graph:
    """Undirected loopless graph on ``[n]``; bit ``k`` is the ``k``-th pair in
    lexicographic order, i.e. the value of p-variable ``k+1``."""

    n: int
    bits: int

    def __post_init__(self):
        if self.bits < 0 or self.bits >> comb(self.n, 2):
            raise ValueError(f"bitvector too long for n={self.n}")

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]]) -> "Graph":
        vs = VarSpace(n, 0, 0, checked=False)
        bits = 0
        for i, j in edges:
            bits |= 1 << (vs.p(i, j) - 1)
        return cls(n, bits)

    @classmethod
    def parse(cls, text: str) -> "Graph":
        n, _, s = text.strip().partition(":")
        n = int(n)
        if len(s) != comb(n, 2) or set(s) - {"0", "1"}:
            raise ValueError(f"bad graph string {text!r}")
        return cls(n, sum(1 << k for k, ch in enumerate(s) if ch == "1"))

    def __str__(self) -> str:
        m = comb(self.n, 2)
        return f"{self.n}:" + "".join("1" if self.bits >> k & 1 else "0" for k in range(m))

    def has_edge(self, i: int, j: int) -> bool:
        return bool(self.bits >> (_pair_index(self.n, i, j)) & 1)

    def edges(self) -> list[tuple[int, int]]:
        pairs = itertools.combinations(range(1, self.n + 1), 2)
        return [e for k, e in enumerate(pairs) if self.bits >> k & 1]

    def add_edge(self, i: int, j: int) -> "Graph":
        return Graph(self.n, self.bits | 1 << _pair_index(self.n, i, j))

    def p_assignment(self, vs: VarSpace) -> int:
        """p-block bits of an assignment over ``vs`` (identical layout)."""
        if vs.n != self.n:
            raise ValueError("vertex count mismatch")
        return self.bits


def _pair_index(n: int, i: int, j: int) -> int:
    if i == j:
        raise ValueError("loops are not edges")
    if i > j:
        i, j = j, i
    return (i - 1) * n - (i - 1) * i // 2 + (j - i) - 1


def all_graphs(n: int) -> Iterator[Graph]:
    for bits in range(1 << comb(n, 2)):
        yield Graph(n, bits)


# -- witnesses ----------------------------------------------------------------

@dataclass(frozen=True)
class CliqueWitness:
    """Injective map ``[omega] -> [n]``; ``vertices[u-1]`` is the image of ``u``."""

    vertices: tuple[int, ...]

    def q_bits(self, vs: VarSpace) -> int:
        bits = 0
        for u, i in enumerate(self.vertices, start=1):
            bits |= 1 << (vs.q(u, i) - 1)
        return bits

    def validate(self, g: Graph, vs: VarSpace) -> None:
        if len(self.vertices) != vs.omega or len(set(self.vertices)) != vs.omega:
            raise WitnessError(f"not an injective map [omega] -> [n]: {self.vertices}")
        for i, j in itertools.combinations(self.vertices, 2):
            if not g.has_edge(i, j):
                raise WitnessError(f"{self.vertices} is not a clique of {g}: missing {i}-{j}")


@dataclass(frozen=True)
class ColoringWitness:
    """Map ``[n] -> [xi]``; ``colors[i-1]`` is the color of vertex ``i``."""

    colors: tuple[int, ...]

    def r_bits(self, vs: VarSpace) -> int:
        bits = 0
        for i, c in enumerate(self.colors, start=1):
            bits |= 1 << (vs.r(i, c) - 1)
        return bits

    def validate(self, g: Graph, vs: VarSpace) -> None:
        if len(self.colors) != vs.n or any(not 1 <= c <= vs.xi for c in self.colors):
            raise WitnessError(f"not a map [n] -> [xi]: {self.colors}")
        for i, j in g.edges():
            if self.colors[i - 1] == self.colors[j - 1]:
                raise WitnessError(f"edge {i}-{j} is monochromatic under {self.colors}")


def is_in_U(g: Graph, vs: VarSpace) -> Optional[CliqueWitness]:
    """Lexicographically first ``omega``-clique of ``g``, or None."""
    for cand in itertools.combinations(range(1, g.n + 1), vs.omega):
        if all(g.has_edge(i, j) for i, j in itertools.combinations(cand, 2)):
            return CliqueWitness(cand)
    return None


def is_in_V(g: Graph, vs: VarSpace) -> Optional[ColoringWitness]:
    """Lexicographically first proper ``xi``-coloring of ``g``, or None."""
    edges = g.edges()
    for colors in itertools.product(range(1, vs.xi + 1), repeat=g.n):
        if all(colors[i - 1] != colors[j - 1] for i, j in edges):
            return ColoringWitness(colors)
    return None


def witness_assignments(g: Graph, wit: Union[CliqueWitness, ColoringWitness], vs: VarSpace) -> Assignment:
    """Partial assignment to the q-block (clique) or r-block (coloring) induced
    by a witness, validated against every clause of the matching side."""
    wit.validate(g, vs)
    if isinstance(wit, CliqueWitness):
        block, bits, side = "q", wit.q_bits(vs), generate_clique_clauses(vs)
    else:
        block, bits, side = "r", wit.r_bits(vs), generate_color_clauses(vs)
    a = Assignment(vs, bits, vs.block_mask(block))
    full = Assignment(vs, g.bits | bits, vs.block_mask("p") | vs.block_mask(block))
    if not eval_cnf(side, full):
        raise WitnessError(f"witness assignment does not satisfy the {block}-side clauses")
    return a


def w_assignment(v_graph: Graph, qwit: Union[CliqueWitness, int], rwit: Union[ColoringWitness, int],
                 vs: VarSpace) -> Assignment:
    """Total assignment whose p-part is ``v_graph``, q-part ``q^u`` and r-part ``r^v``.

    Witnesses may be passed as objects or as raw q-/r-block bits in the layout
    of the full assignment.
    """
    if v_graph.n != vs.n:
        raise ValueError("graph size does not match the variable space")
    qbits = qwit.q_bits(vs) if isinstance(qwit, CliqueWitness) else qwit
    rbits = rwit.r_bits(vs) if isinstance(rwit, ColoringWitness) else rwit
    if qbits & ~vs.block_mask("q") or rbits & ~vs.block_mask("r"):
        raise ValueError("witness bits fall outside their block")
    return Assignment(vs, v_graph.bits | qbits | rbits)


# -- extended DIMACS ----------------------------------------------------------

def format_dimacs(cnf: Sequence[Iterable[int]], vs: Optional[VarSpace] = None) -> str:
    lines = []
    nvars = vs.num_vars if vs is not None else max((abs(l) for c in cnf for l in c), default=0)
    if vs is not None:
        for b in "pqr":
            lo, hi = vs.block_range(b)
            lines.append(f"c block {b} {lo}..{hi}")
        lines.append(f"c params n={vs.n} omega={vs.omega} xi={vs.xi}")
    lines.append(f"p cnf {nvars} {len(cnf)}")
    for c in cnf:
        lits = sorted(c, key=lambda l: (abs(l), l))
        lines.append(" ".join(map(str, lits + [0])))
    return "\n".join(lines) + "\n"


class DimacsError(ValueError):
    pass


@dataclass
class DimacsFile:
    clauses: tuple
    num_vars: int
    vs: Optional[VarSpace] = None
    blocks: dict = field(default_factory=dict)


def parse_dimacs(text: str) -> DimacsFile:
    header = None
    params = {}
    blocks = {}
    clauses = []
    current = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("c"):
            parts = line.split()
            if len(parts) == 4 and parts[1] == "block":
                lo, _, hi = parts[3].partition("..")
                blocks[parts[2]] = (int(lo), int(hi))
            elif len(parts) >= 2 and parts[1] == "params":
                for kv in parts[2:]:
                    k, _, v = kv.partition("=")
                    params[k] = int(v)
            continue
        if line.startswith("p"):
            parts = line.split()
            if len(parts) != 4 or parts[1] != "cnf":
                raise DimacsError(f"line {lineno}: bad header {line!r}")
            header = (int(parts[2]), int(parts[3]))
            continue
        if header is None:
            raise DimacsError(f"line {lineno}: clause before header")
        try:
            nums = [int(x) for x in line.split()]
        except ValueError:
            raise DimacsError(f"line {lineno}: not an integer list") from None
        for x in nums:
            if x == 0:
                clauses.append(frozenset(current))
                current = []
            else:
                if abs(x) > header[0]:
                    raise DimacsError(f"line {lineno}: variable {abs(x)} exceeds header count")
                current.append(x)
    if header is None:
        raise DimacsError("missing 'p cnf' header")
    if current:
        raise DimacsError("unterminated final clause")
    if len(clauses) != header[1]:
        raise DimacsError(f"header announces {header[1]} clauses, found {len(clauses)}")
    vs = None
    if {"n", "omega", "xi"} <= params.keys():
        vs = VarSpace(params["n"], params["omega"], params["xi"], checked=False)
        for b, rng in blocks.items():
            if vs.block_range(b) != rng:
                raise DimacsError(f"block {b} range {rng} disagrees with params")
        if vs.num_vars != header[0]:
            raise DimacsError("variable count disagrees with params")
    return DimacsFile(tuple(clauses), header[0], vs, blocks)


def plain_space(num_vars: int) -> VarSpace:
    """An unchecked space whose p-block has room for variables ``1..num_vars``
    (used for generic CNFs that carry no clique-coloring structure)."""
    n = 2
    while comb(n, 2) < num_vars:
        n += 1
    return VarSpace(n, 0, 0, checked=False)
