"""CNOT circuit synthesis under coupling constraints.

Three synthesizers are provided:

* ``rowcol`` eliminates one qubit at a time, clearing its matrix column
  and row with Steiner-tree-guided row additions, then deleting the
  vertex from the graph.  Works on any connected coupling graph.
* ``steiner_gauss`` reduces the matrix to upper triangular form column
  by column, then reduces the transpose the same way using trees that
  descend monotonically in the elimination order (required to keep the
  triangular form).  Raises when no such tree exists, which happens on
  heavy-hex style graphs.
* ``pmh`` is the classic section-partitioned Gaussian elimination
  baseline; it assumes all-to-all connectivity.

Both tree-based algorithms optionally reweight the coupling graph from
the current matrix rows right before every tree search.

Row operations are recorded while reducing the matrix M to the identity;
the circuit implementing M is the reversed operation list with each
(src, dst) row addition realized as CNOT(control=src, target=dst).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import gf2
from .gf2 import ParityMatrix
from .topology import (
    CouplingGraph,
    articulation_points,
    decreasing_steiner_tree,
    steiner_tree,
)
from .weighting import WeightRule, compute_all_weights, get_rule

__all__ = [
    "CnotCircuit",
    "SynthesisOptions",
    "InfeasibleTopologyError",
    "rowcol",
    "steiner_gauss",
    "pmh",
    "synthesize",
    "verify",
    "depth",
    "emit",
    "parse_circuit",
]

ALGORITHMS = ("rowcol", "steinergauss", "pmh")


class InfeasibleTopologyError(Exception):
    """The synthesis route requires a tree this topology cannot provide."""


@dataclass(frozen=True)
class CnotCircuit:
    """Ordered CNOT gate list on ``n`` qubits, (control, target) pairs."""

    n: int
    gates: tuple[tuple[int, int], ...]

    def __init__(self, n: int, gates) -> None:
        object.__setattr__(self, "n", int(n))
        object.__setattr__(
            self, "gates", tuple((int(c), int(t)) for c, t in gates)
        )
        for c, t in self.gates:
            if c == t or not (0 <= c < self.n and 0 <= t < self.n):
                raise ValueError(f"bad gate ({c}, {t}) for n={self.n}")

    @property
    def size(self) -> int:
        return len(self.gates)

    @property
    def depth(self) -> int:
        return depth(self)

    def parity_matrix(self) -> ParityMatrix:
        """Parity matrix implemented by this circuit."""
        m = gf2.identity(self.n)
        for c, t in self.gates:
            m.bits[t] ^= m.bits[c]
        return m


def depth(circuit: CnotCircuit) -> int:
    """Number of layers under ASAP scheduling of independent gates."""
    levels = [0] * circuit.n
    d = 0
    for c, t in circuit.gates:
        layer = max(levels[c], levels[t]) + 1
        levels[c] = levels[t] = layer
        if layer > d:
            d = layer
    return d


def verify(circuit: CnotCircuit, m: ParityMatrix) -> bool:
    """True iff replaying the circuit on the identity reproduces ``m``."""
    if circuit.n != m.n:
        raise ValueError(f"dimension mismatch: circuit {circuit.n}, matrix {m.n}")
    return circuit.parity_matrix() == m


@dataclass(frozen=True)
class SynthesisOptions:
    """Algorithm selection plus weighting rule.

    ``rule`` is a rule name ("nand", ..., "one", "vandaele"), a WeightRule,
    or None for the plain unweighted algorithm.
    """

    algorithm: str = "rowcol"
    rule: str | WeightRule | None = None
    pmh_section_size: int | None = None

    def __post_init__(self):
        if self.algorithm not in ALGORITHMS:
            raise ValueError(f"unknown algorithm {self.algorithm!r}")


def _normalize_rule(rule):
    """Resolve a rule argument to a WeightRule, "vandaele", or None."""
    if rule is None:
        return None
    if isinstance(rule, WeightRule):
        resolved = rule
    elif isinstance(rule, str):
        name = rule.lower()
        if name in ("", "none", "unweighted"):
            return None
        if name == "vandaele":
            return "vandaele"
        resolved = get_rule(name)
    else:
        raise TypeError(f"bad rule {rule!r}")
    if resolved.name == "zero":
        raise ValueError("the zero rule is rejected for synthesis")
    return resolved


def _check_inputs(m: ParityMatrix, g: CouplingGraph) -> None:
    if g.vertices() != tuple(range(m.n)):
        raise ValueError(
            f"graph vertices must be exactly 0..{m.n - 1} to index matrix rows"
        )
    if not g.is_connected():
        raise ValueError("coupling graph must be connected")
    if not gf2.is_invertible(m):
        raise ValueError("matrix is not invertible over GF(2)")


def _refresh(g: CouplingGraph, m: ParityMatrix, rule) -> None:
    if rule is not None:
        g.set_all_weights(compute_all_weights(m, g, rule))


def _connected_without(adj: np.ndarray, skip: int) -> bool:
    """Is the graph minus vertex ``skip`` still connected?  ``adj`` is a
    dense uint8 adjacency matrix over the current vertices."""
    k = adj.shape[0]
    if k <= 2:
        return True
    active = np.ones(k, dtype=bool)
    active[skip] = False
    start = 0 if skip != 0 else 1
    reached = np.zeros(k, dtype=bool)
    reached[start] = True
    frontier = reached.astype(np.uint8)
    while True:
        hits = (adj @ frontier) > 0
        new = hits & active & ~reached
        if not new.any():
            break
        reached |= new
        frontier = reached.astype(np.uint8)
    return bool(reached[active].all())


def _first_noncut_vertex(g: CouplingGraph) -> int:
    """Smallest vertex whose removal keeps the graph connected.

    Every connected graph with >= 2 vertices has at least two non-cut
    vertices, so this always succeeds.
    """
    verts, mat = g.dense_adjacency()
    adj = np.isfinite(mat).astype(np.uint8)
    for idx, v in enumerate(verts):
        if _connected_without(adj, idx):
            return v
    raise AssertionError("connected graph without a non-cut vertex")


def _eliminate_column(w: ParityMatrix, tree, i: int, ops: list) -> None:
    """Clear column ``i`` at every tree node except the root ``i``.

    First pass fills missing 1s upward (child into parent where the
    parent still reads 0), second pass adds every parent's row into its
    children, leaving only the diagonal set.
    """
    bits = w.bits
    post = tree.postorder()
    for child, parent in post:
        if bits[child, i] == 1 and bits[parent, i] == 0:
            bits[parent] ^= bits[child]
            ops.append((child, parent))
    for child, parent in post:
        bits[child] ^= bits[parent]
        ops.append((parent, child))


def rowcol(
    m: ParityMatrix,
    g: CouplingGraph,
    rule: str | WeightRule | None = None,
    validate: bool = False,
) -> CnotCircuit:
    """Synthesize ``m`` on ``g`` by eliminating one qubit at a time.

    Per remaining non-cut vertex i (smallest first): refresh weights,
    clear column i through a Steiner tree over its 1-entries, refresh
    weights again, clear row i through a tree over the row combination
    solving M_i + e_i, then delete i from the graph.

    Args:
        m: Invertible parity matrix; not modified.
        g: Connected coupling graph on vertices 0..n-1; not modified.
        rule: Optional weighting rule applied before each tree search.
        validate: Re-check invariants with independent oracles each
            iteration (slow; meant for tests).

    Raises:
        ValueError: non-invertible matrix or disconnected/mislabeled graph.
    """
    _check_inputs(m, g)
    rule = _normalize_rule(rule)
    n = m.n
    w = m.copy()
    h = g.copy()
    ops: list[tuple[int, int]] = []

    # Transposed running inverse: the row combination clearing row i is
    # row i of W^-1, so tracking the inverse (one column XOR per row op)
    # replaces a fresh linear solve each iteration.
    inv_t = gf2.inverse(m).bits.T.copy()

    def op(src: int, dst: int) -> None:
        w.bits[dst] ^= w.bits[src]
        inv_t[src] ^= inv_t[dst]
        ops.append((src, dst))

    while h.n_vertices > 1:
        i = _first_noncut_vertex(h)
        if validate:
            assert i == min(set(h.vertices()) - articulation_points(h))

        active = np.fromiter(h.vertices(), dtype=np.intp)

        _refresh(h, w, rule)
        col_rows = active[w.bits[active, i] == 1]
        terminals = set(col_rows.tolist()) | {i}
        if len(terminals) > 1 or w.bits[i, i] == 0:
            tree = steiner_tree(h, terminals, root=i)
            post = tree.postorder()
            for child, parent in post:
                if w.bits[child, i] == 1 and w.bits[parent, i] == 0:
                    op(child, parent)
            for child, parent in post:
                op(parent, child)

        _refresh(h, w, rule)
        combo = set(np.nonzero(inv_t[:, i])[0].tolist()) - {i}
        if validate:
            assert combo == gf2.solve_combination(w, h.vertices(), i)
        if combo:
            tree = steiner_tree(h, combo | {i}, root=i)
            post = tree.postorder()
            for child, parent in tree.preorder():
                if child not in combo:
                    op(child, parent)
            for child, parent in post:
                op(child, parent)

        _assert_unit(w, i)
        h.delete_vertex(i)
        if validate:
            assert h.is_connected()

    last = h.vertices()[0]
    _assert_unit(w, last)
    if not w.is_identity():
        raise AssertionError("row operations did not reach the identity")
    return _circuit_from_ops(n, ops, m, g, validate)


def _assert_unit(w: ParityMatrix, i: int) -> None:
    if w.bits[i, i] != 1 or w.bits[i].sum() != 1 or w.bits[:, i].sum() != 1:
        raise AssertionError(
            f"row/column {i} not reduced to the unit vector; invariant broken"
        )


def _circuit_from_ops(n, ops, m, g, validate) -> CnotCircuit:
    circuit = CnotCircuit(n, list(reversed(ops)))
    if validate:
        assert verify(circuit, m)
        edge_set = set(g.edges())
        for c, t in circuit.gates:
            assert (min(c, t), max(c, t)) in edge_set
    return circuit


def steiner_gauss(
    m: ParityMatrix,
    g: CouplingGraph,
    rule: str | WeightRule | None = None,
    validate: bool = False,
) -> CnotCircuit:
    """Synthesize ``m`` on ``g`` via two triangular reduction phases.

    Phase 1 brings the matrix to upper triangular form column by column,
    each column cleared through a Steiner tree living on the not yet
    eliminated suffix of the vertex order.  Phase 2 transposes (now lower
    triangular) and repeats with trees whose paths ascend from the pivot,
    i.e. decreasing trees under the reversed elimination order; only such
    trees keep the matrix triangular.  The recorded phase-2 operations
    act on the transpose, so they are emitted swapped and reversed.

    Raises:
        InfeasibleTopologyError: some column needs a tree the topology
            cannot provide (disconnected suffix or no decreasing tree).
    """
    _check_inputs(m, g)
    rule = _normalize_rule(rule)
    n = m.n

    w = m.copy()
    ops1: list[tuple[int, int]] = []
    for i in range(n):
        below = np.nonzero(w.bits[i + 1 :, i])[0] + i + 1
        terminals = set(below.tolist()) | {i}
        if len(terminals) == 1 and w.bits[i, i] == 1:
            continue
        suffix = g.subgraph(range(i, n))
        _refresh(suffix, w, rule)
        try:
            tree = steiner_tree(suffix, terminals, root=i)
        except ValueError as exc:
            raise InfeasibleTopologyError(
                f"column {i}: terminals not connected in the remaining "
                f"vertex suffix ({exc})"
            ) from None
        _eliminate_column(w, tree, i, ops1)
        if w.bits[i, i] != 1 or w.bits[i + 1 :, i].any():
            raise AssertionError(f"column {i} not upper-triangularized")

    if np.tril(w.bits, -1).any():
        raise AssertionError("phase 1 did not reach upper triangular form")

    lower = gf2.transpose(w)
    ops2: list[tuple[int, int]] = []
    for i in range(n):
        below = np.nonzero(lower.bits[i + 1 :, i])[0] + i + 1
        if below.size == 0:
            continue
        suffix = g.subgraph(range(i, n))
        _refresh(suffix, lower, rule)
        terminals = set(below.tolist()) | {i}
        ordering = {v: n - 1 - v for v in suffix.vertices()}
        tree = decreasing_steiner_tree(suffix, terminals, root=i, ordering=ordering)
        if tree is None:
            raise InfeasibleTopologyError(
                f"column {i}: no decreasing Steiner tree for terminals "
                f"{sorted(terminals)}"
            )
        pre = tree.preorder()
        for child, parent in pre:
            if lower.bits[child, i] == 0:
                lower.bits[child] ^= lower.bits[parent]
                ops2.append((parent, child))
        for child, parent in reversed(pre):
            lower.bits[child] ^= lower.bits[parent]
            ops2.append((parent, child))
        if lower.bits[i + 1 :, i].any():
            raise AssertionError(f"column {i} not cleared in phase 2")

    if not lower.is_identity():
        raise AssertionError("phase 2 did not reach the identity")

    ops = ops1 + [(dst, src) for src, dst in reversed(ops2)]
    if validate:
        assert gf2.apply_row_ops(m, ops).is_identity()
    return _circuit_from_ops(n, ops, m, g, validate)


def _pmh_lower(bits: np.ndarray, section: int, ops: list) -> None:
    """Section-partitioned lower elimination; ``bits`` becomes upper
    triangular in place."""
    n = bits.shape[0]
    for s0 in range(0, n, section):
        s1 = min(s0 + section, n)
        seen: dict[bytes, int] = {}
        for r in range(s0, n):
            sub = bits[r, s0:s1]
            if not sub.any():
                continue
            patt = sub.tobytes()
            first = seen.get(patt)
            if first is None:
                seen[patt] = r
            else:
                bits[r] ^= bits[first]
                ops.append((first, r))
        for col in range(s0, s1):
            if bits[col, col] == 0:
                nz = np.nonzero(bits[col + 1 :, col])[0]
                if nz.size == 0:
                    raise ValueError("matrix is singular")
                src = col + 1 + int(nz[0])
                bits[col] ^= bits[src]
                ops.append((src, col))
            rows = np.nonzero(bits[col + 1 :, col])[0]
            for r in rows:
                dst = col + 1 + int(r)
                bits[dst] ^= bits[col]
                ops.append((col, dst))


def pmh(
    m: ParityMatrix,
    section_size: int | None = None,
    validate: bool = False,
) -> CnotCircuit:
    """Patel-Markov-Hayes synthesis (all-to-all connectivity).

    Gaussian elimination over column sections: duplicate section
    patterns are cancelled against their first occurrence before the
    per-column elimination, halving the leading cost term.  The default
    section size is round(log2(n) / 2), clamped to at least 1.
    """
    if not gf2.is_invertible(m):
        raise ValueError("matrix is not invertible over GF(2)")
    n = m.n
    if section_size is None:
        section_size = max(1, round(math.log2(n) / 2)) if n > 1 else 1
    if section_size < 1:
        raise ValueError("section size must be >= 1")

    w = m.copy()
    ops1: list[tuple[int, int]] = []
    _pmh_lower(w.bits, section_size, ops1)
    lower = gf2.transpose(w)
    ops2: list[tuple[int, int]] = []
    _pmh_lower(lower.bits, section_size, ops2)
    if not lower.is_identity():
        raise AssertionError("PMH elimination did not reach the identity")

    ops = ops1 + [(dst, src) for src, dst in reversed(ops2)]
    circuit = CnotCircuit(n, list(reversed(ops)))
    if validate:
        assert verify(circuit, m)
    return circuit


def synthesize(
    m: ParityMatrix,
    g: CouplingGraph | None,
    opts: SynthesisOptions,
    validate: bool = False,
) -> CnotCircuit:
    """Dispatch to the selected synthesis algorithm."""
    if opts.algorithm == "pmh":
        if g is not None and g.n_edges != g.n_vertices * (g.n_vertices - 1) // 2:
            raise ValueError("pmh assumes all-to-all connectivity")
        return pmh(m, section_size=opts.pmh_section_size, validate=validate)
    if g is None:
        raise ValueError(f"{opts.algorithm} requires a coupling graph")
    if opts.algorithm == "rowcol":
        return rowcol(m, g, rule=opts.rule, validate=validate)
    return steiner_gauss(m, g, rule=opts.rule, validate=validate)


# -- serialization -----------------------------------------------------------


def emit(circuit: CnotCircuit, fmt: str = "gates") -> str:
    """Serialize a circuit; ``fmt`` is "gates" or "qasm"."""
    if fmt == "gates":
        lines = [f"n {circuit.n}"]
        lines += [f"{c} {t}" for c, t in circuit.gates]
        return "\n".join(lines) + "\n"
    if fmt == "qasm":
        lines = [
            "OPENQASM 2.0;",
            'include "qelib1.inc";',
            f"qreg q[{circuit.n}];",
        ]
        lines += [f"cx q[{c}],q[{t}];" for c, t in circuit.gates]
        return "\n".join(lines) + "\n"
    raise ValueError(f"unknown format {fmt!r}")


def parse_circuit(text: str) -> CnotCircuit:
    """Parse either emit() format back into a circuit."""
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise ValueError("empty circuit text")
    if lines[0].startswith("OPENQASM"):
        n = None
        gates = []
        for ln in lines[1:]:
            if ln.startswith("qreg"):
                n = int(ln[ln.index("[") + 1 : ln.index("]")])
            elif ln.startswith("cx"):
                body = ln[2:].strip().rstrip(";")
                c_part, t_part = body.split(",")
                c = int(c_part[c_part.index("[") + 1 : c_part.index("]")])
                t = int(t_part[t_part.index("[") + 1 : t_part.index("]")])
                gates.append((c, t))
            elif ln.startswith("include"):
                continue
            else:
                raise ValueError(f"unsupported qasm line {ln!r}")
        if n is None:
            raise ValueError("qasm text has no qreg declaration")
        return CnotCircuit(n, gates)
    if lines[0].startswith("n "):
        n = int(lines[0][2:])
        gates = []
        for ln in lines[1:]:
            c, t = ln.split()
            gates.append((int(c), int(t)))
        return CnotCircuit(n, gates)
    raise ValueError("unrecognized circuit text")
