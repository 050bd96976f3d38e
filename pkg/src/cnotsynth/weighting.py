"""Edge weighting of coupling graphs from parity-matrix rows.

An edge (u, v) is weighted by the Hamming weight of a symmetric 2-bit
boolean function applied elementwise to rows u and v of the matrix.
There are eight such functions; ZERO is constructible but rejected for
weighting (it scores every edge 0) and ONE reproduces the unweighted
algorithm (every edge scores n).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .gf2 import ParityMatrix, hamming_weight
from .topology import CouplingGraph

__all__ = [
    "WeightRule",
    "RULES",
    "USABLE_RULES",
    "VANDAELE",
    "get_rule",
    "edge_weight",
    "compute_all_weights",
    "update_all_weights",
    "vandaele_weight",
]


@dataclass(frozen=True)
class WeightRule:
    """Symmetric 2-bit boolean function given by its truth table.

    ``f00``, ``f01``, ``f11`` are the outputs on inputs 00, 01/10 and 11;
    symmetry (01 and 10 agreeing) is built into the representation.
    """

    name: str
    f00: int
    f01: int
    f11: int

    def apply(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        """Elementwise application to bit arrays of the same shape."""
        fast = _FAST_APPLY.get((self.f00, self.f01, self.f11))
        if fast is not None:
            return fast(np.asarray(x, dtype=np.uint8), np.asarray(y, dtype=np.uint8))
        out = np.empty(np.broadcast(x, y).shape, dtype=np.uint8)
        both = x & y
        either = x | y
        # Select by number of ones among the two inputs.
        out[...] = self.f00
        np.copyto(out, np.uint8(self.f01), where=(either == 1) & (both == 0))
        np.copyto(out, np.uint8(self.f11), where=both == 1)
        return out

    def __str__(self) -> str:
        return self.name


# Keyed by truth table so custom-but-equivalent rules also benefit.
_FAST_APPLY = {
    (0, 0, 0): lambda x, y: np.zeros(np.broadcast(x, y).shape, dtype=np.uint8),
    (0, 0, 1): lambda x, y: x & y,
    (0, 1, 0): lambda x, y: x ^ y,
    (0, 1, 1): lambda x, y: x | y,
    (1, 0, 0): lambda x, y: (x | y) ^ 1,
    (1, 0, 1): lambda x, y: (x ^ y) ^ 1,
    (1, 1, 0): lambda x, y: (x & y) ^ 1,
    (1, 1, 1): lambda x, y: np.ones(np.broadcast(x, y).shape, dtype=np.uint8),
}

RULES: dict[str, WeightRule] = {
    r.name: r
    for r in [
        WeightRule("zero", 0, 0, 0),
        WeightRule("and", 0, 0, 1),
        WeightRule("xor", 0, 1, 0),
        WeightRule("or", 0, 1, 1),
        WeightRule("nor", 1, 0, 0),
        WeightRule("nxor", 1, 0, 1),
        WeightRule("nand", 1, 1, 0),
        WeightRule("one", 1, 1, 1),
    ]
}

# The seven rules admissible for synthesis, in the registry's fixed order.
USABLE_RULES: tuple[str, ...] = ("and", "xor", "or", "nor", "nxor", "nand", "one")

# Sentinel name for the spanning-tree weighting of phase-polynomial work,
# kept as an optional comparison rule.
VANDAELE = "vandaele"


def get_rule(name: str) -> WeightRule:
    try:
        return RULES[name.lower()]
    except KeyError:
        raise ValueError(f"unknown weight rule {name!r}") from None


def edge_weight(m: ParityMatrix, edge: tuple[int, int], rule: WeightRule) -> int:
    """Hamming weight of ``rule`` applied to the rows of the edge endpoints."""
    u, v = edge
    if u == v:
        raise ValueError("edge endpoints must differ")
    if rule.name == "zero":
        raise ValueError("the zero rule assigns no useful weights and is rejected")
    return hamming_weight(rule.apply(m.row(u), m.row(v)))


def vandaele_weight(m: ParityMatrix, edge: tuple[int, int], clamp: bool = True) -> int:
    """h(M_u xor M_v) - h(M_v); negative values clamped at 0 by default."""
    u, v = edge
    w = hamming_weight(m.row(u) ^ m.row(v)) - hamming_weight(m.row(v))
    return max(w, 0) if clamp else w


def compute_all_weights(m: ParityMatrix, g: CouplingGraph, rule) -> np.ndarray:
    """Weights for every edge of ``g`` in canonical edge order.

    ``rule`` is a WeightRule or the string "vandaele".
    """
    us, vs, _ = g.edge_arrays()
    n = m.n
    if isinstance(rule, str):
        if rule.lower() == VANDAELE:
            both, s = _gram(m)
            w = s[us] - 2 * both[us, vs]
            return np.maximum(w, 0.0)
        rule = get_rule(rule)
    if rule.name == "zero":
        raise ValueError("the zero rule assigns no useful weights and is rejected")
    table = (rule.f00, rule.f01, rule.f11)
    if table == (1, 1, 1):
        return np.full(len(us), float(n))
    # Every symmetric rule weight is a function of |u & v| and the row
    # weights, so on dense graphs one small matrix product covers all
    # edges at once; on sparse graphs elementwise work on the edge list
    # is cheaper.
    if table in _GRAM_WEIGHT and 4 * len(us) > n * n:
        both, s = _gram(m)
        return _GRAM_WEIGHT[table](both[us, vs], s[us], s[vs], float(n))
    return rule.apply(m.bits[us], m.bits[vs]).sum(axis=1).astype(np.float64)


def _gram(m: ParityMatrix) -> tuple[np.ndarray, np.ndarray]:
    """(pairwise |row_u & row_v| matrix, per-row Hamming weights)."""
    bits_f = m.bits.astype(np.float32)
    both = bits_f @ bits_f.T
    return both, bits_f.sum(axis=1)


_GRAM_WEIGHT = {
    (0, 0, 1): lambda g, su, sv, n: np.asarray(g, dtype=np.float64),
    (0, 1, 0): lambda g, su, sv, n: np.asarray(su + sv - 2 * g, dtype=np.float64),
    (0, 1, 1): lambda g, su, sv, n: np.asarray(su + sv - g, dtype=np.float64),
    (1, 1, 0): lambda g, su, sv, n: np.asarray(n - g, dtype=np.float64),
    (1, 0, 1): lambda g, su, sv, n: np.asarray(n - su - sv + 2 * g, dtype=np.float64),
    (1, 0, 0): lambda g, su, sv, n: np.asarray(n - su - sv + g, dtype=np.float64),
}


def update_all_weights(m: ParityMatrix, g: CouplingGraph, rule) -> None:
    """Recompute every edge weight of ``g`` in place from the matrix rows."""
    g.set_all_weights(compute_all_weights(m, g, rule))
