"""Tests for the synthesis algorithms and circuit utilities."""

import numpy as np
import pytest

from cnotsynth import gf2, topology as tp
from cnotsynth.synthesis import (
    CnotCircuit,
    InfeasibleTopologyError,
    SynthesisOptions,
    depth,
    emit,
    parse_circuit,
    pmh,
    rowcol,
    steiner_gauss,
    synthesize,
    verify,
)

# Golden pair: the five-gate example circuit and its parity matrix.
GOLDEN_GATES = [(1, 3), (0, 1), (3, 2), (2, 1), (1, 0)]
GOLDEN_MATRIX = gf2.from_rows(["0011", "1011", "0111", "0101"])

SIX_BY_SIX = gf2.from_rows(
    ["100110", "001011", "011111", "100011", "110011", "010011"]
)


def test_golden_circuit_verifies():
    circuit = CnotCircuit(4, GOLDEN_GATES)
    assert verify(circuit, GOLDEN_MATRIX)
    assert circuit.size == 5
    assert circuit.depth == 4


def test_verify_edge_cases():
    empty = CnotCircuit(3, [])
    assert verify(empty, gf2.identity(3))
    assert not verify(empty, gf2.from_rows(["110", "010", "001"]))
    with pytest.raises(ValueError):
        verify(empty, gf2.identity(4))


def test_depth():
    assert depth(CnotCircuit(2, [])) == 0
    assert depth(CnotCircuit(2, [(0, 1)])) == 1
    # Disjoint gates run in parallel.
    par = CnotCircuit(6, [(0, 1), (2, 3), (4, 5)])
    assert depth(par) == 1
    chain = CnotCircuit(3, [(0, 1), (1, 2), (0, 1)])
    assert depth(chain) == 3
    assert all(depth(c) <= c.size for c in [par, chain])


def test_circuit_validation():
    with pytest.raises(ValueError):
        CnotCircuit(2, [(0, 0)])
    with pytest.raises(ValueError):
        CnotCircuit(2, [(0, 2)])


# -- rowcol -------------------------------------------------------------------


def test_rowcol_identity_is_empty():
    for g in [tp.make_line(4), tp.make_complete(5), tp.make_grid(2, 3)]:
        c = rowcol(gf2.identity(g.n_vertices), g)
        assert c.size == 0


def test_rowcol_golden_matrix_on_complete():
    c = rowcol(GOLDEN_MATRIX, tp.make_complete(4), validate=True)
    assert verify(c, GOLDEN_MATRIX)


def test_rowcol_six_by_six_weighted_vs_unweighted():
    g = tp.make_complete(6)
    unweighted = rowcol(SIX_BY_SIX, g, rule=None, validate=True)
    weighted = rowcol(SIX_BY_SIX, g, rule="nand", validate=True)
    assert verify(unweighted, SIX_BY_SIX)
    assert verify(weighted, SIX_BY_SIX)
    assert weighted.size <= unweighted.size


def test_rowcol_respects_connectivity():
    rng = np.random.default_rng(31)
    g = tp.make_line(6)
    edge_set = set(g.edges())
    for _ in range(5):
        m = gf2.random_invertible(6, rng)
        c = rowcol(m, g)
        assert verify(c, m)
        for ctl, tgt in c.gates:
            assert (min(ctl, tgt), max(ctl, tgt)) in edge_set


def test_rowcol_all_rules_verify():
    rng = np.random.default_rng(32)
    g = tp.make_grid(3, 3)
    m = gf2.random_invertible(9, rng)
    for rule in ["and", "xor", "or", "nor", "nxor", "nand", "one", "vandaele", None]:
        c = rowcol(m, g, rule=rule, validate=True)
        assert verify(c, m)


def test_rowcol_unweighted_equals_rule_one():
    rng = np.random.default_rng(33)
    for g in [tp.make_grid(3, 3), tp.make_complete(9), tp.make_heavy_hex(1, 1)]:
        m = gf2.random_invertible(g.n_vertices, rng)
        assert rowcol(m, g, rule=None).gates == rowcol(m, g, rule="one").gates


def test_rowcol_does_not_mutate_inputs():
    rng = np.random.default_rng(34)
    g = tp.make_grid(2, 3)
    m = gf2.random_invertible(6, rng)
    m_before = m.copy()
    edges_before = g.edges()
    weights_before = g.edge_arrays()[2].copy()
    rowcol(m, g, rule="nand")
    assert m == m_before
    assert g.edges() == edges_before
    assert np.array_equal(g.edge_arrays()[2], weights_before)


def test_rowcol_input_validation():
    with pytest.raises(ValueError):
        rowcol(gf2.ParityMatrix([[1, 1], [1, 1]]), tp.make_line(2))
    disconnected = tp.CouplingGraph(range(4), [(0, 1), (2, 3)])
    with pytest.raises(ValueError):
        rowcol(gf2.identity(4), disconnected)
    with pytest.raises(ValueError):
        rowcol(gf2.identity(3), tp.make_line(4))
    with pytest.raises(ValueError):
        rowcol(gf2.identity(3), tp.make_line(3), rule="zero")


def test_rowcol_zero_rule_rejected_via_options():
    with pytest.raises(ValueError):
        synthesize(
            gf2.identity(3), tp.make_line(3), SynthesisOptions("rowcol", "zero")
        )


# -- steiner_gauss ------------------------------------------------------------


def test_steiner_gauss_identity_is_empty():
    assert steiner_gauss(gf2.identity(5), tp.make_line(5)).size == 0


def test_steiner_gauss_verifies_on_many_topologies():
    rng = np.random.default_rng(41)
    for g in [
        tp.make_line(7),
        tp.make_grid(3, 3),
        tp.make_complete(8),
        tp.make_barbell(3, 1),
        tp.make_barbell(3, 2),
    ]:
        edge_set = set(g.edges())
        for rule in [None, "or", "nand"]:
            m = gf2.random_invertible(g.n_vertices, rng)
            c = steiner_gauss(m, g, rule=rule, validate=True)
            assert verify(c, m)
            for ctl, tgt in c.gates:
                assert (min(ctl, tgt), max(ctl, tgt)) in edge_set


def test_steiner_gauss_heavy_hex_infeasible():
    # Bridge qubits make monotone descent impossible for some columns.
    g = tp.make_heavy_hex(1, 1)
    rng = np.random.default_rng(42)
    saw_infeasible = False
    for _ in range(10):
        m = gf2.random_invertible(g.n_vertices, rng)
        try:
            steiner_gauss(m, g)
        except InfeasibleTopologyError:
            saw_infeasible = True
            break
    assert saw_infeasible


def test_steiner_gauss_unweighted_equals_rule_one():
    rng = np.random.default_rng(43)
    g = tp.make_grid(3, 3)
    m = gf2.random_invertible(9, rng)
    assert steiner_gauss(m, g, rule=None).gates == steiner_gauss(m, g, rule="one").gates


# -- pmh ----------------------------------------------------------------------


def test_pmh_identity_and_golden():
    assert pmh(gf2.identity(6)).size == 0
    c = pmh(GOLDEN_MATRIX, validate=True)
    assert verify(c, GOLDEN_MATRIX)


def test_pmh_random_verifies():
    rng = np.random.default_rng(51)
    for n in [3, 8, 16, 33]:
        for section in [None, 1, 2, 4]:
            m = gf2.random_invertible(n, rng)
            c = pmh(m, section_size=section, validate=True)
            assert verify(c, m)


def test_pmh_section_size_validation():
    with pytest.raises(ValueError):
        pmh(gf2.identity(4), section_size=0)


# -- dispatcher ---------------------------------------------------------------


def test_synthesize_dispatch():
    rng = np.random.default_rng(61)
    m = gf2.random_invertible(5, rng)
    g = tp.make_complete(5)
    for algo in ["rowcol", "steinergauss", "pmh"]:
        c = synthesize(m, g, SynthesisOptions(algo, "nand" if algo != "pmh" else None))
        assert verify(c, m)
    with pytest.raises(ValueError):
        SynthesisOptions("nope")
    with pytest.raises(ValueError):
        synthesize(m, tp.make_line(5), SynthesisOptions("pmh"))
    with pytest.raises(ValueError):
        synthesize(m, None, SynthesisOptions("rowcol"))


# -- serialization ------------------------------------------------------------


def test_emit_roundtrip():
    c = CnotCircuit(4, GOLDEN_GATES)
    for fmt in ["gates", "qasm"]:
        text = emit(c, fmt)
        assert parse_circuit(text) == c
    empty = CnotCircuit(3, [])
    assert parse_circuit(emit(empty, "gates")) == empty
    qasm = emit(empty, "qasm")
    assert qasm.splitlines() == [
        "OPENQASM 2.0;",
        'include "qelib1.inc";',
        "qreg q[3];",
    ]
    one = CnotCircuit(2, [(0, 1)])
    assert emit(one, "qasm").splitlines()[-1] == "cx q[0],q[1];"
    with pytest.raises(ValueError):
        emit(c, "binary")
    with pytest.raises(ValueError):
        parse_circuit("garbage")


# -- cross-cutting invariants --------------------------------------------------


def test_replay_of_recorded_sequence_reaches_identity():
    rng = np.random.default_rng(71)
    g = tp.make_grid(3, 3)
    m = gf2.random_invertible(9, rng)
    c = rowcol(m, g, rule="nand")
    # The recorded reduction sequence is the reversed gate list.
    replayed = gf2.apply_row_ops(m, list(reversed(c.gates)))
    assert replayed.is_identity()


def test_rowcol_invariants_many_seeds():
    rng = np.random.default_rng(72)
    graphs = [tp.make_grid(3, 3), tp.make_barbell(4, 2), tp.make_heavy_hex(1, 1)]
    for trial in range(12):
        g = graphs[trial % len(graphs)]
        m = gf2.random_invertible(g.n_vertices, rng)
        c = rowcol(m, g, rule="nand", validate=True)
        assert verify(c, m)


def test_runtime_scales_polynomially():
    import time

    rng = np.random.default_rng(73)
    m50 = gf2.random_invertible(50, rng)
    m100 = gf2.random_invertible(100, rng)
    g50, g100 = tp.make_complete(50), tp.make_complete(100)
    rowcol(m50, g50, rule="nand")  # warm up
    t0 = time.perf_counter()
    rowcol(m50, g50, rule="nand")
    t50 = time.perf_counter() - t0
    t0 = time.perf_counter()
    rowcol(m100, g100, rule="nand")
    t100 = time.perf_counter() - t0
    assert t100 / t50 < 20.0
