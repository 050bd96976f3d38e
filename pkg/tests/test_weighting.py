"""Tests for parity-row edge weighting rules."""

import itertools

import numpy as np
import pytest

from cnotsynth import gf2, topology as tp, weighting as wt


def test_truth_tables():
    # Inputs (00, 01/10, 11) per rule.
    expected = {
        "zero": (0, 0, 0),
        "and": (0, 0, 1),
        "xor": (0, 1, 0),
        "or": (0, 1, 1),
        "nor": (1, 0, 0),
        "nxor": (1, 0, 1),
        "nand": (1, 1, 0),
        "one": (1, 1, 1),
    }
    for name, (f00, f01, f11) in expected.items():
        rule = wt.get_rule(name)
        assert (rule.f00, rule.f01, rule.f11) == (f00, f01, f11)
        x = np.array([0, 0, 1, 1], dtype=np.uint8)
        y = np.array([0, 1, 0, 1], dtype=np.uint8)
        assert list(rule.apply(x, y)) == [f00, f01, f01, f11]


def test_rule_symmetry():
    rng = np.random.default_rng(0)
    x = rng.integers(0, 2, size=32, dtype=np.uint8)
    y = rng.integers(0, 2, size=32, dtype=np.uint8)
    for name in wt.RULES:
        rule = wt.RULES[name]
        assert np.array_equal(rule.apply(x, y), rule.apply(y, x))


def test_edge_weight_examples():
    m = gf2.from_rows(["1100", "1010", "0000", "0000"])
    assert wt.edge_weight(m, (0, 1), wt.get_rule("nand")) == 3
    assert wt.edge_weight(m, (0, 1), wt.get_rule("xor")) == 2
    assert wt.edge_weight(m, (0, 1), wt.get_rule("xor")) == gf2.hamming_distance(
        m.row(0), m.row(1)
    )
    n = m.n
    assert wt.edge_weight(m, (2, 3), wt.get_rule("one")) == n
    with pytest.raises(ValueError):
        wt.edge_weight(m, (1, 1), wt.get_rule("or"))
    with pytest.raises(ValueError):
        wt.edge_weight(m, (0, 1), wt.get_rule("zero"))


def test_edge_weight_bounds_and_symmetry():
    rng = np.random.default_rng(8)
    m = gf2.random_invertible(6, rng)
    for name in wt.USABLE_RULES:
        rule = wt.get_rule(name)
        for u, v in itertools.combinations(range(6), 2):
            w = wt.edge_weight(m, (u, v), rule)
            assert 0 <= w <= m.n
            assert w == wt.edge_weight(m, (v, u), rule)


def test_update_all_weights_identity_matrix():
    m = gf2.identity(5)
    g = tp.make_complete(5)
    wt.update_all_weights(m, g, wt.get_rule("nand"))
    us, vs, ws = g.edge_arrays()
    assert all(w == 5 for w in ws)  # NAND of distinct unit rows is all-ones
    wt.update_all_weights(m, g, wt.get_rule("and"))
    assert all(w == 0 for w in g.edge_arrays()[2])
    wt.update_all_weights(m, g, wt.get_rule("xor"))
    assert all(w == 2 for w in g.edge_arrays()[2])


def test_compute_all_weights_matches_scalar():
    rng = np.random.default_rng(77)
    m = gf2.random_invertible(7, rng)
    g = tp.make_grid(2, 3)
    g.add_edge(0, 3)
    for name in wt.USABLE_RULES:
        rule = wt.get_rule(name)
        ws = wt.compute_all_weights(m, g, rule)
        for (u, v), w in zip(g.edges(), ws):
            assert w == wt.edge_weight(m, (u, v), rule)


def test_one_rule_preserves_steiner_tree():
    rng = np.random.default_rng(15)
    m = gf2.random_invertible(9, rng)
    g_unit = tp.make_grid(3, 3)
    g_one = tp.make_grid(3, 3)
    wt.update_all_weights(m, g_one, wt.get_rule("one"))
    for terms in [(0, 8), (0, 4, 8), (1, 3, 5, 7)]:
        t_unit = tp.steiner_tree(g_unit, terms)
        t_one = tp.steiner_tree(g_one, terms)
        assert t_unit.parent == t_one.parent
        assert t_unit.root == t_one.root


def test_vandaele_weight():
    m = gf2.from_rows(["110", "110", "000"])
    # Equal rows: h(0) - h(row) = -2, clamped at 0.
    assert wt.vandaele_weight(m, (0, 1)) == 0
    assert wt.vandaele_weight(m, (0, 1), clamp=False) == -2
    # Zero second row: weight is h of the first row.
    assert wt.vandaele_weight(m, (0, 2)) == 2
    unit = gf2.identity(4)
    assert wt.vandaele_weight(unit, (0, 1)) == 1  # 2 - 1
    g = tp.make_line(3)
    ws = wt.compute_all_weights(m, g, "vandaele")
    assert list(ws) == [0.0, 2.0]


def test_get_rule_errors():
    with pytest.raises(ValueError):
        wt.get_rule("nope")
    assert wt.get_rule("NAND").name == "nand"
