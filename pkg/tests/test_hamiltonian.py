import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from spinconc import preset
from spinconc.cluster import ClusterGraph
from spinconc.concurrence import DickeParams, dicke_state
from spinconc.hamiltonian import StateVector, apply_h, apply_s2, dense_matrix
from spinconc.spinbasis import sector_basis

from conftest import full_sector_matrix

R = 1 / np.sqrt(2)
PAIR = ClusterGraph("pair", 2, ((0, 1),))


def test_singlet_and_triplet():
    b = sector_basis(2, 1)
    singlet = StateVector(b, [R, -R])
    triplet = StateVector(b, [R, R])
    assert np.allclose(apply_h(PAIR, singlet).amps, -0.75 * singlet.amps)
    assert np.allclose(apply_h(PAIR, triplet).amps, 0.25 * triplet.amps)


def test_s2_examples():
    b = sector_basis(2, 1)
    assert np.allclose(apply_s2(StateVector(b, [R, -R])).amps, 0.0)
    assert np.allclose(apply_s2(StateVector(b, [R, R])).amps, [2 * R, 2 * R])
    d = dicke_state(DickeParams(4, 2))
    assert np.allclose(apply_s2(d).amps, 6.0 * d.amps)


@pytest.mark.parametrize("name", ["chain:4", "chain:6", "complete:5", "tri:10"])
def test_column_assembly_matches_kronecker_oracle(name):
    g = preset(name)
    n = g.num_sites
    for m in range(n + 1):
        b = sector_basis(n, m)
        if b.dim > 300:
            continue
        assert np.allclose(dense_matrix(g, b), full_sector_matrix(n, m, g.edges), atol=1e-13)


def test_chain4_lowest_eigenvalue_from_oracle():
    g = preset("chain:4")
    h = dense_matrix(g, sector_basis(4, 2))
    assert np.allclose(h, h.T)
    assert np.linalg.eigvalsh(h)[0] == pytest.approx(-2.0, abs=1e-12)
    assert np.linalg.eigvalsh(full_sector_matrix(4, 2, g.edges))[0] == pytest.approx(-2.0, abs=1e-12)


def random_state(basis, seed):
    return StateVector(basis, np.random.default_rng(seed).normal(size=basis.dim))


@settings(max_examples=25, deadline=None)
@given(st.sampled_from(["chain:8", "tri:10", "davidstar:12", "tictactoe:12", "complete:6"]), st.integers(0, 10**6))
def test_symmetric_and_commutes_with_s2(name, seed):
    g = preset(name)
    b = sector_basis(g.num_sites, g.num_sites // 2)
    x, y = random_state(b, seed), random_state(b, seed + 1)
    assert x.dot(apply_h(g, y)) == pytest.approx(apply_h(g, x).dot(y), abs=1e-12 * b.dim)
    lhs = apply_h(g, apply_s2(x)).amps
    rhs = apply_s2(apply_h(g, x)).amps
    assert np.max(np.abs(lhs - rhs)) < 1e-10


def test_off_half_filling_sectors_are_preserved():
    # the kernel only ever looks up partners inside the sector; a stray
    # partner would show up as a mismatch against the full-space oracle
    g = preset("chain:7")
    for m in (1, 2, 3):
        b = sector_basis(7, m)
        assert np.allclose(dense_matrix(g, b), full_sector_matrix(7, m, g.edges))


def test_translation_invariance_on_chain():
    n = 10
    g = preset(f"chain:{n}")
    b = sector_basis(n, 5)
    v = random_state(b, 3)

    def translate(state):
        cfg = b.configs
        rotated = ((cfg << 1) | (cfg >> (n - 1))) & ((1 << n) - 1)
        out = np.empty_like(state.amps)
        out[b.indices(rotated)] = state.amps
        return StateVector(b, out)

    assert np.allclose(apply_h(g, translate(v)).amps, translate(apply_h(g, v)).amps, atol=1e-13)


@pytest.mark.parametrize("threads", [2, 3, 7])
def test_threaded_kernel_is_bit_identical(threads):
    g = preset("tri:10")
    b = sector_basis(10, 5)
    v = random_state(b, 11)
    assert np.array_equal(apply_h(g, v, threads=threads).amps, apply_h(g, v).amps)
    assert np.array_equal(apply_s2(v, threads=threads).amps, apply_s2(v).amps)


def test_dimension_mismatch():
    b = sector_basis(4, 2)
    with pytest.raises(ValueError):
        apply_h(preset("chain:5"), StateVector(b, np.ones(6)))
    with pytest.raises(ValueError):
        StateVector(b, np.ones(5))
    with pytest.raises(ValueError):
        StateVector(b, [np.nan] * 6)
