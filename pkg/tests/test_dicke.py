"""State space, collective operators, and probe states."""

import math

import numpy as np
import pytest

from spinsense import (DensityOperator, InvalidArgument, StateVector,
                       build_space, coherent_state, collective_operator,
                       cumulative_degeneracy, degeneracy, dicke_dimension,
                       ghz_state, simultaneous_probe)

SQ3 = math.sqrt(3.0)


def test_dimension_parity_cases():
    assert dicke_dimension(1) == 2
    assert dicke_dimension(3) == 6
    assert dicke_dimension(4) == 9
    assert dicke_dimension(20) == 121
    for n in range(1, 31):
        expect = (n + 1) * (n + 3) // 4 if n % 2 else (n + 2) ** 2 // 4
        assert dicke_dimension(n) == expect


def test_dimension_rejects_nonpositive():
    with pytest.raises(InvalidArgument):
        dicke_dimension(0)
    with pytest.raises(InvalidArgument):
        dicke_dimension(-2)


def test_degeneracy_values():
    assert degeneracy(2, 0.0) == 1
    assert degeneracy(4, 1.0) == 3
    for n in (1, 2, 5, 12, 30):
        assert degeneracy(n, n / 2.0) == 1


def test_degeneracy_rejects_bad_spin():
    with pytest.raises(InvalidArgument):
        degeneracy(4, 0.5)        # wrong parity
    with pytest.raises(InvalidArgument):
        degeneracy(4, 3.0)        # above N/2
    with pytest.raises(InvalidArgument):
        degeneracy(3, -0.5)


def test_multiplicity_sum_recovers_product_dimension():
    # sum over sectors of multiplicity * (2j+1) must tile the 2^N space
    for n in range(1, 31):
        space = build_space(n)
        total = sum(s.multiplicity * s.dim for s in space.sectors)
        assert total == 2 ** n


def test_cumulative_degeneracy_matches_running_sum():
    # counts multiplets with spin >= j, so accumulate from the top sector down
    n = 8
    space = build_space(n)
    running = 0
    for s in space.sectors:
        running += s.multiplicity
        assert cumulative_degeneracy(n, s.j) == running


def test_space_layout():
    space = build_space(3)
    assert space.total_dim == 6
    assert [(s.j, s.dim, s.multiplicity) for s in space.sectors] == [
        (1.5, 4, 1), (0.5, 2, 2)]
    space2 = build_space(2)
    assert [(s.j, s.dim, s.multiplicity) for s in space2.sectors] == [
        (1.0, 3, 1), (0.0, 1, 1)]
    # offsets are the cumulative dims, m runs from +j down to -j
    off = 0
    for s in space.sectors:
        assert s.offset == off
        off += s.dim
        assert np.allclose(s.m_values(), np.arange(s.j, -s.j - 1.0, -1.0))


def test_index_lookup_roundtrip():
    space = build_space(5)
    seen = set()
    for s in space.sectors:
        for twom in range(s.twoj, -s.twoj - 1, -2):
            idx = space.index(s.twoj, twom)
            assert 0 <= idx < space.total_dim
            seen.add(idx)
    assert len(seen) == space.total_dim


def test_collective_x_matrix_three_spins():
    # j=3/2 block has the sqrt(3)/2, 1, sqrt(3)/2 ladder profile, the j=1/2
    # block is the Pauli x/2; everything off the blocks vanishes
    jx = collective_operator(build_space(3), "x").to_dense()
    expect = np.zeros((6, 6))
    band = [SQ3 / 2.0, 1.0, SQ3 / 2.0]
    for i, v in enumerate(band):
        expect[i, i + 1] = expect[i + 1, i] = v
    expect[4, 5] = expect[5, 4] = 0.5
    assert np.max(np.abs(jx - expect)) < 1e-12


def test_collective_z_single_spin():
    jz = collective_operator(build_space(1), "z").to_dense()
    assert np.max(np.abs(jz - np.diag([0.5, -0.5]))) == 0.0


def test_ladder_entries():
    space = build_space(4)
    jp = collective_operator(space, "plus").to_dense()
    for s in space.sectors:
        j = s.j
        for k, m in enumerate(s.m_values()[1:]):   # raising hits m+1
            expect = math.sqrt((j - m) * (j + m + 1.0))
            got = jp[s.offset + k, s.offset + k + 1]
            assert abs(got - expect) < 1e-12
    jm = collective_operator(space, "minus").to_dense()
    assert np.max(np.abs(jm - jp.conj().T)) == 0.0
    jx = collective_operator(space, "x").to_dense()
    assert np.max(np.abs(jx - (jp + jm) / 2.0)) < 1e-15


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5, 8])
def test_commutators_and_casimir(n):
    space = build_space(n)
    ops = {k: collective_operator(space, k).to_dense() for k in "xyz"}
    for a, b, c in (("x", "y", "z"), ("y", "z", "x"), ("z", "x", "y")):
        comm = ops[a] @ ops[b] - ops[b] @ ops[a]
        assert np.max(np.abs(comm - 1j * ops[c])) < 1e-12
    casimir = sum(m @ m for m in ops.values())
    expect = np.concatenate([np.full(s.dim, s.j * (s.j + 1.0)) for s in space.sectors])
    assert np.max(np.abs(casimir - np.diag(expect))) < 1e-12


def test_block_operator_algebra_matches_dense():
    space = build_space(4)
    jx = collective_operator(space, "x")
    jy = collective_operator(space, "y")
    dx, dy = jx.to_dense(), jy.to_dense()
    assert np.allclose((jx @ jy).to_dense(), dx @ dy)
    assert np.allclose((jx + jy).to_dense(), dx + dy)
    assert np.allclose((jx - jy).to_dense(), dx - dy)
    assert np.allclose((2.5 * jx).to_dense(), 2.5 * dx)
    assert np.allclose(jx.dagger().to_dense(), dx.conj().T)
    rng = np.random.default_rng(11)
    m = rng.standard_normal((9, 9)) + 1j * rng.standard_normal((9, 9))
    assert np.allclose(jx.left_apply(m), dx @ m)
    assert np.allclose(jx.right_apply(m), m @ dx)
    assert np.allclose(jx.commutator(m), dx @ m - m @ dx)
    assert np.allclose(jx.sandwich(m), dx @ m @ dx.conj().T)
    rho = m @ m.conj().T
    rho /= np.trace(rho)
    assert abs(jx.expectation(rho) - np.trace(dx @ rho)) < 1e-12


def test_coherent_state_poles():
    space = build_space(5)
    north = coherent_state(space, 0.0, 0.0).amplitudes
    assert abs(north[0] - 1.0) < 1e-14 and np.max(np.abs(north[1:])) < 1e-14
    south = coherent_state(space, math.pi, 0.3).amplitudes
    top = space.max_sector
    assert abs(abs(south[top.dim - 1]) - 1.0) < 1e-14


def test_coherent_state_equator_amplitudes():
    amps = coherent_state(build_space(2), math.pi / 2.0, 0.0).amplitudes
    expect = np.array([0.5, 1.0 / math.sqrt(2.0), 0.5, 0.0])
    assert np.max(np.abs(amps - expect)) < 1e-14


def test_coherent_state_norm_on_grid():
    space = build_space(7)
    for theta in np.linspace(0.0, math.pi, 20):
        for phi in np.linspace(0.0, 2.0 * math.pi, 20, endpoint=False):
            amps = coherent_state(space, theta, phi).amplitudes
            assert abs(np.linalg.norm(amps) - 1.0) < 1e-12


def test_ghz_even_and_odd_signs():
    space = build_space(2)
    amps = ghz_state(space, "z").amplitudes
    expect = np.zeros(4)
    expect[0] = expect[2] = 1.0 / math.sqrt(2.0)
    assert np.max(np.abs(amps - expect)) < 1e-14
    # odd N: the antipodal coherent state carries a (-1)^(2j) phase
    space3 = build_space(3)
    amps3 = ghz_state(space3, "z").amplitudes
    expect3 = np.zeros(6)
    expect3[0] = 1.0 / math.sqrt(2.0)
    expect3[3] = -1.0 / math.sqrt(2.0)
    assert np.max(np.abs(amps3 - expect3)) < 1e-14


def test_ghz_x_equals_ghz_z_for_two_spins():
    space = build_space(2)
    a = ghz_state(space, "x").amplitudes
    b = ghz_state(space, "z").amplitudes
    phase = np.vdot(b, a)
    assert abs(abs(phase) - 1.0) < 1e-12
    assert np.max(np.abs(a - phase * b)) < 1e-12


@pytest.mark.parametrize("n", [2, 3, 5, 8])
def test_ghz_supported_on_top_sector(n):
    space = build_space(n)
    for axis in "xyz":
        sv = ghz_state(space, axis)
        assert abs(np.linalg.norm(sv.amplitudes) - 1.0) < 1e-12
        assert sv.max_sector_weight() > 1.0 - 1e-12


def test_simultaneous_probe_two_spins():
    amps = simultaneous_probe(build_space(2)).amplitudes
    expect = np.array([3.0, 0.0, 1.0, 0.0]) / math.sqrt(10.0)
    assert np.max(np.abs(amps - expect)) < 1e-12


def test_probe_construction_is_deterministic():
    for n in (2, 7, 12):
        space = build_space(n)
        a = simultaneous_probe(space).amplitudes
        b = simultaneous_probe(build_space(n)).amplitudes
        assert a.tobytes() == b.tobytes()
        for axis in "xyz":
            ga = ghz_state(space, axis).amplitudes
            gb = ghz_state(space, axis).amplitudes
            assert ga.tobytes() == gb.tobytes()


def test_state_vector_rejects_bad_norm_and_shape():
    space = build_space(2)
    with pytest.raises(InvalidArgument):
        StateVector(space, np.array([1.0, 1.0, 0.0, 0.0]))
    with pytest.raises(InvalidArgument):
        StateVector(space, np.zeros(3))


def test_density_operator_validation():
    space = build_space(2)
    good = np.diag([0.5, 0.25, 0.25, 0.0]).astype(complex)
    rho = DensityOperator(space, good)
    assert abs(rho.purity() - (0.25 + 0.0625 + 0.0625)) < 1e-12
    weights = rho.sector_weights()
    assert np.allclose(weights, [1.0, 0.0])
    bad_trace = good * 1.5
    with pytest.raises(InvalidArgument):
        DensityOperator(space, bad_trace)
    skew = good.copy()
    skew[0, 1] = 0.1
    with pytest.raises(InvalidArgument):
        DensityOperator(space, skew)
    negative = np.diag([1.2, -0.2, 0.0, 0.0]).astype(complex)
    with pytest.raises(InvalidArgument):
        DensityOperator(space, negative)
