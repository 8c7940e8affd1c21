"""Time sweeps, particle scans, power-law fits, and Husimi maps."""

import math
import warnings

import numpy as np
import pytest

from spinsense import (ExperimentFailed, InvalidArgument, NoiseKind,
                       StateVector, SweepConfig, SweepScenario, TimeGrid,
                       build_space, fit_power_law, ghz_state, husimi_grid,
                       husimi_map, husimi_normalization, scan_particles,
                       simultaneous_probe, sweep_time)

SMALL_GRID = TimeGrid(count=24, start=0.05, stop=100.0)


def test_time_grid_values_and_validation():
    grid = TimeGrid(count=5, start=0.1, stop=10.0)
    assert np.allclose(grid.values(), np.geomspace(0.1, 10.0, 5))
    with pytest.raises(InvalidArgument):
        TimeGrid(count=1)
    with pytest.raises(InvalidArgument):
        TimeGrid(count=10, start=0.0, stop=1.0)
    with pytest.raises(InvalidArgument):
        TimeGrid(count=10, start=5.0, stop=1.0)


def test_sweep_config_validation():
    with pytest.raises(InvalidArgument):
        SweepConfig(n_particles=0)
    with pytest.raises(InvalidArgument):
        SweepConfig(n_particles=4, total_time=50.0,
                    grid=TimeGrid(count=10, start=0.1, stop=100.0))
    cfg = SweepConfig(n_particles=4)
    assert cfg.field == (0.01, 0.01, 0.01)
    assert np.allclose(cfg.axis, (2.0 / math.sqrt(3.0),) * 3)
    assert cfg.total_time == 100.0


def test_sweep_is_deterministic():
    cfg = SweepConfig(n_particles=6, gamma=0.1, grid=SMALL_GRID)
    a = sweep_time(cfg)
    b = sweep_time(cfg)
    assert a.times.tobytes() == b.times.tobytes()
    assert a.bounds.tobytes() == b.bounds.tobytes()
    assert (a.t_opt, a.i_min) == (b.t_opt, b.i_min)


def test_sweep_noiseless_runs_to_the_boundary():
    cfg = SweepConfig(n_particles=8, kind=NoiseKind.NONE, gamma=0.0,
                      grid=SMALL_GRID)
    res = sweep_time(cfg)
    curve = res.curve
    assert np.all(np.diff(curve[:, 1]) < 0.0)
    assert res.refinement.boundary
    assert res.t_opt == curve[-1, 0]
    assert res.i_min == curve[-1, 1]


def test_sweep_interior_minimum_invariants():
    cfg = SweepConfig(n_particles=8, kind=NoiseKind.MARKOVIAN, gamma=0.1,
                      grid=SMALL_GRID)
    res = sweep_time(cfg)
    assert not res.refinement.boundary
    assert SMALL_GRID.start <= res.t_opt <= SMALL_GRID.stop
    # the refined optimum cannot leave the coarse cell of the sampled minimum
    coarse_t = res.times[res.refinement.grid_index]
    cell = (SMALL_GRID.stop / SMALL_GRID.start) ** (1.0 / (SMALL_GRID.count - 1))
    assert max(res.t_opt / coarse_t, coarse_t / res.t_opt) < cell
    assert res.i_min <= np.nanmin(res.bounds) * (1.0 + 1e-12)


def test_sweep_markovian_optimum_is_earlier():
    grid = TimeGrid(count=24, start=0.05, stop=100.0)
    mark = sweep_time(SweepConfig(n_particles=8, kind=NoiseKind.MARKOVIAN,
                                  gamma=0.1, grid=grid))
    nonmark = sweep_time(SweepConfig(n_particles=8, kind=NoiseKind.NONMARKOVIAN,
                                     gamma=0.1, grid=grid))
    assert mark.t_opt < nonmark.t_opt


def test_individual_strategy_needs_more_repetitions():
    grid = TimeGrid(count=20, start=0.05, stop=100.0)
    base = dict(n_particles=6, kind=NoiseKind.MARKOVIAN, gamma=0.05, grid=grid)
    sim = sweep_time(SweepConfig(scenario=SweepScenario.SIMULTANEOUS, **base))
    ind = sweep_time(SweepConfig(scenario=SweepScenario.INDIVIDUAL, **base))
    assert ind.i_min > sim.i_min


def test_scan_collects_ascending_rows():
    cfg = SweepConfig(n_particles=4, gamma=0.1, grid=SMALL_GRID)
    rows = scan_particles([4, 6, 8], cfg)
    assert [r.n_particles for r in rows] == [4, 6, 8]
    assert all(r.t_opt > 0.0 and r.i_min > 0.0 for r in rows)
    vals = [r.i_min for r in rows]
    assert vals[0] > vals[1] > vals[2]
    with pytest.raises(InvalidArgument):
        scan_particles([6, 4], cfg)
    with pytest.raises(InvalidArgument):
        scan_particles([4, 4, 6], cfg)
    with pytest.raises(InvalidArgument):
        scan_particles([], cfg)


def test_scan_worker_pool_matches_serial():
    cfg = SweepConfig(n_particles=4, gamma=0.1,
                      grid=TimeGrid(count=16, start=0.05, stop=100.0))
    serial = scan_particles([4, 6], cfg, workers=1)
    pooled = scan_particles([4, 6], cfg, workers=2)
    assert [(r.n_particles, r.t_opt, r.i_min) for r in serial] \
        == [(r.n_particles, r.t_opt, r.i_min) for r in pooled]


def test_fit_recovers_synthetic_exponents():
    ns = np.arange(10, 31, 2, dtype=float)
    for exponent in (-2.0, -1.5, -1.0, 0.5, 1.0):
        values = 3.7 * ns ** exponent
        fit = fit_power_law(list(zip(ns, values)))
        assert abs(fit.exponent - exponent) < 1e-12
        assert abs(fit.prefactor - 3.7) / 3.7 < 1e-12
        assert fit.residual < 1e-13
        assert fit.n_used == len(ns)


def test_fit_cutoff_and_validation():
    pts = [(4.0, 1.0), (6.0, 2.0), (10.0, 3.0), (12.0, 4.0), (14.0, 5.0)]
    fit = fit_power_law(pts, n_min=10)
    assert fit.n_used == 3
    with pytest.raises(InvalidArgument):
        fit_power_law(pts[:2], n_min=0)
    with pytest.raises(InvalidArgument):
        fit_power_law([(10.0, 1.0), (12.0, -1.0), (14.0, 2.0)])
    with pytest.raises(InvalidArgument):
        fit_power_law([(10.0, 1.0), (12.0, math.nan), (14.0, 2.0)])


def test_husimi_grid_conventions():
    thetas, phis = husimi_grid((7, 8))
    assert thetas[0] == 0.0 and thetas[-1] == math.pi
    assert phis[0] == 0.0 and phis[-1] < 2.0 * math.pi
    with pytest.raises(InvalidArgument):
        husimi_grid((1, 10))


def test_husimi_polar_lobes():
    space = build_space(10)
    q = husimi_map(ghz_state(space, "z"), (61, 120))
    assert abs(q[0, 0] - 0.5) < 1e-12          # both poles carry half weight
    assert abs(q[-1, 0] - 0.5) < 1e-12
    assert q[30].max() < 0.01                  # equator is dark


def test_husimi_six_lobes():
    space = build_space(40)
    q = husimi_map(simultaneous_probe(space), (91, 180))
    equator = q[45]
    peaks = [q[0, 0], q[90, 0],
             equator[0], equator[45], equator[90], equator[135]]
    troughs = [q[22, 0], q[22, 45], equator[22], equator[67],
               equator[112], equator[157]]
    assert min(peaks) > 10.0 * max(troughs)


def test_husimi_normalization_converges():
    for n in (12, 40):
        space = build_space(n)
        q = husimi_map(simultaneous_probe(space), (200, 200))
        total = husimi_normalization(q, n + 1)
        assert abs(total - 1.0) < 1e-3


def test_husimi_projects_with_warning():
    space = build_space(2)
    amps = np.zeros(space.total_dim, dtype=complex)
    amps[0] = 0.8
    amps[3] = 0.6                               # weight on the singlet
    state = StateVector(space, amps)
    with pytest.warns(UserWarning):
        q = husimi_map(state, (31, 60))
    # the projected top-sector part is |1,1> with weight 0.64
    assert abs(q[0, 0] - 0.64) < 1e-12


def test_all_singular_sweep_raises():
    cfg = SweepConfig(n_particles=1, kind=NoiseKind.NONE, gamma=0.0,
                      grid=TimeGrid(count=6, start=0.1, stop=50.0))
    with pytest.raises(ExperimentFailed):
        sweep_time(cfg)
