"""High-level experiments: interrogation-time sweeps, particle-number scans,
power-law fits, and Husimi distributions of probe states.

A sweep fixes the total acquisition time T and asks how long each shot
should run: M = T/t shots of duration t give a total-variance bound
I(t) = t * tr(Q(t)^{-1}) / T for the joint strategy, or the matching sum of
single-parameter bounds for the individual strategy. The sweep walks a
logarithmic time grid, reusing one dephasing trajectory incrementally in
the integrated-strength variable, then narrows around the first dip of the
curve and refines the optimum with a parabola in log-log coordinates.
"""

from __future__ import annotations

import enum
import math
import warnings
import dataclasses
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .dicke import build_space, ghz_state, simultaneous_probe
from .dephasing import (NoiseKind, NoiseSpec, build_dephasing_superoperator,
                        integrated_strength)
from .dynamics import FieldBasis, FieldParams, _advance_semigroup
from .errors import ExperimentFailed, InvalidArgument, SingularQfim
from .estimation import (QfimMatrix, Scenario, _qfim_entries, bound_individual,
                         bound_simultaneous)

_AXES = ("x", "y", "z")

_DEFAULT_FIELD = (0.01, 0.01, 0.01)
_DEFAULT_AXIS = (2.0 / math.sqrt(3.0),) * 3

# Second-pass refinement: grid size and half-width factor around the best t.
_RESCAN_POINTS = 40
_RESCAN_FACTOR = 4.0


class SweepScenario(str, enum.Enum):
    """Joint three-parameter estimation, or one experiment per component."""

    SIMULTANEOUS = "sim"
    INDIVIDUAL = "ind"


@dataclass(frozen=True)
class TimeGrid:
    """Logarithmic grid of shot durations."""

    count: int = 60
    start: float = 1e-2
    stop: float = 100.0

    def __post_init__(self):
        if self.count < 2:
            raise InvalidArgument(f"grid needs at least 2 points, got {self.count}")
        if not (0.0 < self.start < self.stop) or not np.isfinite(self.stop):
            raise InvalidArgument(
                f"grid bounds must satisfy 0 < start < stop, got ({self.start}, {self.stop})")

    def values(self):
        return np.geomspace(self.start, self.stop, self.count)


@dataclass(frozen=True)
class SweepConfig:
    """Everything a time sweep needs; defaults follow the standard scenario
    of a weak diagonal field probed over a total budget of 100."""

    n_particles: int
    scenario: SweepScenario = SweepScenario.SIMULTANEOUS
    kind: NoiseKind = NoiseKind.MARKOVIAN
    gamma: float = 0.05
    field: tuple = _DEFAULT_FIELD
    axis: tuple = _DEFAULT_AXIS
    total_time: float = 100.0
    grid: TimeGrid = dataclasses.field(default_factory=TimeGrid)

    def __post_init__(self):
        if int(self.n_particles) < 1:
            raise InvalidArgument(f"n_particles must be positive, got {self.n_particles}")
        if not np.isfinite(self.total_time) or self.total_time <= 0.0:
            raise InvalidArgument(f"total_time must be positive, got {self.total_time}")
        if self.grid.stop > self.total_time * (1.0 + 1e-12):
            raise InvalidArgument(
                f"grid extends to {self.grid.stop}, beyond the total budget {self.total_time}")
        object.__setattr__(self, "scenario", SweepScenario(self.scenario))
        object.__setattr__(self, "kind", NoiseKind(self.kind))
        object.__setattr__(self, "field", tuple(float(x) for x in self.field))
        object.__setattr__(self, "axis", tuple(float(x) for x in self.axis))

    def noise_spec(self):
        return NoiseSpec(kind=self.kind, gamma=self.gamma, axis=self.axis)

    def field_params(self):
        return FieldParams(self.field)


@dataclass(frozen=True)
class RefinementMeta:
    """Where the optimum came from: grid index of the selected sampled
    minimum, quality of the local parabola, and whether the optimum sat on
    a grid boundary (in which case no refinement is attempted)."""

    grid_index: int
    fit_residual: float
    boundary: bool


@dataclass(frozen=True, eq=False)
class SweepResult:
    """Sampled bound curve and the refined optimum."""

    config: SweepConfig
    times: np.ndarray
    bounds: np.ndarray
    t_opt: float
    i_min: float
    refinement: RefinementMeta

    @property
    def curve(self):
        """Finite (t, I) pairs as an (k, 2) array."""
        mask = np.isfinite(self.bounds)
        return np.column_stack([self.times[mask], self.bounds[mask]])


def _qfim_grid(space, basis, superoperator, spec, probe, times):
    """QFIM at every grid time for one probe state.

    The dephased state is marched forward between consecutive grid points in
    the Theta variable (the grid is ascending, so increments are nonnegative)
    and rotated/differentiated independently at each stop.
    """
    d = space.total_dim
    rho0 = np.outer(probe.amplitudes, probe.amplitudes.conj())
    vec = rho0.reshape(d * d)
    theta_prev = 0.0
    matvec = superoperator.matrix.dot if superoperator is not None else None
    out = []
    for t in times:
        theta = integrated_strength(spec, t)
        if matvec is not None and theta > theta_prev:
            vec = _advance_semigroup(matvec, vec, theta - theta_prev)
            theta_prev = theta
        rho_deph = vec.reshape(d, d)
        rho_deph = (rho_deph + rho_deph.conj().T) / 2.0
        u = basis.unitary(t)
        rho_t = u.sandwich(rho_deph)
        partials = []
        for axis in _AXES:
            gen = basis.generator(t, axis)
            dmat = -1j * u.sandwich(gen.commutator(rho_deph))
            partials.append((dmat + dmat.conj().T) / 2.0)
        out.append(_qfim_entries(rho_t, partials))
    return out


def _bounds_on_grid(config, space, basis, superoperator, spec, times):
    """Total-variance bound I(t) on the grid; singular points come back NaN."""
    total = config.total_time
    values = np.full(len(times), np.nan)
    if config.scenario is SweepScenario.SIMULTANEOUS:
        probe = simultaneous_probe(space)
        entries = _qfim_grid(space, basis, superoperator, spec, probe, times)
        for i, (t, q) in enumerate(zip(times, entries)):
            try:
                qm = QfimMatrix(entries=q, t=t, n_particles=space.n_particles,
                                scenario=Scenario.SIMULTANEOUS)
                values[i] = bound_simultaneous(qm, total / t).value
            except (SingularQfim, InvalidArgument):
                continue
    else:
        diagonals = np.full((3, len(times)), np.nan)
        for k, axis in enumerate(_AXES):
            probe = ghz_state(space, axis)
            entries = _qfim_grid(space, basis, superoperator, spec, probe, times)
            diagonals[k] = [q[k, k] for q in entries]
        for i, t in enumerate(times):
            try:
                values[i] = bound_individual(diagonals[0, i], diagonals[1, i],
                                             diagonals[2, i], total / t).value
            except SingularQfim:
                continue
    return values


def _first_interior_minimum(masked, finite):
    """Index of the first interior local minimum of a sampled curve.

    A point qualifies when it and both neighbours are finite and it lies
    strictly below both. Returns None when the finite samples run monotone
    to an edge (no interior dip).
    """
    for i in range(1, len(masked) - 1):
        if finite[i] and finite[i - 1] and finite[i + 1] \
                and masked[i] < masked[i - 1] and masked[i] < masked[i + 1]:
            return i
    return None


def _parabolic_minimum(log_t, log_i, idx):
    """Vertex of the parabola through three neighbouring log-log points."""
    x = log_t[idx - 1:idx + 2]
    y = log_i[idx - 1:idx + 2]
    coeffs = np.polyfit(x, y, 2)
    residual = float(np.max(np.abs(np.polyval(coeffs, x) - y)))
    if coeffs[0] <= 0.0:
        return log_t[idx], log_i[idx], residual
    xv = -coeffs[1] / (2.0 * coeffs[0])
    xv = min(max(xv, x[0]), x[-1])
    yv = float(np.polyval(coeffs, xv))
    return xv, yv, residual


def sweep_time(config):
    """Sweep the shot duration and locate the optimal interrogation time.

    Returns the coarse bound curve plus (t_opt, i_min) refined by a narrowed
    second grid and local parabolic interpolation. The reported optimum is
    the first interior local minimum of the sampled curve: bound curves can
    re-descend at very long shots, where only a few repetitions fit into the
    budget and the per-shot information is carried by slow population
    rotation rather than the phase coherence the probe was prepared for, so
    the first dip is the operationally meaningful working point. When the
    curve runs monotone to a grid edge the edge point is reported and
    flagged as a boundary optimum. Grid points whose QFIM is singular are
    reported as missing; if every point fails the sweep raises
    ExperimentFailed.
    """
    space = build_space(config.n_particles)
    spec = config.noise_spec()
    basis = FieldBasis(space, config.field_params())
    superoperator = None
    if spec.gamma > 0.0:
        superoperator = build_dephasing_superoperator(space, spec)
    times = config.grid.values()
    values = _bounds_on_grid(config, space, basis, superoperator, spec, times)

    finite = np.isfinite(values)
    if not finite.any():
        raise ExperimentFailed("no grid point produced an invertible QFIM")
    masked = np.where(finite, values, np.inf)
    idx = _first_interior_minimum(masked, finite)

    if idx is None:
        idx = int(np.argmin(masked))
        meta = RefinementMeta(grid_index=idx, fit_residual=0.0, boundary=True)
        return SweepResult(config=config, times=times, bounds=values,
                           t_opt=float(times[idx]), i_min=float(values[idx]),
                           refinement=meta)

    # Narrowed pass around the coarse dip, clipped to the sweep range.
    lo = max(times[idx] / _RESCAN_FACTOR, config.grid.start)
    hi = min(times[idx] * _RESCAN_FACTOR, config.grid.stop)
    fine_times = np.geomspace(lo, hi, _RESCAN_POINTS)
    fine_values = _bounds_on_grid(config, space, basis, superoperator, spec,
                                  fine_times)
    fine_ok = np.isfinite(fine_values)
    if not fine_ok.any():
        meta = RefinementMeta(grid_index=idx, fit_residual=0.0, boundary=True)
        return SweepResult(config=config, times=times, bounds=values,
                           t_opt=float(times[idx]), i_min=float(values[idx]),
                           refinement=meta)
    fine_masked = np.where(fine_ok, fine_values, np.inf)
    fidx = _first_interior_minimum(fine_masked, fine_ok)
    if fidx is None:
        fidx = int(np.argmin(fine_masked))
        t_opt, i_min = float(fine_times[fidx]), float(fine_values[fidx])
        meta = RefinementMeta(grid_index=idx, fit_residual=0.0, boundary=True)
    else:
        log_t = np.log(fine_times)
        log_i = np.log(fine_values)
        xv, yv, residual = _parabolic_minimum(log_t, log_i, fidx)
        t_opt, i_min = float(np.exp(xv)), float(np.exp(yv))
        i_min = min(i_min, float(fine_values[fidx]))
        meta = RefinementMeta(grid_index=idx, fit_residual=residual, boundary=False)
    return SweepResult(config=config, times=times, bounds=values,
                       t_opt=t_opt, i_min=i_min, refinement=meta)


@dataclass(frozen=True)
class ScanRow:
    """Optimum of one sweep at a given particle number."""

    n_particles: int
    scenario: SweepScenario
    kind: NoiseKind
    t_opt: float
    i_min: float


def _scan_one(config):
    try:
        result = sweep_time(config)
    except ExperimentFailed:
        return None
    return ScanRow(n_particles=config.n_particles, scenario=config.scenario,
                   kind=config.kind, t_opt=result.t_opt, i_min=result.i_min)


def scan_particles(n_list, base_config, workers=1):
    """Run sweep_time for each N in ascending n_list.

    Failed sweeps are dropped from the output rather than aborting the scan.
    With workers > 1 the sweeps run in a process pool; row order is
    deterministic either way.
    """
    ns = [int(n) for n in n_list]
    if ns != sorted(ns) or len(set(ns)) != len(ns):
        raise InvalidArgument("n_list must be strictly ascending")
    if not ns:
        raise InvalidArgument("n_list must be nonempty")
    configs = [replace(base_config, n_particles=n) for n in ns]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_scan_one, configs))
    else:
        rows = [_scan_one(c) for c in configs]
    return [r for r in rows if r is not None]


@dataclass(frozen=True)
class PowerLawFit:
    """value ~ prefactor * N^exponent, fitted in log-log coordinates."""

    exponent: float
    prefactor: float
    residual: float
    n_used: int


def fit_power_law(points, n_min=10):
    """Least-squares power-law fit of (N, value) pairs with N >= n_min.

    Needs at least three usable points with positive values.
    """
    arr = np.asarray(points, dtype=float)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise InvalidArgument("points must be an iterable of (N, value) pairs")
    arr = arr[arr[:, 0] >= n_min]
    if len(arr) < 3:
        raise InvalidArgument(f"need at least 3 points with N >= {n_min}, got {len(arr)}")
    if np.any(arr <= 0.0) or not np.all(np.isfinite(arr)):
        raise InvalidArgument("power-law fit requires positive finite data")
    log_n = np.log(arr[:, 0])
    log_v = np.log(arr[:, 1])
    slope, intercept = np.polyfit(log_n, log_v, 1)
    fitted = slope * log_n + intercept
    residual = float(np.sqrt(np.mean((fitted - log_v) ** 2)))
    return PowerLawFit(exponent=float(slope), prefactor=float(np.exp(intercept)),
                       residual=residual, n_used=len(arr))


# ---------------------------------------------------------------------------
# Husimi distribution
# ---------------------------------------------------------------------------

def husimi_grid(shape=(181, 360)):
    """Polar angles (inclusive of the poles) and azimuths (periodic, endpoint
    excluded) for a Husimi map of the given shape."""
    n_theta, n_phi = shape
    if n_theta < 2 or n_phi < 1:
        raise InvalidArgument(f"grid shape must be at least (2, 1), got {shape}")
    thetas = np.linspace(0.0, np.pi, n_theta)
    phis = np.linspace(0.0, 2.0 * np.pi, n_phi, endpoint=False)
    return thetas, phis


def husimi_map(state, shape=(181, 360)):
    """Overlap density |<theta, phi | psi>|^2 with spin-coherent states.

    The probe is projected onto the maximal sector; weight elsewhere is
    dropped with a warning since coherent states only resolve the top block.
    Rows run over theta in [0, pi], columns over phi in [0, 2 pi).
    """
    thetas, phis = husimi_grid(shape)
    space = state.space
    sec = space.max_sector
    psi = state.amplitudes[sec.offset:sec.offset + sec.dim]
    off_weight = 1.0 - float(np.vdot(psi, psi).real)
    if off_weight > 1e-12:
        warnings.warn(
            f"probe carries weight {off_weight:.3e} outside the maximal sector; "
            "projecting", stacklevel=2)
    twoj = sec.twoj
    k = np.arange(twoj + 1)                       # k = j - m, m decreasing
    binom = np.array([math.comb(twoj, int(kk)) for kk in k], dtype=float)
    phase = np.exp(1j * np.outer(k, phis))        # conj of the state phase
    out = np.empty((len(thetas), len(phis)))
    for i, theta in enumerate(thetas):
        c, s = np.cos(theta / 2.0), np.sin(theta / 2.0)
        row = np.sqrt(binom) * c ** (twoj - k) * s ** k * psi
        out[i] = np.abs(row @ phase) ** 2
    return out


def husimi_normalization(qmap, multiplet_dim):
    """Quadrature of a Husimi map against the coherent-state measure.

    Returns (2j+1)/(4 pi) * integral Q sin(theta) dtheta dphi evaluated with
    the trapezoid rule in theta and the periodic rectangle rule in phi; the
    result approaches 1 for a normalized max-sector state as the grid grows.
    multiplet_dim is the sector dimension 2j+1 = N+1.
    """
    qmap = np.asarray(qmap, dtype=float)
    n_theta, n_phi = qmap.shape
    thetas, _ = husimi_grid((n_theta, n_phi))
    d_phi = 2.0 * np.pi / n_phi
    weights = np.full(n_theta, thetas[1] - thetas[0])
    weights[0] /= 2.0
    weights[-1] /= 2.0
    ring = (qmap * np.sin(thetas)[:, None]).sum(axis=1)
    integral = float(np.sum(ring * weights) * d_phi)
    return multiplet_dim / (4.0 * np.pi) * integral
