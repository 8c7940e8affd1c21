"""Fisher-information machinery for three-component field estimation.

The field components enter only through the propagator, so the parametric
derivative of the evolved state reduces to a commutator with the
rotating-frame integral operator of the corresponding collective spin
component. From the derivatives the quantum Fisher information matrix is
evaluated in the eigenbasis of the state, and measured (classical) Fisher
information follows from any POVM. Inverse-trace bounds compare the
simultaneous three-parameter strategy with three separate single-parameter
experiments that share the same total time budget.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .dicke import DensityOperator
from .dynamics import FieldBasis
from .errors import AssumptionViolated, InvalidArgument, SingularQfim

_AXES = ("x", "y", "z")

# Relative eigenvalue-pair cutoff in the QFIM sum.
_QFIM_EPS = 1e-12
# Probabilities below this are treated as unoccupied outcomes in the CFIM.
_CFIM_EPS = 1e-14
# Condition-number ceiling beyond which the QFIM counts as singular.
_CONDITION_LIMIT = 1e12


class Scenario(str, enum.Enum):
    """Which estimation experiment a Fisher matrix belongs to."""

    SIMULTANEOUS = "simultaneous"
    INDIVIDUAL_X = "individual-x"
    INDIVIDUAL_Y = "individual-y"
    INDIVIDUAL_Z = "individual-z"


def generator_operator(space, field, t, axis):
    """Rotating-frame integral of J_axis over [0, t] for the given field.

    This is the Hermitian operator A with dU/dphi_axis = -i U A; at t -> 0
    it reduces to t * J_axis.
    """
    if field.norm == 0.0:
        raise InvalidArgument("field must be nonzero")
    return FieldBasis(space, field).generator(t, axis)


def partial_rho(result, field, axis):
    """Derivative of the evolved state with respect to field component axis.

    Differentiates the map rho = U(phi) rho_deph U(phi)^dag at fixed
    dephased input, which is exact under the parallel split:

        d rho / d phi_k = -i U [A_k, rho_deph] U^dag.

    Requires a split-valid evolution result.
    """
    if axis not in _AXES:
        raise InvalidArgument(f"axis must be one of {_AXES}, got {axis!r}")
    if not result.split_valid:
        raise AssumptionViolated(
            "field derivatives require the parallel split; evolve without "
            "allow_nonparallel fallback")
    space = result.rho.space
    gen = generator_operator(space, field, result.t, axis)
    comm = gen.commutator(result.rho_dephased.matrix)
    out = -1j * result.unitary.sandwich(comm)
    return (out + out.conj().T) / 2.0


@dataclass(frozen=True, eq=False)
class QfimMatrix:
    """3x3 quantum Fisher information matrix with its evaluation context."""

    entries: np.ndarray
    t: float
    n_particles: int
    scenario: Scenario

    def __post_init__(self):
        mat = np.asarray(self.entries, dtype=float)
        if mat.shape != (3, 3):
            raise InvalidArgument(f"entries must be 3x3, got shape {mat.shape}")
        scale = max(1.0, float(np.max(np.abs(mat))))
        if np.max(np.abs(mat - mat.T)) > 1e-9 * scale:
            raise InvalidArgument("QFIM must be symmetric")
        if np.linalg.eigvalsh(mat).min() < -1e-9 * scale:
            raise InvalidArgument("QFIM must be positive semidefinite")
        object.__setattr__(self, "entries", mat)


def _qfim_entries(rho_matrix, partials):
    """Core QFIM evaluation in the state eigenbasis.

    Q_ab = 2 sum_{l,l'} <l|d_a rho|l'> <l'|d_b rho|l> / (p_l + p_l'),
    restricted to eigenvalue pairs with p_l + p_l' above a relative cutoff.
    """
    p, v = np.linalg.eigh(rho_matrix)
    den = p[:, None] + p[None, :]
    cutoff = _QFIM_EPS * max(float(p.max()), 1e-300)
    weight = np.where(den > cutoff, den, np.inf)
    scaled = [
        (v.conj().T @ dp @ v) / np.sqrt(weight)
        for dp in partials
    ]
    q = np.empty((3, 3), dtype=complex)
    for a in range(3):
        for b in range(a, 3):
            q[a, b] = 2.0 * np.sum(scaled[a] * scaled[b].conj())
            q[b, a] = np.conj(q[a, b])
    imag_scale = max(1.0, float(np.max(np.abs(q))))
    if np.max(np.abs(q.imag)) > 1e-9 * imag_scale:
        raise InvalidArgument("QFIM evaluation produced a non-real matrix")
    return q.real


def qfim(rho, partials, t=math.nan, scenario=Scenario.SIMULTANEOUS):
    """Quantum Fisher information matrix of rho for the three derivatives.

    Parameters
    ----------
    rho : DensityOperator
    partials : sequence of three Hermitian ndarrays
        Derivatives of rho with respect to the field components.
    t, scenario : metadata recorded on the result.
    """
    if not isinstance(rho, DensityOperator):
        raise InvalidArgument("rho must be a DensityOperator")
    if len(partials) != 3:
        raise InvalidArgument("exactly three parameter derivatives required")
    entries = _qfim_entries(rho.matrix, [np.asarray(p) for p in partials])
    return QfimMatrix(entries=entries, t=float(t),
                      n_particles=rho.space.n_particles, scenario=Scenario(scenario))


@dataclass(frozen=True, eq=False)
class PovmSet:
    """Collection of POVM elements: PSD matrices resolving the identity."""

    elements: tuple

    def __init__(self, elements):
        mats = tuple(np.asarray(e, dtype=complex) for e in elements)
        if not mats:
            raise InvalidArgument("POVM needs at least one element")
        d = mats[0].shape[0]
        total = np.zeros((d, d), dtype=complex)
        for e in mats:
            if e.shape != (d, d):
                raise InvalidArgument("POVM elements must share one square shape")
            if np.max(np.abs(e - e.conj().T)) > 1e-10:
                raise InvalidArgument("POVM elements must be Hermitian")
            if np.linalg.eigvalsh((e + e.conj().T) / 2.0).min() < -1e-10:
                raise InvalidArgument("POVM elements must be positive semidefinite")
            total += e
        if np.max(np.abs(total - np.eye(d))) > 1e-10:
            raise InvalidArgument("POVM elements must sum to the identity")
        object.__setattr__(self, "elements", mats)


def cfim(rho, partials, povm):
    """Classical Fisher information matrix of the POVM statistics.

    Outcomes with probability below 1e-14 are skipped. Returns a plain 3x3
    real symmetric ndarray.
    """
    if not isinstance(povm, PovmSet):
        povm = PovmSet(povm)
    mat = rho.matrix if isinstance(rho, DensityOperator) else np.asarray(rho)
    out = np.zeros((3, 3))
    for element in povm.elements:
        prob = float(np.einsum("ij,ji->", element, mat).real)
        if prob < _CFIM_EPS:
            continue
        grad = np.array([float(np.einsum("ij,ji->", element, np.asarray(dp)).real)
                         for dp in partials])
        out += np.outer(grad, grad) / prob
    return (out + out.T) / 2.0


@dataclass(frozen=True)
class BoundValue:
    """Total-variance bound, with the repetition count that produced it."""

    value: float
    repetitions: float
    total_time: float


def bound_simultaneous(q, repetitions):
    """Sum of estimator variances tr(Q^{-1}) / M for the joint experiment.

    Raises SingularQfim when Q is not invertible to working precision
    (nonpositive eigenvalues or condition number beyond 1e12).
    """
    m = float(repetitions)
    if not np.isfinite(m) or m <= 0.0:
        raise InvalidArgument(f"repetitions must be positive, got {repetitions}")
    w = np.linalg.eigvalsh(q.entries)
    if w.min() <= 0.0 or w.max() / w.min() > _CONDITION_LIMIT:
        raise SingularQfim(
            f"QFIM eigenvalues {w} do not support inversion")
    value = float(np.sum(1.0 / w)) / m
    t_total = m * q.t if np.isfinite(q.t) else math.nan
    return BoundValue(value=value, repetitions=m, total_time=t_total)


def bound_individual(q_xx, q_yy, q_zz, repetitions):
    """Total variance when each component gets its own experiment.

    Each parameter is measured in M/3 of the repetitions, so each variance
    is 3 / (M Q_kk); the bound is their sum.
    """
    m = float(repetitions)
    if not np.isfinite(m) or m <= 0.0:
        raise InvalidArgument(f"repetitions must be positive, got {repetitions}")
    diag = (float(q_xx), float(q_yy), float(q_zz))
    if min(diag) <= 0.0:
        raise SingularQfim(f"diagonal QFIM entries {diag} must be positive")
    value = 3.0 * sum(1.0 / d for d in diag) / m
    return BoundValue(value=value, repetitions=m, total_time=math.nan)
