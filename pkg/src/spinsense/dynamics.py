"""Time evolution of collective states under a static field and local dephasing.

When the field direction is parallel to the dephasing axis the Hamiltonian
commutes with the dissipator, so the propagation splits exactly into a
dephasing stage in the integrated-strength variable Theta followed by the
unitary rotation. evolve() implements that split and refuses (or, on explicit
request, falls back to a joint reference integration) when the assumption
does not hold.

Two brute-force oracles back the fast path: a joint integration of the same
block-diagonal master equation in real time, and an integration in the full
2^N product space that never touches the collective representation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import sparse

from .dicke import (BlockOperator, DensityOperator, DickeSpace, StateVector,
                    build_space, collective_operator)
from .dephasing import (NoiseKind, build_dephasing_superoperator, gamma_profile,
                        integrated_strength)
from .errors import AssumptionViolated, InvalidArgument, NumericalError

_AXES = ("x", "y", "z")


@dataclass(frozen=True)
class FieldParams:
    """Static field vector; components are angular frequencies."""

    phi: tuple

    def __init__(self, phi):
        vec = np.asarray(phi, dtype=float)
        if vec.shape != (3,) or not np.all(np.isfinite(vec)):
            raise InvalidArgument(f"field must be 3 finite components, got {phi}")
        object.__setattr__(self, "phi", (vec[0], vec[1], vec[2]))

    @property
    def norm(self):
        return float(np.linalg.norm(self.phi))

    @property
    def direction(self):
        n = self.norm
        if n == 0.0:
            raise InvalidArgument("zero field has no direction")
        return tuple(p / n for p in self.phi)


def hamiltonian(space, field):
    """H = phi . J as a BlockOperator."""
    ops = [collective_operator(space, a) for a in _AXES]
    blocks = tuple(
        field.phi[0] * bx + field.phi[1] * by + field.phi[2] * bz
        for bx, by, bz in zip(ops[0].blocks, ops[1].blocks, ops[2].blocks))
    return BlockOperator(space, blocks)


class FieldBasis:
    """Eigendecomposition of the field Hamiltonian, cached per block.

    Exposes the propagator and the rotating-frame integral operators for any
    time without repeating the diagonalization; sweep loops reuse a single
    instance across their whole time grid.
    """

    def __init__(self, space, field):
        self.space = space
        self.field = field
        ham = hamiltonian(space, field)
        evals, evecs, rotated = [], [], []
        try:
            for block in ham.blocks:
                w, v = np.linalg.eigh(block)
                evals.append(w)
                evecs.append(v)
        except np.linalg.LinAlgError as exc:
            raise NumericalError(f"field Hamiltonian diagonalization failed: {exc}") from exc
        for axis in _AXES:
            op = collective_operator(space, axis)
            rotated.append(tuple(v.conj().T @ b @ v for b, v in zip(op.blocks, evecs)))
        self.evals = tuple(evals)
        self.evecs = tuple(evecs)
        self.rotated_j = dict(zip(_AXES, rotated))
        self.energy_scale = max((float(np.max(np.abs(w))) if w.size else 0.0)
                                for w in evals)

    def unitary(self, t):
        """exp(-i H t) as a BlockOperator."""
        blocks = tuple(
            (v * np.exp(-1j * w * t)) @ v.conj().T
            for w, v in zip(self.evals, self.evecs))
        return BlockOperator(self.space, blocks)

    def generator(self, t, axis):
        """Rotating-frame integral A = int_0^t U(u)^dag J_axis U(u) du.

        In the Hamiltonian eigenbasis the integral is elementwise: the matrix
        element between energies E_a, E_b picks up

            f(lam, t) = (exp(i lam t) - 1) / (i lam),  lam = E_a - E_b,

        which degenerates to t when |lam| is negligible against the spectral
        scale. The result is Hermitian because f(-lam) = conj(f(lam)).
        """
        if t < 0.0 or not np.isfinite(t):
            raise InvalidArgument(f"t must be finite and >= 0, got {t}")
        if axis not in _AXES:
            raise InvalidArgument(f"axis must be one of {_AXES}, got {axis!r}")
        tol = 1e-10 * self.energy_scale
        blocks = []
        for w, v, jt in zip(self.evals, self.evecs, self.rotated_j[axis]):
            lam = w[:, None] - w[None, :]
            small = np.abs(lam) <= tol
            safe = np.where(small, 1.0, lam)
            f = np.where(small, t, 1j * (1.0 - np.exp(1j * lam * t)) / safe)
            blocks.append(v @ (f * jt) @ v.conj().T)
        return BlockOperator(self.space, tuple(blocks))

    def generators(self, t):
        return tuple(self.generator(t, a) for a in _AXES)


def unitary(space, field, t):
    """Propagator exp(-i phi . J t) of the field Hamiltonian."""
    if t < 0.0 or not np.isfinite(t):
        raise InvalidArgument(f"t must be finite and >= 0, got {t}")
    return FieldBasis(space, field).unitary(t)


# ---------------------------------------------------------------------------
# Fixed-step semigroup integration in Theta
# ---------------------------------------------------------------------------

_BASE_STEP = 0.01
_RICHARDSON_TOL = 1e-9
_MAX_HALVINGS = 12


def _rk4_linear(matvec, vec, span, nsteps):
    """Classical fixed-step RK4 for the autonomous linear system v' = L v."""
    h = span / nsteps
    v = vec
    for _ in range(nsteps):
        k1 = matvec(v)
        k2 = matvec(v + (0.5 * h) * k1)
        k3 = matvec(v + (0.5 * h) * k2)
        k4 = matvec(v + h * k3)
        v = v + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return v


def _advance_semigroup(matvec, vec, span):
    """Integrate v' = L v over span, halving the step until two successive
    resolutions agree below the Richardson tolerance."""
    if span == 0.0:
        return vec
    nsteps = max(1, math.ceil(span / _BASE_STEP))
    coarse = _rk4_linear(matvec, vec, span, nsteps)
    for _ in range(_MAX_HALVINGS):
        nsteps *= 2
        fine = _rk4_linear(matvec, vec, span, nsteps)
        if float(np.max(np.abs(fine - coarse))) < _RICHARDSON_TOL:
            return fine
        coarse = fine
    raise NumericalError(
        f"dephasing integration did not converge below {_RICHARDSON_TOL} "
        f"over span {span}")


def dephase(rho0, superoperator, spec, t):
    """Apply the dephasing semigroup for duration t of the given noise profile.

    Integrates d rho / d Theta = L[rho] up to Theta(t) with step-halving
    verification. Positivity drift below -1e-6 raises NumericalError.
    """
    theta = integrated_strength(spec, t)
    if theta == 0.0:
        return DensityOperator(rho0.space, rho0.matrix.copy())
    d = rho0.space.total_dim
    vec = rho0.matrix.reshape(d * d)
    out = _advance_semigroup(superoperator.matrix.dot, vec, theta)
    mat = out.reshape(d, d)
    # The generator preserves Hermiticity exactly; symmetrize rounding noise.
    mat = (mat + mat.conj().T) / 2.0
    if np.linalg.eigvalsh(mat).min() < -1e-6:
        raise NumericalError("dephasing produced an eigenvalue below -1e-6")
    return DensityOperator(rho0.space, mat)


# ---------------------------------------------------------------------------
# Split evolution
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class EvolutionResult:
    """Evolved state together with the pieces of the split propagation.

    rho = unitary . rho_dephased . unitary^dag holds whenever split_valid;
    when the parallel assumption was waived the fields store the joint
    reference solution and its rotating-frame pullback instead.
    """

    rho: DensityOperator
    rho_dephased: DensityOperator
    unitary: BlockOperator
    t: float
    split_valid: bool = True


def _line_angle(u, v):
    """Angle between the lines spanned by u and v (sign-insensitive)."""
    a = np.asarray(u, dtype=float)
    b = np.asarray(v, dtype=float)
    na, nb = np.linalg.norm(a), np.linalg.norm(b)
    if na == 0.0 or nb == 0.0:
        return 0.0
    cross = np.linalg.norm(np.cross(a, b))
    dot = abs(float(a @ b))
    return math.atan2(cross, dot)


def evolve(rho0, field, spec, t, superoperator=None, allow_nonparallel=False):
    """Propagate rho0 for time t under field phi and dephasing spec.

    The fast path requires the field direction to lie along the noise axis
    (within 1e-8 rad, sign ignored); then dephasing and rotation commute and
    are applied in sequence. With allow_nonparallel=True a violation falls
    back to the joint reference integrator instead of raising.

    A prebuilt superoperator for (rho0.space, spec) may be passed to avoid
    reassembly in loops.
    """
    if t < 0.0 or not np.isfinite(t):
        raise InvalidArgument(f"t must be finite and >= 0, got {t}")
    space = rho0.space
    noiseless = spec.gamma == 0.0 or spec.kind is NoiseKind.NONE
    if not noiseless and _line_angle(field.phi, spec.axis) > 1e-8:
        if not allow_nonparallel:
            raise AssumptionViolated(
                "field direction is not parallel to the dephasing axis; "
                "pass allow_nonparallel=True to use the joint reference integrator")
        u = unitary(space, field, t)
        rho_t = full_gkls_reference(rho0, field, spec, t)
        pulled_back = u.dagger().sandwich(rho_t.matrix)
        pulled_back = (pulled_back + pulled_back.conj().T) / 2.0
        return EvolutionResult(
            rho=rho_t,
            rho_dephased=DensityOperator(space, pulled_back),
            unitary=u,
            t=t,
            split_valid=False,
        )
    if noiseless:
        rho_deph = DensityOperator(space, rho0.matrix.copy())
    else:
        if superoperator is None:
            superoperator = build_dephasing_superoperator(space, spec)
        rho_deph = dephase(rho0, superoperator, spec, t)
    u = unitary(space, field, t)
    rotated = u.sandwich(rho_deph.matrix)
    rotated = (rotated + rotated.conj().T) / 2.0
    return EvolutionResult(
        rho=DensityOperator(space, rotated),
        rho_dephased=rho_deph,
        unitary=u,
        t=t,
        split_valid=True,
    )


# ---------------------------------------------------------------------------
# Oracle 1: joint integration in the collective basis
# ---------------------------------------------------------------------------

_REFERENCE_TOL = 1e-10
_REFERENCE_MAX_DOUBLINGS = 14


def _integrate_doubling(rhs, y0, t, initial_steps):
    """Fixed-step RK4 with resolution doubling until two runs agree to 1e-10."""

    def run(nsteps):
        h = t / nsteps
        y = y0
        for i in range(nsteps):
            u = i * h
            k1 = rhs(u, y)
            k2 = rhs(u + 0.5 * h, y + (0.5 * h) * k1)
            k3 = rhs(u + 0.5 * h, y + (0.5 * h) * k2)
            k4 = rhs(u + h, y + h * k3)
            y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        return y

    nsteps = initial_steps
    coarse = run(nsteps)
    for _ in range(_REFERENCE_MAX_DOUBLINGS):
        nsteps *= 2
        fine = run(nsteps)
        if float(np.max(np.abs(fine - coarse))) < _REFERENCE_TOL:
            return fine
        coarse = fine
    raise NumericalError("reference integration did not converge to 1e-10")


def full_gkls_reference(rho0, field, spec, t):
    """Joint real-time integration of unitary plus dephasing dynamics.

    Makes no use of the parallel-axis split: the time-dependent rate
    gamma_t multiplies the rate-free generator at every step. Intended as a
    cross-check at moderate dimension (d <= 400).
    """
    if t < 0.0 or not np.isfinite(t):
        raise InvalidArgument(f"t must be finite and >= 0, got {t}")
    space = rho0.space
    d = space.total_dim
    if d > 400:
        raise InvalidArgument(f"reference integrator limited to d <= 400, got {d}")
    if t == 0.0:
        return DensityOperator(space, rho0.matrix.copy())
    ham = hamiltonian(space, field).to_dense()
    lmat = build_dephasing_superoperator(space, spec).matrix

    def rhs(u, y):
        rho = y.reshape(d, d)
        out = -1j * (ham @ rho - rho @ ham)
        g = gamma_profile(spec, u)
        if g != 0.0:
            out = out + g * (lmat @ y).reshape(d, d)
        return out.reshape(d * d)

    initial = max(8, math.ceil(t * (field.norm + 1.0) / 0.05),
                  math.ceil(integrated_strength(spec, t) / 0.05))
    y = _integrate_doubling(rhs, rho0.matrix.reshape(d * d), t, initial)
    mat = y.reshape(d, d)
    mat = (mat + mat.conj().T) / 2.0
    return DensityOperator(space, mat)


# ---------------------------------------------------------------------------
# Oracle 2: full 2^N product-space integration
# ---------------------------------------------------------------------------

_PAULI = {
    "x": np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex),
    "y": np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex),
    "z": np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex),
}


def _site_operator(n, site, op2):
    """Embed a single-site 2x2 operator at the given site (site 0 leftmost)."""
    mat = sparse.identity(1, dtype=complex, format="csr")
    for k in range(n):
        factor = sparse.csr_matrix(op2) if k == site else sparse.identity(2, dtype=complex, format="csr")
        mat = sparse.kron(mat, factor, format="csr")
    return mat


def _collective_full(n, axis):
    """J_axis on the 2^N product space."""
    dim = 2 ** n
    total = sparse.csr_matrix((dim, dim), dtype=complex)
    for site in range(n):
        total = total + _site_operator(n, site, _PAULI[axis] / 2.0)
    return total


def coupled_multiplets(n):
    """Orthonormal total-spin multiplets of N spins in the product basis.

    Couples one spin at a time with Clebsch-Gordan coefficients. Returns a
    dict mapping 2j to a list of arrays of shape (2j+1, 2^N); each array is
    one multiplet copy with rows ordered by decreasing m. The number of
    copies per sector equals the collective-basis multiplicity, which makes
    this an independent check of the counting.
    """
    if n < 1 or n > 12:
        raise InvalidArgument(f"coupled multiplets supported for 1 <= N <= 12, got {n}")
    # Start with one spin: j = 1/2, rows m = +1/2, -1/2; site basis (up, down).
    multiplets = {1: [np.eye(2, dtype=complex)]}
    for _ in range(n - 1):
        grown = {}
        for twoj, copies in multiplets.items():
            j = twoj / 2.0
            for rows in copies:
                dim_old, size = rows.shape
                up = np.zeros((dim_old + 1, size * 2), dtype=complex)
                # j + 1/2 branch: m runs j+1/2 ... -(j+1/2), rows m decreasing.
                # In the old sector, m - 1/2 sits at row idx and m + 1/2 at
                # row idx - 1.
                for idx in range(dim_old + 1):
                    m = (twoj + 1) / 2.0 - idx
                    cu = math.sqrt((j + m + 0.5) / (2.0 * j + 1.0))
                    cd = math.sqrt((j - m + 0.5) / (2.0 * j + 1.0))
                    if idx < dim_old:
                        up[idx, 0::2] += cu * rows[idx]          # |j, m-1/2> (x) |up>
                    if idx > 0:
                        up[idx, 1::2] += cd * rows[idx - 1]      # |j, m+1/2> (x) |down>
                grown.setdefault(twoj + 1, []).append(up)
                if twoj > 0:
                    down = np.zeros((dim_old - 1, size * 2), dtype=complex)
                    # Here m - 1/2 sits at row idx + 1 and m + 1/2 at row idx.
                    for idx in range(dim_old - 1):
                        m = (twoj - 1) / 2.0 - idx
                        cu = math.sqrt((j - m + 0.5) / (2.0 * j + 1.0))
                        cd = math.sqrt((j + m + 0.5) / (2.0 * j + 1.0))
                        down[idx, 0::2] += -cu * rows[idx + 1]   # |j, m-1/2> (x) |up>
                        down[idx, 1::2] += cd * rows[idx]        # |j, m+1/2> (x) |down>
                    grown.setdefault(twoj - 1, []).append(down)
        multiplets = grown
    # Tensor-product bit order: the newest spin is the fastest index, matching
    # _site_operator with site 0 leftmost.
    return multiplets


def embed_collective(rho, multiplets):
    """Lift a collective density matrix to the 2^N product space.

    Sector weight is shared uniformly over the degenerate multiplet copies,
    which is the unique trace-preserving permutation-invariant assignment.
    """
    space = rho.space
    dim_full = next(iter(multiplets.values()))[0].shape[1]
    out = np.zeros((dim_full, dim_full), dtype=complex)
    for sec in space.sectors:
        copies = multiplets.get(sec.twoj, [])
        if len(copies) != sec.multiplicity:
            raise InvalidArgument("multiplet count does not match sector multiplicity")
        sl = slice(sec.offset, sec.offset + sec.dim)
        block = rho.matrix[sl, sl]
        for rows in copies:
            out += rows.conj().T @ block @ rows / sec.multiplicity
    return out


def state_fidelity(rho_a, rho_b):
    """Uhlmann fidelity (tr sqrt(sqrt(a) b sqrt(a)))^2 for dense matrices."""
    wa, va = np.linalg.eigh(rho_a)
    sq = (va * np.sqrt(np.clip(wa, 0.0, None))) @ va.conj().T
    inner = sq @ rho_b @ sq
    w = np.linalg.eigvalsh((inner + inner.conj().T) / 2.0)
    return float(np.sum(np.sqrt(np.clip(w, 0.0, None))) ** 2)


@dataclass(frozen=True, eq=False)
class HilbertComparison:
    """Collective moments from the product-space oracle and the fast path."""

    first_moments_full: np.ndarray
    second_moments_full: np.ndarray
    first_moments_dicke: np.ndarray
    second_moments_dicke: np.ndarray
    fidelity: float


def full_hilbert_reference(n_particles, initial, field, spec, t):
    """Brute-force product-space dynamics for a max-sector initial state.

    Integrates the same master equation with per-site coupling operators in
    the full 2^N space (no collective reduction anywhere), then reports the
    first and second collective moments from both the product-space solution
    and the collective fast path, together with the fidelity between the
    fast-path state lifted to the product space and the brute-force state.
    """
    n = int(n_particles)
    if n < 1 or n > 6:
        raise InvalidArgument(f"product-space oracle limited to 1 <= N <= 6, got {n}")
    if t < 0.0 or not np.isfinite(t):
        raise InvalidArgument(f"t must be finite and >= 0, got {t}")
    space = initial.space
    if space.n_particles != n:
        raise InvalidArgument("initial state lives on a different particle number")
    if initial.max_sector_weight() < 1.0 - 1e-12:
        raise InvalidArgument("initial state must be supported on the maximal sector")

    multiplets = coupled_multiplets(n)
    top = multiplets[space.max_sector.twoj][0]
    sec = space.max_sector
    psi_full = top.conj().T @ initial.amplitudes[sec.offset:sec.offset + sec.dim]

    dim = 2 ** n
    ham = sum(field.phi[i] * _collective_full(n, a) for i, a in enumerate(_AXES))
    ham = ham.toarray()
    axis = np.asarray(spec.axis, dtype=float)
    sites = [
        sum(axis[i] * _site_operator(n, site, _PAULI[a] / 2.0)
            for i, a in enumerate(_AXES))
        for site in range(n)
    ]
    sites = [s.toarray() for s in sites]

    def rhs(u, y):
        rho = y.reshape(dim, dim)
        out = -1j * (ham @ rho - rho @ ham)
        g = gamma_profile(spec, u)
        if g != 0.0:
            acc = np.zeros_like(rho)
            for s in sites:
                acc += s @ rho @ s
            out = out + 2.0 * g * (acc - n * rho)
        return out.reshape(dim * dim)

    rho0_full = np.outer(psi_full, psi_full.conj())
    if t == 0.0:
        rho_full = rho0_full
    else:
        initial_steps = max(8, math.ceil(t * (field.norm + 1.0) / 0.05),
                            math.ceil(integrated_strength(spec, t) / 0.05))
        y = _integrate_doubling(rhs, rho0_full.reshape(dim * dim), t, initial_steps)
        rho_full = y.reshape(dim, dim)
        rho_full = (rho_full + rho_full.conj().T) / 2.0

    jops_full = [_collective_full(n, a).toarray() for a in _AXES]
    first_full = np.array([np.trace(j @ rho_full).real for j in jops_full])
    second_full = np.array([[np.trace(ja @ jb @ rho_full) for jb in jops_full]
                            for ja in jops_full])

    result = evolve(initial.projector(), field, spec, t,
                    allow_nonparallel=True)
    jops = [collective_operator(space, a) for a in _AXES]
    first_dicke = np.array([jops[i].expectation(result.rho.matrix).real for i in range(3)])
    second_dicke = np.array([[(jops[a] @ jops[b]).expectation(result.rho.matrix)
                              for b in range(3)] for a in range(3)])

    lifted = embed_collective(result.rho, multiplets)
    fid = state_fidelity(lifted, rho_full)

    return HilbertComparison(
        first_moments_full=first_full,
        second_moments_full=second_full,
        first_moments_dicke=first_dicke,
        second_moments_dicke=second_dicke,
        fidelity=fid,
    )
