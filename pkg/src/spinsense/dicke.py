"""Permutation-invariant (Dicke) representation of N spin-1/2 particles.

A collective state of N exchangeable two-level systems decomposes into
total-spin sectors j = N/2, N/2 - 1, ..., down to 0 (N even) or 1/2 (N odd).
Operators symmetric under particle exchange are block diagonal in this basis,
so the state space grows quadratically with N instead of exponentially.

Total spin j and projection m are represented internally as the integers
2j and 2m, which keeps sector bookkeeping exact for even and odd N alike.
Within each sector the basis is ordered by decreasing m; sectors are ordered
by decreasing j.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateProbe, InvalidArgument

# Kinds accepted by collective_operator.
_OPERATOR_KINDS = ("x", "y", "z", "plus", "minus")


def _as_twice(value, name):
    """Convert a (half-)integer quantum number to the exact integer 2*value."""
    twice = 2.0 * value
    rounded = int(round(twice))
    if abs(twice - rounded) > 1e-9:
        raise InvalidArgument(f"{name} must be integer or half-integer, got {value}")
    return rounded


def dicke_dimension(n_particles):
    """Dimension of the block-diagonal collective state space.

    Counts one basis element per (j, m) pair, not per degenerate copy:
    (N+1)(N+3)/4 for odd N and (N+2)^2/4 for even N.
    """
    n = int(n_particles)
    if n < 1 or n != n_particles:
        raise InvalidArgument(f"n_particles must be a positive integer, got {n_particles}")
    if n % 2:
        return (n + 1) * (n + 3) // 4
    return (n + 2) ** 2 // 4


def degeneracy(n_particles, j):
    """Number of copies of the spin-j multiplet in the decomposition of N spins.

    Uses exact integer arithmetic:

        d_N^j = N! (2j + 1) / ((N/2 - j)! (N/2 + j + 1)!)

    Parameters
    ----------
    n_particles : int
        Number of spin-1/2 particles.
    j : int or float
        Total spin, integer or half-integer, with 0 <= j <= N/2 and
        2j of the same parity as N.
    """
    n = int(n_particles)
    if n < 1:
        raise InvalidArgument(f"n_particles must be positive, got {n_particles}")
    twoj = _as_twice(j, "j")
    if twoj < 0 or twoj > n or (n - twoj) % 2:
        raise InvalidArgument(f"j={j} is not a valid sector for N={n}")
    k = (n - twoj) // 2
    numerator = math.factorial(n) * (twoj + 1)
    denominator = math.factorial(k) * math.factorial(n - k + 1)
    count, remainder = divmod(numerator, denominator)
    if remainder:
        raise InvalidArgument(f"degeneracy is not integral for N={n}, j={j}")
    return count


def cumulative_degeneracy(n_particles, j):
    """Number of multiplets with total spin >= j, equal to C(N, N/2 - j)."""
    n = int(n_particles)
    twoj = _as_twice(j, "j")
    if n < 1 or twoj < 0 or twoj > n or (n - twoj) % 2:
        raise InvalidArgument(f"j={j} is not a valid sector for N={n_particles}")
    return math.comb(n, (n - twoj) // 2)


@dataclass(frozen=True)
class Sector:
    """One total-spin block: 2j (exact), its dimension 2j+1, the row offset
    of the block inside the stacked basis, and its multiplicity d_N^j."""

    twoj: int
    dim: int
    offset: int
    multiplicity: int

    @property
    def j(self):
        return self.twoj / 2.0

    def m_values(self):
        """Projections m in decreasing order, as floats."""
        return np.arange(self.twoj, -self.twoj - 2, -2) / 2.0


@dataclass(frozen=True)
class DickeSpace:
    """Index bookkeeping for the collective basis of N spins."""

    n_particles: int
    sectors: tuple
    total_dim: int

    def sector(self, twoj):
        for s in self.sectors:
            if s.twoj == twoj:
                return s
        raise InvalidArgument(f"no sector with 2j={twoj} for N={self.n_particles}")

    def index(self, twoj, twom):
        """Flat basis index of |j, m> given 2j and 2m."""
        s = self.sector(twoj)
        if abs(twom) > twoj or (twoj - twom) % 2:
            raise InvalidArgument(f"2m={twom} invalid in sector 2j={twoj}")
        return s.offset + (twoj - twom) // 2

    @property
    def max_sector(self):
        return self.sectors[0]


def build_space(n_particles):
    """Construct the sector layout for N particles.

    Sectors are ordered by decreasing j; the stacked dimension matches
    dicke_dimension and the multiplicity-weighted dimensions sum to 2^N.
    """
    n = int(n_particles)
    if n < 1 or n != n_particles:
        raise InvalidArgument(f"n_particles must be a positive integer, got {n_particles}")
    sectors = []
    offset = 0
    for twoj in range(n, -1, -2):
        dim = twoj + 1
        sectors.append(Sector(twoj=twoj, dim=dim, offset=offset,
                              multiplicity=degeneracy(n, twoj / 2.0)))
        offset += dim
    if offset != dicke_dimension(n):
        raise InvalidArgument(f"sector layout inconsistent for N={n}")
    return DickeSpace(n_particles=n, sectors=tuple(sectors), total_dim=offset)


# ---------------------------------------------------------------------------
# Block-diagonal operators
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class BlockOperator:
    """Operator that is block diagonal over the total-spin sectors.

    Blocks are dense complex arrays, one per sector, in sector order.
    """

    space: DickeSpace
    blocks: tuple

    def __post_init__(self):
        if len(self.blocks) != len(self.space.sectors):
            raise InvalidArgument("one block per sector required")
        for s, b in zip(self.space.sectors, self.blocks):
            if b.shape != (s.dim, s.dim):
                raise InvalidArgument(
                    f"block for 2j={s.twoj} has shape {b.shape}, expected {(s.dim, s.dim)}")

    def to_dense(self):
        out = np.zeros((self.space.total_dim, self.space.total_dim), dtype=complex)
        for s, b in zip(self.space.sectors, self.blocks):
            sl = slice(s.offset, s.offset + s.dim)
            out[sl, sl] = b
        return out

    def dagger(self):
        return BlockOperator(self.space, tuple(b.conj().T for b in self.blocks))

    def __add__(self, other):
        self._check_compatible(other)
        return BlockOperator(self.space, tuple(a + b for a, b in zip(self.blocks, other.blocks)))

    def __sub__(self, other):
        self._check_compatible(other)
        return BlockOperator(self.space, tuple(a - b for a, b in zip(self.blocks, other.blocks)))

    def __mul__(self, scalar):
        return BlockOperator(self.space, tuple(scalar * b for b in self.blocks))

    __rmul__ = __mul__

    def __matmul__(self, other):
        self._check_compatible(other)
        return BlockOperator(self.space, tuple(a @ b for a, b in zip(self.blocks, other.blocks)))

    def _check_compatible(self, other):
        if not isinstance(other, BlockOperator):
            raise InvalidArgument("expected a BlockOperator")
        if other.space is not self.space and other.space != self.space:
            raise InvalidArgument("operators act on different spaces")

    # Dense-matrix products that exploit the block structure.

    def left_apply(self, matrix):
        """self @ matrix for a dense d x d matrix."""
        out = np.empty_like(matrix, dtype=complex)
        for s, b in zip(self.space.sectors, self.blocks):
            sl = slice(s.offset, s.offset + s.dim)
            out[sl, :] = b @ matrix[sl, :]
        return out

    def right_apply(self, matrix):
        """matrix @ self for a dense d x d matrix."""
        out = np.empty_like(matrix, dtype=complex)
        for s, b in zip(self.space.sectors, self.blocks):
            sl = slice(s.offset, s.offset + s.dim)
            out[:, sl] = matrix[:, sl] @ b
        return out

    def commutator(self, matrix):
        return self.left_apply(matrix) - self.right_apply(matrix)

    def sandwich(self, matrix):
        """self @ matrix @ self.dagger()."""
        daggered = [b.conj().T for b in self.blocks]
        out = np.empty_like(matrix, dtype=complex)
        for sr, br in zip(self.space.sectors, self.blocks):
            rows = slice(sr.offset, sr.offset + sr.dim)
            br_m = br @ matrix[rows, :]
            for sc, bcd in zip(self.space.sectors, daggered):
                cols = slice(sc.offset, sc.offset + sc.dim)
                out[rows, cols] = br_m[:, cols] @ bcd
        return out

    def expectation(self, rho_matrix):
        """Tr(self @ rho) for a dense density matrix."""
        total = 0.0 + 0.0j
        for s, b in zip(self.space.sectors, self.blocks):
            sl = slice(s.offset, s.offset + s.dim)
            total += np.einsum("ij,ji->", b, rho_matrix[sl, sl])
        return total


def _spin_block(twoj, kind):
    """Standard spin-j matrix of J_kind in the |j, m> basis, m decreasing."""
    dim = twoj + 1
    j = twoj / 2.0
    m = np.arange(twoj, -twoj - 2, -2) / 2.0
    if kind == "z":
        return np.diag(m).astype(complex)
    # Raising part: <j, m+1| J_+ |j, m> = sqrt((j - m)(j + m + 1)).
    plus = np.zeros((dim, dim), dtype=complex)
    amp = np.sqrt((j - m[1:]) * (j + m[1:] + 1.0))
    plus[np.arange(dim - 1), np.arange(1, dim)] = amp
    if kind == "plus":
        return plus
    if kind == "minus":
        return plus.conj().T
    if kind == "x":
        return (plus + plus.conj().T) / 2.0
    if kind == "y":
        return (plus - plus.conj().T) / 2.0j
    raise InvalidArgument(f"unknown operator kind {kind!r}")


def collective_operator(space, kind):
    """Collective angular-momentum operator J_kind as a BlockOperator.

    Parameters
    ----------
    space : DickeSpace
    kind : str
        One of "x", "y", "z", "plus", "minus".
    """
    if kind not in _OPERATOR_KINDS:
        raise InvalidArgument(f"kind must be one of {_OPERATOR_KINDS}, got {kind!r}")
    return BlockOperator(space, tuple(_spin_block(s.twoj, kind) for s in space.sectors))


# ---------------------------------------------------------------------------
# States
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class StateVector:
    """Pure state over the stacked (j, m) basis. Unit norm is enforced."""

    space: DickeSpace
    amplitudes: np.ndarray

    def __post_init__(self):
        amp = np.asarray(self.amplitudes, dtype=complex)
        if amp.shape != (self.space.total_dim,):
            raise InvalidArgument(
                f"amplitudes have shape {amp.shape}, expected ({self.space.total_dim},)")
        norm = np.linalg.norm(amp)
        if abs(norm - 1.0) > 1e-12:
            raise InvalidArgument(f"state norm {norm!r} deviates from 1 beyond 1e-12")
        object.__setattr__(self, "amplitudes", amp)

    def projector(self):
        return DensityOperator(self.space, np.outer(self.amplitudes, self.amplitudes.conj()))

    def max_sector_weight(self):
        s = self.space.max_sector
        block = self.amplitudes[s.offset:s.offset + s.dim]
        return float(np.vdot(block, block).real)


@dataclass(frozen=True, eq=False)
class DensityOperator:
    """Mixed state over the stacked basis; block structure is implicit.

    Validates Hermiticity (1e-10), unit trace (1e-10) and positivity
    (eigenvalues >= -1e-8) on construction.
    """

    space: DickeSpace
    matrix: np.ndarray

    def __post_init__(self):
        mat = np.ascontiguousarray(self.matrix, dtype=complex)
        d = self.space.total_dim
        if mat.shape != (d, d):
            raise InvalidArgument(f"matrix has shape {mat.shape}, expected ({d}, {d})")
        if np.max(np.abs(mat - mat.conj().T)) > 1e-10:
            raise InvalidArgument("density matrix is not Hermitian within 1e-10")
        trace = np.trace(mat).real
        if abs(trace - 1.0) > 1e-10:
            raise InvalidArgument(f"density matrix trace {trace!r} deviates from 1 beyond 1e-10")
        if np.linalg.eigvalsh(mat).min() < -1e-8:
            raise InvalidArgument("density matrix has an eigenvalue below -1e-8")
        object.__setattr__(self, "matrix", mat)

    def purity(self):
        return float(np.einsum("ij,ji->", self.matrix, self.matrix).real)

    def sector_weights(self):
        """Population carried by each total-spin sector."""
        diag = np.diag(self.matrix).real
        return np.array([diag[s.offset:s.offset + s.dim].sum() for s in self.space.sectors])


def coherent_state(space, theta, phi):
    """Spin-coherent state on the maximal sector, pointing along (theta, phi).

    Amplitudes follow the binomial construction

        <j, m | theta, phi> = sqrt(C(2j, j+m)) cos(theta/2)^(j+m)
                              sin(theta/2)^(j-m) exp(-i (j-m) phi)

    with j = N/2; all other sectors carry zero amplitude.
    """
    if not (np.isfinite(theta) and np.isfinite(phi)):
        raise InvalidArgument("theta and phi must be finite")
    s = space.max_sector
    twoj = s.twoj
    k = np.arange(0, twoj + 1)          # k = j - m, m decreasing
    binom = np.array([math.comb(twoj, int(kk)) for kk in k], dtype=float)
    c, sn = np.cos(theta / 2.0), np.sin(theta / 2.0)
    amp_max = np.sqrt(binom) * c ** (twoj - k) * sn ** k * np.exp(-1j * k * phi)
    amplitudes = np.zeros(space.total_dim, dtype=complex)
    amplitudes[s.offset:s.offset + s.dim] = amp_max
    norm = np.linalg.norm(amplitudes)
    return StateVector(space, amplitudes / norm)


# Seed direction (theta, phi) for each Cartesian axis; the partner branch of
# the superposition sits at the antipode (pi - theta, phi + pi).
_GHZ_SEEDS = {"x": (np.pi / 2.0, 0.0), "y": (np.pi / 2.0, np.pi / 2.0), "z": (0.0, 0.0)}


def ghz_state(space, axis):
    """Equal superposition of the two coherent states along +axis and -axis.

    The two branches are antipodal, hence exactly orthogonal, so the
    1/sqrt(2) normalization is exact. The phase convention is fixed by the
    coherent-state construction itself.
    """
    if axis not in _GHZ_SEEDS:
        raise InvalidArgument(f"axis must be one of ('x', 'y', 'z'), got {axis!r}")
    theta, phi = _GHZ_SEEDS[axis]
    branch_a = coherent_state(space, theta, phi)
    branch_b = coherent_state(space, np.pi - theta, phi + np.pi)
    amplitudes = (branch_a.amplitudes + branch_b.amplitudes) / np.sqrt(2.0)
    return StateVector(space, amplitudes)


def simultaneous_probe(space):
    """Normalized sum of the three axis superposition states.

    The three components interfere, so the result is normalized numerically;
    a pre-normalization norm below 1e-10 raises DegenerateProbe.
    """
    total = np.zeros(space.total_dim, dtype=complex)
    for axis in ("x", "y", "z"):
        total = total + ghz_state(space, axis).amplitudes
    norm = np.linalg.norm(total)
    if norm < 1e-10:
        raise DegenerateProbe("superposed probe has vanishing norm")
    return StateVector(space, total / norm)
