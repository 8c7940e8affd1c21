"""Collective description of independent local dephasing.

Each particle couples to its own environment through the same single-spin
operator a = axis . sigma/2 with |axis| = 2, so a^2 = 1 on every site. The
resulting double-commutator dissipator is permutation invariant and closes
on the block-diagonal (j, m) representation, but unlike the Hamiltonian it
also connects neighbouring total-spin sectors j -> j, j-1, j+1.

The generator used everywhere downstream is rate-free,

    L[rho] = 2 * (sum_n a_n rho a_n - N rho),

so that the physical evolution is d rho / d Theta = L[rho] where Theta(t)
is the integrated dephasing strength of the chosen noise profile. The
decomposition of a into ladder operators yields, per source element
|j, m><j, m'|, at most 27 target couplings: a destination sector shift in
{0, -1, +1} combined with a ladder action {+, -, z} on each side.
"""

from __future__ import annotations

import enum
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import sparse

from .dicke import DickeSpace
from .errors import InvalidArgument


class NoiseKind(str, enum.Enum):
    """Temporal profile of the dephasing rate."""

    MARKOVIAN = "markovian"
    NONMARKOVIAN = "nonmarkovian"
    NONE = "none"


@dataclass(frozen=True)
class NoiseSpec:
    """Dephasing model: profile kind, strength gamma, and local coupling axis.

    The axis is stored renormalized to Euclidean norm 2 (so the single-site
    coupling squares to the identity); inputs further than 1e-6 from that
    normalization trigger a warning. kind = NONE forces gamma = 0.
    """

    kind: NoiseKind
    gamma: float
    axis: tuple

    def __init__(self, kind, gamma, axis):
        kind = NoiseKind(kind)
        gamma = float(gamma)
        if not np.isfinite(gamma) or gamma < 0.0:
            raise InvalidArgument(f"gamma must be finite and >= 0, got {gamma}")
        if kind is NoiseKind.NONE:
            gamma = 0.0
        vec = np.asarray(axis, dtype=float)
        if vec.shape != (3,) or not np.all(np.isfinite(vec)):
            raise InvalidArgument(f"axis must be 3 finite components, got {axis}")
        norm = float(np.linalg.norm(vec))
        if norm == 0.0:
            raise InvalidArgument("axis must be nonzero")
        if abs(norm - 2.0) > 1e-6:
            warnings.warn(
                f"noise axis renormalized from |axis|={norm:.6g} to 2", stacklevel=2)
        vec = 2.0 * vec / norm
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "gamma", gamma)
        object.__setattr__(self, "axis", (vec[0], vec[1], vec[2]))

    @property
    def ladder_weight(self):
        """Complex weight (axis_x + i axis_y) / 2 of the ladder part of a."""
        return (self.axis[0] + 1j * self.axis[1]) / 2.0


def gamma_profile(spec, t):
    """Instantaneous dephasing rate gamma_t at time t >= 0."""
    if t < 0.0 or not np.isfinite(t):
        raise InvalidArgument(f"t must be finite and >= 0, got {t}")
    if spec.kind is NoiseKind.MARKOVIAN:
        return spec.gamma
    if spec.kind is NoiseKind.NONMARKOVIAN:
        return spec.gamma ** 2 * t
    return 0.0


def integrated_strength(spec, t):
    """Theta(t) = integral of gamma_t from 0 to t; the natural evolution clock."""
    if t < 0.0 or not np.isfinite(t):
        raise InvalidArgument(f"t must be finite and >= 0, got {t}")
    if spec.kind is NoiseKind.MARKOVIAN:
        return spec.gamma * t
    if spec.kind is NoiseKind.NONMARKOVIAN:
        return spec.gamma ** 2 * t ** 2 / 2.0
    return 0.0


# ---------------------------------------------------------------------------
# Ladder factors for one sector shift
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LadderFactors:
    """Matrix-element factors for raising, lowering and diagonal action."""

    plus: float
    minus: float
    z: float

    def get(self, key):
        return {"plus": self.plus, "minus": self.minus, "z": self.z}[key]


def _stay_factors(j, m):
    """Factors for targets inside the same sector (spin-j ladder elements)."""
    return LadderFactors(
        plus=np.sqrt((j - m) * (j + m + 1.0)),
        minus=np.sqrt((j + m) * (j - m + 1.0)),
        z=m,
    )


def _drop_factors(j, m):
    """Factors for targets in the sector below, j -> j - 1."""
    return LadderFactors(
        plus=np.sqrt((j - m) * (j - m - 1.0)),
        minus=-np.sqrt((j + m) * (j + m - 1.0)),
        z=np.sqrt((j + m) * (j - m)),
    )


def _lift_factors(j, m):
    """Factors for targets in the sector above, j -> j + 1."""
    return LadderFactors(
        plus=-np.sqrt((j + m + 1.0) * (j + m + 2.0)),
        minus=np.sqrt((j - m + 1.0) * (j - m + 2.0)),
        z=np.sqrt((j + m + 1.0) * (j - m + 1.0)),
    )


@dataclass(frozen=True)
class CouplingCoefficients:
    """All ladder factors and sector weights for one source element |j,m><j,m'|.

    stay_* feed targets in the same sector, drop_* the sector below, lift_*
    the sector above; *_ket evaluates at m, *_bra at m'. The lambda weights
    collect the multiplicity bookkeeping of the three destinations.
    """

    stay_ket: LadderFactors
    stay_bra: LadderFactors
    drop_ket: LadderFactors
    drop_bra: LadderFactors
    lift_ket: LadderFactors
    lift_bra: LadderFactors
    lambda_stay: float
    lambda_drop: float
    lambda_lift: float


def _lambda_weights(n, j):
    """Sector weights; the j = 0 singular cases are defined as 0 because every
    ladder factor vanishes there as well."""
    half_n = n / 2.0
    if j == 0.0:
        lam_stay = 0.0
        lam_drop = 0.0
    else:
        lam_stay = (half_n + 1.0) / (2.0 * j * (j + 1.0))
        lam_drop = (half_n + j + 1.0) / (2.0 * j * (2.0 * j + 1.0))
    lam_lift = (half_n - j) / (2.0 * (j + 1.0) * (2.0 * j + 1.0))
    return lam_stay, lam_drop, lam_lift


def local_coupling_coefficients(n_particles, j, m, m_bra):
    """Coefficient bundle for the source element |j, m><j, m_bra|.

    Validates that (j, m, m_bra) is a legal source for N particles and
    returns exact-formula ladder factors for the three destination sectors
    together with the lambda weights.
    """
    n = int(n_particles)
    if n < 1:
        raise InvalidArgument(f"n_particles must be positive, got {n_particles}")
    twoj = int(round(2.0 * j))
    twom = int(round(2.0 * m))
    twomb = int(round(2.0 * m_bra))
    if abs(2.0 * j - twoj) > 1e-9 or abs(2.0 * m - twom) > 1e-9 or abs(2.0 * m_bra - twomb) > 1e-9:
        raise InvalidArgument("j, m, m_bra must be integer or half-integer")
    if twoj < 0 or twoj > n or (n - twoj) % 2:
        raise InvalidArgument(f"j={j} is not a sector of N={n}")
    for label, tm in (("m", twom), ("m_bra", twomb)):
        if abs(tm) > twoj or (twoj - tm) % 2:
            raise InvalidArgument(f"{label} is out of range for j={j}")
    jf, mf, mbf = twoj / 2.0, twom / 2.0, twomb / 2.0
    lam_stay, lam_drop, lam_lift = _lambda_weights(n, jf)
    return CouplingCoefficients(
        stay_ket=_stay_factors(jf, mf), stay_bra=_stay_factors(jf, mbf),
        drop_ket=_drop_factors(jf, mf), drop_bra=_drop_factors(jf, mbf),
        lift_ket=_lift_factors(jf, mf), lift_bra=_lift_factors(jf, mbf),
        lambda_stay=lam_stay, lambda_drop=lam_drop, lambda_lift=lam_lift,
    )


# ---------------------------------------------------------------------------
# Superoperator assembly
# ---------------------------------------------------------------------------

# Deterministic channel order: sector shift outer, then (ket, bra) ladder pair.
_SHIFTS = ((0, "stay"), (-2, "drop"), (2, "lift"))
_LADDERS = ("plus", "minus", "z")
_DELTA = {"plus": 2, "minus": -2, "z": 0}
_FLIP = {"plus": "minus", "minus": "plus", "z": "z"}


@dataclass(frozen=True, eq=False)
class DephasingSuperoperator:
    """Rate-free dephasing generator on vectorized block-diagonal states.

    matrix acts on row-major vectorized d x d matrices. The coupling list is
    kept in assembly order for structural inspection: source and target are
    (2j, 2m, 2m') integer triples.
    """

    space: DickeSpace
    matrix: sparse.csr_matrix
    sources: np.ndarray
    targets: np.ndarray
    values: np.ndarray

    @property
    def nnz(self):
        return len(self.values)

    def apply(self, rho_matrix):
        """L[rho] for a dense d x d matrix."""
        d = self.space.total_dim
        return (self.matrix @ rho_matrix.reshape(d * d)).reshape(d, d)


def build_dephasing_superoperator(space, spec):
    """Assemble the rate-free dephasing generator for the given noise axis.

    Iterates over source elements sector-major (j descending, then m, then
    m' descending) and emits the nonzero couplings channel by channel in a
    fixed order, so repeated builds are identical.
    """
    if not isinstance(space, DickeSpace):
        raise InvalidArgument("space must be a DickeSpace")
    n = space.n_particles
    w = spec.ladder_weight
    # Scalar weight of the J_ket rho J_bra term in a rho a.
    amp = {"plus": np.conj(w), "minus": w, "z": complex(spec.axis[2])}
    scalar = {(k, l): amp[k] * amp[_FLIP[l]] for k in _LADDERS for l in _LADDERS}

    sector_of = {s.twoj: s for s in space.sectors}
    d = space.total_dim
    rows, cols, vals = [], [], []
    sources, targets = [], []

    for sec in space.sectors:
        twoj = sec.twoj
        j = twoj / 2.0
        lam = dict(zip(("stay", "drop", "lift"), _lambda_weights(n, j)))
        factors = {"stay": _stay_factors, "drop": _drop_factors, "lift": _lift_factors}
        for twom in range(twoj, -twoj - 2, -2):
            m = twom / 2.0
            src_row = sec.offset + (twoj - twom) // 2
            for twomb in range(twoj, -twoj - 2, -2):
                mb = twomb / 2.0
                src_col = sec.offset + (twoj - twomb) // 2
                src_vec = src_row * d + src_col
                for shift, name in _SHIFTS:
                    twojt = twoj + shift
                    tgt_sec = sector_of.get(twojt)
                    ket = factors[name](j, m)
                    bra = factors[name](j, mb)
                    for k in _LADDERS:
                        fk = ket.get(k)
                        for l in _LADDERS:
                            coeff = 2.0 * scalar[(k, l)] * fk * bra.get(l) * lam[name]
                            if name == "stay" and k == "z" and l == "z":
                                coeff = coeff - 2.0 * n
                            if coeff == 0.0:
                                continue
                            twomt = twom + _DELTA[k]
                            twombt = twomb + _DELTA[l]
                            if tgt_sec is None or abs(twomt) > twojt or abs(twombt) > twojt:
                                # All ladder factors vanish outside the target
                                # sector; a nonzero here is an assembly bug.
                                if abs(coeff) > 1e-12:
                                    raise InvalidArgument(
                                        "nonzero coupling to an invalid target")
                                continue
                            tgt_row = tgt_sec.offset + (twojt - twomt) // 2
                            tgt_col = tgt_sec.offset + (twojt - twombt) // 2
                            rows.append(tgt_row * d + tgt_col)
                            cols.append(src_vec)
                            vals.append(coeff)
                            sources.append((twoj, twom, twomb))
                            targets.append((twojt, twomt, twombt))

    matrix = sparse.csr_matrix(
        (np.asarray(vals, dtype=complex),
         (np.asarray(rows, dtype=np.int64), np.asarray(cols, dtype=np.int64))),
        shape=(d * d, d * d))
    return DephasingSuperoperator(
        space=space,
        matrix=matrix,
        sources=np.asarray(sources, dtype=np.int64),
        targets=np.asarray(targets, dtype=np.int64),
        values=np.asarray(vals, dtype=complex),
    )
