"""Bogoliubov matrices of the driven two-band chain, in momentum and real space.

The single-particle model is a two-site-per-cell chain with intra-cell
hopping nu(t) = nu0 + nu1*cos(omega*t), inter-cell hopping
nu'(t) = nu0p + nu1p*cos(omega*t), chemical potential mu and a static
on-site pairing g.  In momentum space the quadratic problem is encoded by
a 4x4 Hermitian matrix acting on the particle-hole (Nambu) doubled space,

    H_k(t) = 1 (x) [hx(k,t) sx + hy(k,t) sy] - mu 1 (x) 1 + g sx (x) 1,

with the pseudo-field hx = -nu(t) - nu'(t) cos k, hy = -nu'(t) sin k.
The first tensor factor is Nambu space, the second is the sublattice.
All energies are measured in units of g (g = 1 by default).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

SX = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
SY = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
SZ = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)
I2 = np.eye(2, dtype=complex)

#: generalized chiral operator sz (x) sz, anticommutes with the hopping part
CHIRAL = np.kron(SZ, SZ)

HERMITICITY_TOL = 1e-12


def nambu_metric(dim: int) -> np.ndarray:
    """Signature vector (+1,...,+1,-1,...,-1) of the Nambu metric sz (x) 1."""
    if dim % 2:
        raise ValueError(f"Nambu dimension must be even, got {dim}")
    half = dim // 2
    return np.concatenate([np.ones(half), -np.ones(half)])


@dataclass(frozen=True, kw_only=True)
class ModelParams:
    """Physical parameters of the driven chain, all in units of g.

    nu0, nu0p are the static intra-/inter-cell hoppings, nu1, nu1p the
    cosine drive amplitudes, mu the chemical potential, omega > 0 the drive
    angular frequency and g >= 0 the on-site pairing (the unit scale).
    """

    nu0: float
    nu0p: float
    nu1: float
    nu1p: float
    mu: float
    omega: float
    g: float = 1.0

    def __post_init__(self):
        values = (self.nu0, self.nu0p, self.nu1, self.nu1p, self.mu, self.omega, self.g)
        if not all(math.isfinite(v) for v in values):
            raise ValueError(f"all model parameters must be finite, got {self}")
        if self.omega <= 0:
            raise ValueError(f"drive frequency must be positive, got omega={self.omega}")
        if self.g < 0:
            raise ValueError(f"pairing strength must be non-negative, got g={self.g}")

    @property
    def period(self) -> float:
        return 2.0 * math.pi / self.omega

    def nu(self, t: float) -> float:
        return self.nu0 + self.nu1 * math.cos(self.omega * t)

    def nup(self, t: float) -> float:
        return self.nu0p + self.nu1p * math.cos(self.omega * t)


@dataclass(frozen=True)
class FieldSample:
    """Pseudo-field decomposition h(k,t) = h0 + h1*cos(omega*t) at fixed k.

    hx, hy are the instantaneous components at the sample time.
    """

    hx0: float
    hy0: float
    hx1: float
    hy1: float
    hx: float
    hy: float


@dataclass(frozen=True)
class BdGMatrix:
    """Dense Hermitian Bogoliubov matrix with its Nambu block structure.

    ``entries`` is (dim, dim) complex with dim even; the metric is
    diag(+1,...,+1,-1,...,-1).  ``mu`` and ``g`` record the uniform
    chemical-potential and pairing content so symmetry checks can strip
    them off again.
    """

    entries: np.ndarray
    mu: float = 0.0
    g: float = 0.0

    def __post_init__(self):
        arr = np.asarray(self.entries, dtype=complex)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] % 2:
            raise ValueError(f"BdG matrix must be square with even dimension, got {arr.shape}")
        object.__setattr__(self, "entries", arr)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    @property
    def metric(self) -> np.ndarray:
        return nambu_metric(self.dim)

    def hermiticity_residual(self) -> float:
        return float(np.abs(self.entries - self.entries.conj().T).max())


def drive_fields(params: ModelParams, k: float, t: float = 0.0) -> FieldSample:
    """Static and drive components of the pseudo-field at momentum k.

    Returns hx0 = -nu0 - nu0p*cos k, hy0 = -nu0p*sin k and the drive
    amplitudes hx1 = -nu1 - nu1p*cos k, hy1 = -nu1p*sin k, together with
    the instantaneous field at time t.
    """
    ck, sk = math.cos(k), math.sin(k)
    hx0 = -params.nu0 - params.nu0p * ck
    hy0 = -params.nu0p * sk
    hx1 = -params.nu1 - params.nu1p * ck
    hy1 = -params.nu1p * sk
    c = math.cos(params.omega * t)
    return FieldSample(hx0, hy0, hx1, hy1, hx0 + hx1 * c, hy0 + hy1 * c)


def static_fields(params: ModelParams, k: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized (hx0, hy0) over an array of momenta."""
    k = np.asarray(k, dtype=float)
    return -params.nu0 - params.nu0p * np.cos(k), -params.nu0p * np.sin(k)


def drive_amplitudes(params: ModelParams, k: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized (hx1, hy1) over an array of momenta."""
    k = np.asarray(k, dtype=float)
    return -params.nu1 - params.nu1p * np.cos(k), -params.nu1p * np.sin(k)


def field_matrix(hx, hy) -> np.ndarray:
    """1 (x) (hx sx + hy sy) for scalar or array-valued field components."""
    hx = np.asarray(hx, dtype=complex)
    hy = np.asarray(hy, dtype=complex)
    block = np.zeros(hx.shape + (2, 2), dtype=complex)
    block[..., 0, 1] = hx - 1j * hy
    block[..., 1, 0] = hx + 1j * hy
    out = np.zeros(hx.shape + (4, 4), dtype=complex)
    out[..., :2, :2] = block
    out[..., 2:, 2:] = block
    return out


def bloch_blocks(params: ModelParams, k: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Decompose H_k(t) = H0(k) + H1(k)*cos(omega*t) over a momentum array.

    Returns arrays of shape k.shape + (4, 4).  H0 carries the static field,
    the chemical potential and the pairing; H1 carries only the drive field.
    """
    hx0, hy0 = static_fields(params, k)
    hx1, hy1 = drive_amplitudes(params, k)
    h0 = field_matrix(hx0, hy0)
    idx = np.arange(4)
    h0[..., idx, idx] -= params.mu
    h0[..., 0, 2] += params.g
    h0[..., 1, 3] += params.g
    h0[..., 2, 0] += params.g
    h0[..., 3, 1] += params.g
    return h0, field_matrix(hx1, hy1)


def bloch_hamiltonian(params: ModelParams, k: float, t: float = 0.0) -> BdGMatrix:
    """Momentum-space 4x4 Bogoliubov matrix H_k(t)."""
    h0, h1 = bloch_blocks(params, np.asarray(k, dtype=float))
    return BdGMatrix(h0 + h1 * math.cos(params.omega * t), mu=params.mu, g=params.g)


def chain_blocks(params: ModelParams, cells: int) -> tuple[np.ndarray, np.ndarray]:
    """Static and drive parts of the open-chain 2N x 2N Bogoliubov matrix.

    N = 2*cells sites with open boundaries; sites are ordered
    (cell 0, sublattice 1), (cell 0, sublattice 2), (cell 1, sublattice 1), ...
    The pairing block is g times the identity, which Fourier-transforms to
    the momentum-space pairing g sx (x) 1 of ``bloch_hamiltonian``.
    """
    if cells < 2:
        raise ValueError(f"need at least 2 unit cells, got {cells}")
    n = 2 * cells
    k0 = np.zeros((n, n))
    k1 = np.zeros((n, n))
    np.fill_diagonal(k0, -params.mu)
    intra = np.arange(0, n - 1, 2)  # bonds (2m, 2m+1)
    inter = np.arange(1, n - 1, 2)  # bonds (2m+1, 2m+2)
    k0[intra, intra + 1] = k0[intra + 1, intra] = -params.nu0
    k0[inter, inter + 1] = k0[inter + 1, inter] = -params.nu0p
    k1[intra, intra + 1] = k1[intra + 1, intra] = -params.nu1
    k1[inter, inter + 1] = k1[inter + 1, inter] = -params.nu1p

    h0 = np.zeros((2 * n, 2 * n), dtype=complex)
    h1 = np.zeros((2 * n, 2 * n), dtype=complex)
    h0[:n, :n] = h0[n:, n:] = k0
    h0[:n, n:] = h0[n:, :n] = params.g * np.eye(n)
    h1[:n, :n] = h1[n:, n:] = k1
    return h0, h1


def chain_hamiltonian(params: ModelParams, cells: int, t: float = 0.0) -> BdGMatrix:
    """Open-chain Bogoliubov matrix at time t for ``cells`` unit cells."""
    h0, h1 = chain_blocks(params, cells)
    return BdGMatrix(h0 + h1 * math.cos(params.omega * t), mu=params.mu, g=params.g)


def chiral_residual(h: BdGMatrix) -> float:
    """Violation of the generalized chiral symmetry of the 4x4 hopping part.

    Strips the chemical potential and pairing recorded on ``h`` and returns
    ``max |S A S + A|`` with S = sz (x) sz and A the remainder.  Zero for
    any matrix produced by ``bloch_hamiltonian``.
    """
    if h.dim != 4:
        raise ValueError(f"chiral residual is defined for the 4x4 Bloch matrix, got dim {h.dim}")
    a = h.entries + h.mu * np.eye(4) - h.g * np.kron(SX, I2)
    return float(np.abs(CHIRAL @ a @ CHIRAL + a).max())
