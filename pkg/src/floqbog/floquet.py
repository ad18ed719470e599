"""Monodromy integration, complex quasienergies and dynamical stability.

The one-period propagator of a quadratic bosonic problem solves
i dU/dt = Sigma_z H(t) U with U(0) = 1, where Sigma_z = sz (x) 1 is the
Nambu metric.  U(T) is pseudo-unitary, U+ Sigma_z U = Sigma_z, so its
eigenvalues come in pairs (lambda, 1/conj(lambda)) and the quasienergies
eps = (i*omega/2pi) Log lambda are either real (stable modes, normalizable
in the Sigma_z metric with norm +-1) or complex conjugate pairs (parametric
instability, zero symplectic norm).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .model import BdGMatrix, ModelParams, bloch_blocks, nambu_metric

DEFAULT_STEPS = 2048
TOL_SYMPL = 1e-8
TOL_IM = 1e-8
TOL_NORM = 1e-6
#: eigenvector overlap above which an eigenproblem is treated as defective
DEFECT_OVERLAP = 1.0 - 1e-8


class IntegrationError(RuntimeError):
    """Monodromy integration produced non-finite or non-pseudo-unitary output."""


class Verdict(enum.Enum):
    StronglyStable = "StronglyStable"
    MarginallyStable = "MarginallyStable"
    Unstable = "Unstable"


@dataclass(frozen=True)
class Monodromy:
    """One-period propagator U(T) with its integration metadata."""

    u: np.ndarray
    omega: float
    steps: int
    sympl_residual: float = field(init=False)

    def __post_init__(self):
        u = np.asarray(self.u, dtype=complex)
        object.__setattr__(self, "u", u)
        sz = nambu_metric(u.shape[-1])
        res = np.abs(u.conj().T * sz @ u - np.diag(sz)).max()
        object.__setattr__(self, "sympl_residual", float(res))


@dataclass(frozen=True)
class QuasienergyBranch:
    """Single Floquet-Bogoliubov branch at fixed momentum (or chain mode).

    ``eps`` has Re eps folded into (-omega/2, omega/2]; Im eps > 0 marks a
    growing mode.  ``cnorm`` is the symplectic norm sign, 0 when the state
    is not normalizable in the Sigma_z metric.  ``state`` is normalized to
    <psi|Sigma_z|psi> = cnorm when cnorm != 0, else to unit Euclidean norm.
    """

    eps: complex
    cnorm: int
    state: np.ndarray
    defective: bool = False


def kgrid(nk: int) -> np.ndarray:
    """Uniform momentum grid on (-pi, pi], symmetric under k -> -k, pi included."""
    return -math.pi + 2.0 * math.pi * (np.arange(nk) + 1.0) / nk


def fold(x, omega: float):
    """Fold real (quasi)energies into (-omega/2, omega/2], ties to +omega/2."""
    return omega / 2.0 - np.mod(omega / 2.0 - np.asarray(x), omega)


def rk4_cosine(h0: np.ndarray, h1: np.ndarray, omega: float, steps: int) -> np.ndarray:
    """Propagate i dU/dt = Sigma_z (H0 + H1 cos(omega t)) U over one period.

    h0, h1 have shape (..., d, d); the leading axes are batched so a full
    k-grid integrates in one pass.  Classical fixed-step RK4.
    """
    if steps < 64:
        raise ValueError(f"need at least 64 integrator steps, got {steps}")
    h0 = np.asarray(h0, dtype=complex)
    h1 = np.asarray(h1, dtype=complex)
    d = h0.shape[-1]
    sz = nambu_metric(d)[:, None]
    m0 = -1j * sz * h0
    m1 = -1j * sz * h1
    dt = 2.0 * math.pi / omega / steps
    u = np.zeros(h0.shape, dtype=complex)
    u[..., np.arange(d), np.arange(d)] = 1.0
    for i in range(steps):
        t = i * dt
        a0 = m0 + math.cos(omega * t) * m1
        ah = m0 + math.cos(omega * (t + 0.5 * dt)) * m1
        a1 = m0 + math.cos(omega * (t + dt)) * m1
        k1 = a0 @ u
        k2 = ah @ (u + (0.5 * dt) * k1)
        k3 = ah @ (u + (0.5 * dt) * k2)
        k4 = a1 @ (u + dt * k3)
        u = u + (dt / 6.0) * (k1 + 2.0 * (k2 + k3) + k4)
    return u


def monodromy(generator, omega: float, steps: int = DEFAULT_STEPS) -> Monodromy:
    """Integrate the one-period propagator for an arbitrary generator.

    Parameters
    ----------
    generator : callable t -> BdGMatrix or (d, d) array
        Hermitian Bogoliubov matrix H(t).
    omega : drive frequency, period T = 2 pi / omega.
    steps : RK4 step count, >= 64 (powers of two recommended).
    """
    if steps < 64:
        raise ValueError(f"need at least 64 integrator steps, got {steps}")

    def gen(t: float) -> np.ndarray:
        h = generator(t)
        return h.entries if isinstance(h, BdGMatrix) else np.asarray(h, dtype=complex)

    h = gen(0.0)
    d = h.shape[0]
    sz = nambu_metric(d)[:, None]
    dt = 2.0 * math.pi / omega / steps
    u = np.eye(d, dtype=complex)
    for i in range(steps):
        t = i * dt
        a0 = -1j * sz * h
        ah = -1j * sz * gen(t + 0.5 * dt)
        h = gen(t + dt)
        a1 = -1j * sz * h
        k1 = a0 @ u
        k2 = ah @ (u + (0.5 * dt) * k1)
        k3 = ah @ (u + (0.5 * dt) * k2)
        k4 = a1 @ (u + dt * k3)
        u = u + (dt / 6.0) * (k1 + 2.0 * (k2 + k3) + k4)
    if not np.isfinite(u).all():
        raise IntegrationError(
            f"monodromy integration produced non-finite entries at steps={steps}; "
            "increase the step count or reduce the drive amplitude"
        )
    return Monodromy(u, omega, steps)


def eig_branches(u, omega: float, tol_norm: float = TOL_NORM):
    """Eigendecompose batched monodromy matrices into quasienergy data.

    Parameters
    ----------
    u : (..., d, d) complex
        Pseudo-unitary propagators.
    omega : drive frequency used for the folding window.

    Returns
    -------
    eps : (..., d) complex, sorted by (Re, Im, cnorm) per batch entry
    cnorm : (..., d) int in {-1, 0, +1}
    states : (..., d, d) complex, states[..., i, :] is the branch-i vector
    defective : (..., d) bool, True where eigenvectors nearly coalesce
    """
    u = np.asarray(u, dtype=complex)
    lam, vec = np.linalg.eig(u)
    pref = omega / (2.0 * math.pi)
    eps = fold(-pref * np.angle(lam), omega) + 1j * pref * np.log(np.abs(lam))

    # near-parallel eigenvectors signal a defective (non-diagonalizable) U
    gram = np.abs(np.swapaxes(vec.conj(), -1, -2) @ vec)
    d = u.shape[-1]
    gram[..., np.arange(d), np.arange(d)] = 0.0
    defective = (gram > DEFECT_OVERLAP).any(axis=-1)

    sz = nambu_metric(d)
    q = np.einsum("...mi,m,...mi->...i", vec.conj(), sz, vec).real
    normalizable = (np.abs(q) > tol_norm) & ~defective
    scale = np.where(normalizable, np.sqrt(np.abs(q)), 1.0)
    vec = vec / scale[..., None, :]
    cnorm = np.where(normalizable, np.sign(q).astype(int), 0).astype(int)

    order = np.lexsort((cnorm, eps.imag, eps.real), axis=-1)
    eps = np.take_along_axis(eps, order, axis=-1)
    cnorm = np.take_along_axis(cnorm, order, axis=-1)
    defective = np.take_along_axis(defective, order, axis=-1)
    states = np.take_along_axis(np.swapaxes(vec, -1, -2), order[..., :, None], axis=-2)
    return eps, cnorm, states, defective


def quasienergies(m: Monodromy, tol_norm: float = TOL_NORM) -> list[QuasienergyBranch]:
    """Complex quasienergies of a monodromy, norms assigned, stably sorted."""
    if m.sympl_residual > 1e-4:
        raise IntegrationError(
            f"monodromy violates pseudo-unitarity (residual {m.sympl_residual:.2e}); "
            "increase the step count"
        )
    eps, cnorm, states, defective = eig_branches(m.u, m.omega, tol_norm)
    return [
        QuasienergyBranch(complex(e), int(c), s, bool(f))
        for e, c, s, f in zip(eps, cnorm, states, defective)
    ]


def symplectic_norms(
    branches: list[QuasienergyBranch], tol_norm: float = TOL_NORM
) -> list[QuasienergyBranch]:
    """Assign symplectic norm signs, rescaling states to <psi|Sz|psi> = +-1.

    Idempotent; states with |<psi|Sz|psi>| <= tol_norm keep unit Euclidean
    norm and get cnorm = 0.
    """
    out = []
    for b in branches:
        sz = nambu_metric(b.state.shape[0])
        q = float(np.real(np.vdot(b.state, sz * b.state)))
        if abs(q) > tol_norm and not b.defective:
            state = b.state / math.sqrt(abs(q))
            out.append(QuasienergyBranch(b.eps, int(np.sign(q)), state, b.defective))
        else:
            state = b.state / np.linalg.norm(b.state)
            out.append(QuasienergyBranch(b.eps, 0, state, b.defective))
    return out


def classify_arrays(eps, cnorm, omega: float, tol_im: float, window: float):
    """Vectorized verdict codes 0/1/2 = strong/marginal/unstable over batches."""
    eps = np.asarray(eps)
    cnorm = np.asarray(cnorm)
    unstable = (np.abs(eps.imag) > tol_im).any(axis=-1)
    dist = np.abs(eps.real[..., :, None] - eps.real[..., None, :]) % omega
    dist = np.minimum(dist, omega - dist)
    opposite = cnorm[..., :, None] * cnorm[..., None, :] == -1
    resonant = (opposite & (dist < window)).any(axis=(-2, -1))
    marginal = resonant | (cnorm == 0).any(axis=-1)
    return np.where(unstable, 2, np.where(marginal, 1, 0))


def classify_stability(
    branches: list[QuasienergyBranch],
    omega: float,
    tol_im: float = TOL_IM,
    resonance_window: float | None = None,
) -> Verdict:
    """Stability verdict for one set of branches (one momentum or one chain).

    Unstable if any |Im eps| > tol_im.  Otherwise marginally stable if any
    pair of opposite symplectic norm has Re eps separated by less than
    resonance_window on the quasienergy circle (covering degeneracies at
    Re eps near 0 and omega/2), or if any branch is non-normalizable.
    Strongly stable otherwise.
    """
    if resonance_window is None:
        resonance_window = 1e-6 * omega
    eps = np.array([b.eps for b in branches])
    cnorm = np.array([b.cnorm for b in branches])
    code = int(classify_arrays(eps, cnorm, omega, tol_im, resonance_window))
    return (Verdict.StronglyStable, Verdict.MarginallyStable, Verdict.Unstable)[code]


def solve_bloch_k(
    params: ModelParams, k: float, steps: int = DEFAULT_STEPS
) -> list[QuasienergyBranch]:
    """Monodromy + quasienergies of the 4x4 Bloch problem at momentum k."""
    h0, h1 = bloch_blocks(params, np.asarray(k, dtype=float))
    u = rk4_cosine(h0, h1, params.omega, steps)
    return quasienergies(Monodromy(u, params.omega, steps))


def kgrid_solve(params: ModelParams, nk: int, steps: int = DEFAULT_STEPS):
    """Batched quasienergy solve over the full momentum grid.

    Returns (ks, eps, cnorm, states) with shapes (nk,), (nk, 4), (nk, 4)
    and (nk, 4, 4); branch vectors along the last axis of ``states``.
    """
    ks = kgrid(nk)
    h0, h1 = bloch_blocks(params, ks)
    u = rk4_cosine(h0, h1, params.omega, steps)
    if not np.isfinite(u).all():
        bad = ks[~np.isfinite(u).all(axis=(-2, -1))]
        raise IntegrationError(
            f"monodromy integration diverged at k={bad[0]:+.6f} (steps={steps}); "
            "increase the step count"
        )
    sz = nambu_metric(4)
    res = np.abs(np.swapaxes(u.conj(), -1, -2) * sz @ u - np.diag(sz)).max()
    if res > 1e-4:
        raise IntegrationError(
            f"pseudo-unitarity residual {res:.2e} on the k-grid; increase the step count"
        )
    eps, cnorm, states, _ = eig_branches(u, params.omega)
    return ks, eps, cnorm, states


def global_stability(
    params: ModelParams,
    nk: int = 256,
    steps: int = DEFAULT_STEPS,
    tol_im: float = TOL_IM,
    resonance_window: float | None = None,
) -> tuple[bool, float]:
    """Scan the momentum grid; True iff no k is unstable, plus worst Im eps."""
    if nk < 64:
        raise ValueError(f"need a k-grid of at least 64 points, got {nk}")
    if resonance_window is None:
        resonance_window = 1e-6 * params.omega
    _, eps, cnorm, _ = kgrid_solve(params, nk, steps)
    codes = classify_arrays(eps, cnorm, params.omega, tol_im, resonance_window)
    return bool((codes != 2).all()), float(eps.imag.max())
