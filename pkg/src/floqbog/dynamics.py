"""Open-chain Floquet spectra, midgap edge states, and vacuum evolution.

The open chain of M unit cells (N = 2M sites) is diagonalized through its
monodromy exactly like a single Bloch block.  In the topological phase the
spectrum develops midgap states pinned near Re eps = 0 whose quasienergies
acquire imaginary parts: parametric instabilities localized at the
boundaries.  Evolving the vacuum through the symplectic propagator shows
the corresponding exponential growth of the edge-site occupations while
the bulk stays quiet.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.linalg import eigh

from .floquet import (
    DEFAULT_STEPS,
    TOL_IM,
    IntegrationError,
    QuasienergyBranch,
    eig_branches,
    kgrid_solve,
    rk4_cosine,
)
from .model import ModelParams, chain_blocks, nambu_metric

#: occupation beyond which the linear Bogoliubov description is hopeless
OVERFLOW_OCC = 1e12
#: quasienergy distance below which midgap states are rotated as a group
DEGENERACY_TOL = 1e-2


@dataclass(frozen=True)
class ChainSpectrum:
    """Floquet spectrum of the open chain with localization diagnostics.

    ``midgap`` holds indices into ``branches`` flagged by detect_midgap
    with default settings; ``edge_weights`` aligns with ``branches``.
    """

    branches: list[QuasienergyBranch]
    midgap: tuple[int, ...]
    edge_weights: np.ndarray
    omega: float
    cells: int
    bulk_gap: float

    @property
    def eps(self) -> np.ndarray:
        return np.array([b.eps for b in self.branches])

    @property
    def cnorm(self) -> np.ndarray:
        return np.array([b.cnorm for b in self.branches])


@dataclass(frozen=True)
class EvolutionTrace:
    """Site occupations of the driven vacuum at sampled times.

    ``occupations[s, j]`` is n_{j+1}(times[s]) (sites are 1-based in the
    labels, arrays are 0-based); ``truncated`` marks an overflow stop.
    """

    times: np.ndarray
    occupations: np.ndarray
    sympl_residual: np.ndarray
    truncated: bool
    params: ModelParams
    cells: int


def edge_weight(state: np.ndarray, fraction: float = 0.1) -> float:
    """Fraction of the state's weight on the outer sites of the chain.

    Sums |psi|^2 (particle and hole components per site) over the outer
    ceil(fraction * N) sites at each end, relative to the total weight.
    """
    if not 0.0 < fraction <= 0.5:
        raise ValueError(f"fraction must lie in (0, 0.5], got {fraction}")
    n = state.shape[0] // 2
    per_site = np.abs(state[:n]) ** 2 + np.abs(state[n:]) ** 2
    m = math.ceil(fraction * n)
    outer = per_site[:m].sum() + per_site[n - m :].sum()
    return float(outer / per_site.sum())


def _bulk_gap(params: ModelParams, nk: int = 128, steps: int = DEFAULT_STEPS) -> float:
    """Distance between the folded bulk bands across Re eps = 0."""
    _, eps, _, _ = kgrid_solve(params, nk, steps)
    return 2.0 * float(np.abs(eps.real).min())


def chain_spectrum(
    params: ModelParams, cells: int = 20, steps: int = DEFAULT_STEPS
) -> ChainSpectrum:
    """Quasienergy branches of the open chain of ``cells`` unit cells."""
    if cells < 8:
        raise ValueError(f"need at least 8 unit cells for edge separation, got {cells}")
    h0, h1 = chain_blocks(params, cells)
    u = rk4_cosine(h0, h1, params.omega, steps)
    if not np.isfinite(u).all():
        raise IntegrationError("chain monodromy integration diverged")
    eps, cnorm, states, defective = eig_branches(u, params.omega)
    branches = [
        QuasienergyBranch(eps[i], int(cnorm[i]), states[i], bool(defective[i]))
        for i in range(eps.shape[0])
    ]
    weights = np.array([edge_weight(b.state) for b in branches])
    spec = ChainSpectrum(
        branches, (), weights, params.omega, cells, _bulk_gap(params, steps=steps)
    )
    flagged, _ = detect_midgap(spec)
    return replace(spec, midgap=flagged)


def _side_balance(states: np.ndarray) -> np.ndarray:
    """Left-right weight asymmetries of an (optimally rotated) state group.

    Solves the generalized eigenproblem of the left-minus-right weight form
    in the (generally non-orthogonal) span of the group, returning the
    extremal asymmetries in [-1, 1]; positive means left.
    """
    dim = states.shape[1]
    n = dim // 2
    sign = np.where(np.arange(n) < n - n // 2, 1.0, -1.0)
    sign[n // 2 : n - n // 2] = 0.0  # odd chain: center site counts neither side
    d = np.concatenate([sign, sign])
    norm = states / np.linalg.norm(states, axis=1, keepdims=True)
    m = np.einsum("am,m,bm->ab", norm.conj(), d, norm)
    s = norm.conj() @ norm.T
    return eigh(m, s, eigvals_only=True)


def detect_midgap(
    spectrum: ChainSpectrum,
    window: float | None = None,
    edge_threshold: float = 0.5,
) -> tuple[tuple[int, ...], tuple[int, int]]:
    """Flag edge-localized states pinned near Re eps = 0.

    Returns (indices, (left_count, right_count)).  A state qualifies with
    |Re eps| < window (default a tenth of the bulk gap) and edge weight
    above the threshold.  Near-degenerate groups are rotated to maximally
    one-sided combinations before counting sides, since the diagonalizer
    returns arbitrary (often cat-like) superpositions of left and right.
    """
    if window is None:
        window = 0.1 * spectrum.bulk_gap
    eps = spectrum.eps
    idx = [
        i
        for i in range(len(spectrum.branches))
        if abs(eps[i].real) < window and spectrum.edge_weights[i] > edge_threshold
    ]
    left = right = 0
    remaining = sorted(idx, key=lambda i: (eps[i].real, eps[i].imag))
    while remaining:
        head = remaining[0]
        group = [i for i in remaining if abs(eps[i] - eps[head]) < DEGENERACY_TOL]
        remaining = [i for i in remaining if i not in group]
        balance = _side_balance(np.array([spectrum.branches[i].state for i in group]))
        left += int((balance > 0).sum())
        right += int((balance <= 0).sum())
    return tuple(idx), (left, right)


def _propagate_period(h0, h1, omega: float, steps: int, snap: set[int]):
    """One-period RK4 sweep recording the propagator at selected steps."""
    dim = h0.shape[0]
    sz = nambu_metric(dim)
    dt = 2.0 * math.pi / omega / steps

    def gen(t):
        return -1j * sz[:, None] * (h0 + math.cos(omega * t) * h1)

    u = np.eye(dim, dtype=complex)
    snaps = {0: u.copy()} if 0 in snap else {}
    for s in range(steps):
        t = s * dt
        k1 = gen(t) @ u
        g_half = gen(t + 0.5 * dt)
        k2 = g_half @ (u + 0.5 * dt * k1)
        k3 = g_half @ (u + 0.5 * dt * k2)
        k4 = gen(t + dt) @ (u + dt * k3)
        u = u + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if s + 1 in snap:
            snaps[s + 1] = u.copy()
    return u, snaps


def _block_residual(u: np.ndarray) -> float:
    n = u.shape[0] // 2
    a, b = u[:n, :n], u[:n, n:]
    cons = a @ a.conj().T - b @ b.conj().T - np.eye(n)
    sym = a @ b.T
    return max(float(np.abs(cons).max()), float(np.abs(sym - sym.T).max()))


def evolve_vacuum(
    params: ModelParams,
    cells: int = 20,
    t_max: float = 25.0,
    n_samples: int = 101,
    steps_per_period: int = DEFAULT_STEPS,
) -> EvolutionTrace:
    """Evolve the bosonic vacuum of the open chain for t_max drive periods.

    The symplectic propagator is built stroboscopically, U(nT + tau) =
    U(tau) U(T)^n, with the intra-period factors taken from a single RK4
    sweep (sample times snap to the step grid; the recorded times are the
    snapped ones).  Occupations follow from the anomalous block,
    n_j = (B B^dagger)_jj.  The trace is truncated once any occupation
    exceeds 1e12, where exponential growth has left the linear regime.
    """
    if n_samples < 2:
        raise ValueError(f"need at least 2 samples, got {n_samples}")
    if t_max <= 0:
        raise ValueError(f"t_max must be positive, got {t_max}")
    period = params.period
    dt = period / steps_per_period
    total = np.linspace(0.0, t_max * period, n_samples)
    marks = np.rint(total / dt).astype(int)
    wraps, offs = np.divmod(marks, steps_per_period)

    h0, h1 = chain_blocks(params, cells)
    mono, snaps = _propagate_period(
        h0, h1, params.omega, steps_per_period, set(offs.tolist())
    )
    if not np.isfinite(mono).all():
        raise IntegrationError("chain monodromy integration diverged")

    n = h0.shape[0] // 2
    power = np.eye(h0.shape[0], dtype=complex)
    done = 0
    times, occs, resid = [], [], []
    truncated = False
    for s in range(n_samples):
        while done < wraps[s]:
            power = mono @ power
            done += 1
        u = snaps[int(offs[s])] @ power
        occ = np.abs(u[:n, n:]) ** 2
        occ = occ.sum(axis=1)
        times.append(marks[s] * dt)
        occs.append(occ)
        resid.append(_block_residual(u))
        if occ.max() > OVERFLOW_OCC:
            truncated = True
            break
    return EvolutionTrace(
        np.array(times), np.array(occs), np.array(resid), truncated, params, cells
    )


def growth_rate_fit(
    trace: EvolutionTrace, site: int = 1, fit_window: tuple[float, float] | None = None
) -> float:
    """Least-squares growth rate of ln n_site(t) over the fit window.

    ``site`` is 1-based (j = 2m + s).  The default window skips the first
    40 percent of the trace as transient.  Requires at least 8 samples
    with occupation above 1e-6 inside the window.
    """
    if not 1 <= site <= trace.occupations.shape[1]:
        raise ValueError(f"site {site} outside 1..{trace.occupations.shape[1]}")
    t_end = trace.times[-1]
    if fit_window is None:
        fit_window = (0.4 * t_end, t_end)
    lo, hi = fit_window
    n = trace.occupations[:, site - 1]
    mask = (trace.times >= lo) & (trace.times <= hi) & (n > 1e-6)
    if mask.sum() < 8:
        raise ValueError("no exponential regime detected")
    slope, _ = np.polyfit(trace.times[mask], np.log(n[mask]), 1)
    return float(slope)


def nudge_unstable_midgap(
    params: ModelParams,
    cells: int = 16,
    scale: float = 0.05,
    attempts: int = 12,
    steps: int = 1024,
    seed: int = 0,
) -> ModelParams | None:
    """Search small parameter nudges making all midgap states unstable.

    Randomly perturbs the static couplings and the chemical potential by
    a relative ``scale`` and returns the first parameter set whose midgap
    states all carry |Im eps| > tol_im, or None if the search fails.
    """
    rng = np.random.default_rng(seed)
    fields = ("nu0", "nu1", "mu")
    for _ in range(attempts):
        shift = {
            f: getattr(params, f) * (1.0 + scale * rng.uniform(-1.0, 1.0)) for f in fields
        }
        trial = replace(params, **shift)
        try:
            spec = chain_spectrum(trial, cells, steps)
        except (IntegrationError, ValueError):
            continue
        if not spec.midgap:
            continue
        ims = np.abs(spec.eps[list(spec.midgap)].imag)
        if (ims > TOL_IM).all():
            return trial
    return None
