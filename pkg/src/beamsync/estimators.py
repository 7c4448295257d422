"""Correlation statistics, least-squares channel/scaling estimation and the
separate / cross-preamble CFO estimators.

Statistic model
---------------
For transmitter k, frame p and sequence slot i in {0, 1}, the normalised
correlation of the burst against c_{k,i} at the known delay behaves like

    grid[k,p,i] ~ alpha_k^(p) * rbar(omega_k) * (mu_k e^{+j omega_k tau_c})^i
                  * e^{+j omega_k (p*frame_len + tau_k)}  +  CN(0, sigma_{k,p,i}^2)

with ``rbar`` the matched-correlation profile and the variance given by
``noise_variance`` (interference leakage plus thermal noise, both shrunk by
the sequence length). The absolute phase factor is the burst-frame ramp; it
cancels inside both CFO estimators (ratios for the separate estimator,
conjugate gain weighting for the cross-preamble one), so the estimators can
also run on statistics whose ramp was removed by pre-compensation.
"""

import warnings
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from . import kernels
from .errors import (DegenerateStatisticError, ParameterError,
                     RankDeficiencyError, WindowError)
from .sequences import estimate_sigma_c, matched_correlation_model
from .synthesis import assemble_preamble

# Condition number above which the per-frame LLS switches to a Tikhonov
# floor, and the floor itself.
COND_LIMIT = 1e8
TIKHONOV_FLOOR = 1e-12

# Magnitude below which a pooled statistic is considered numerically void.
DEGENERATE_FLOOR = 1e-15

MU_FLOOR = 1e-6


class NumericalWarning(UserWarning):
    """Raised (as a warning) when a solve needed regularisation/clamping."""


@dataclass
class CorrelationGrid:
    """Correlation statistics r_{y,k}^{p,i} and their model variances."""

    values: np.ndarray       # (K, P, 2) complex
    noise_vars: np.ndarray   # (K, P, 2) positive reals
    tau_c: int

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.complex128)
        self.noise_vars = np.asarray(self.noise_vars, dtype=float)
        if self.values.shape != self.noise_vars.shape or self.values.ndim != 3:
            raise ParameterError("values and noise_vars must both be (K, P, 2)")
        if np.any(self.noise_vars <= 0):
            raise ParameterError("noise variances must be strictly positive")


def correlation_statistic(burst, k, p, i, tau_k):
    """One correlation statistic of a burst against sequence i of BS k."""
    cfg = burst.config
    if not (0 <= k < cfg.n_bs and 0 <= p < cfg.n_frames and i in (0, 1)):
        raise ParameterError(f"indices (k={k}, p={p}, i={i}) out of range")
    seq = (cfg.preambles[k].seq0 if i == 0 else cfg.preambles[k].seq1).samples
    start = int(tau_k) + p * cfg.frame_len + i * cfg.tau_c
    if start < 0 or start + seq.shape[0] > burst.samples.shape[0]:
        raise WindowError(
            f"window [{start}, {start + seq.shape[0]}) outside burst of length "
            f"{burst.samples.shape[0]}")
    return kernels.window_correlate(burst.samples, seq, start)


def noise_variance(alphas_others, mu_k, i, sigma_c_sq, sigma_n_sq, n):
    """Interference-plus-noise variance of one correlation statistic.

    ``alphas_others`` are the same-frame gains of every other transmitter;
    their squared magnitudes enter (the model treats leakage as circular
    Gaussian).
    """
    if sigma_c_sq < 0 or sigma_n_sq < 0:
        raise ParameterError("variances must be nonnegative")
    interf = float(np.sum(np.abs(np.asarray(alphas_others)) ** 2))
    return ((mu_k ** (2 * i)) * sigma_c_sq * interf + sigma_n_sq) / n


def noise_variance_grid(alphas, mus, sigma_c_sq, sigma_n_sq, n):
    """Vectorised Lemma-style variances for all (k, p, i) at once."""
    alphas = np.asarray(alphas)
    power = np.abs(alphas) ** 2
    others = power.sum(axis=0)[None, :] - power          # (K, P)
    mus = np.asarray(mus, dtype=float)
    out = np.empty(alphas.shape + (2,), dtype=float)
    for i in (0, 1):
        out[:, :, i] = ((mus[:, None] ** (2 * i)) * sigma_c_sq * others + sigma_n_sq) / n
    return out


def matched_statistic_mean(omega, alpha, mu, i, seq_len, tau_c, frame_offset=0):
    """Model mean of grid[k,p,i]; ``frame_offset`` is p*frame_len + tau_k.

    Pass ``frame_offset=0`` for statistics computed on a pre-compensated
    residual (canonical frame).
    """
    base = alpha * matched_correlation_model(seq_len, omega)
    return base * (mu * np.exp(1j * omega * tau_c)) ** i * np.exp(1j * omega * frame_offset)


_SIGMA_C_CACHE = {}


def scenario_sigma_c(config, delays=None):
    """Operational sidelobe variance for a scenario, cached per family.

    Uses the mismatched-pair pool only (each transmitter owns a distinct
    sequence pair, so matched-root sidelobes never enter a statistic) with
    the delay set sized to the scenario's delay spread, mirroring the
    relative shifts the statistics actually see.
    """
    if delays is None:
        if config.delay_range is not None:
            spread = config.delay_range[1] - config.delay_range[0]
        else:
            spread = max(config.delays) - min(config.delays)
        delays = range(1, max(3, int(spread)) + 1)
    seqs = []
    for spec in config.preambles:
        for s in (spec.seq0, spec.seq1):
            if not any(s == t for t in seqs):
                seqs.append(s)
    try:
        key = tuple(sorted((s.family_id, s.root, len(s)) for s in seqs)) + (tuple(delays),)
    except TypeError:
        key = None
    if key is not None and key in _SIGMA_C_CACHE:
        return _SIGMA_C_CACHE[key]
    value = estimate_sigma_c(seqs, delays, include_matched=False)
    if key is not None:
        _SIGMA_C_CACHE[key] = value
    return value


def compute_grid(samples, config, delays, alphas_for_noise=None, mus=None,
                 sigma_c_sq=None, noise_var=None, only_k=None,
                 derotate_omega=0.0):
    """Correlation grid of a sample vector for every (k, p, i).

    ``samples`` may be a raw burst or a SIC residual. When interferer gain
    estimates are supplied the grid carries model-based variances, otherwise
    unit weights. ``only_k`` restricts the computation to one transmitter's
    row (the others stay zero); ``derotate_omega`` removes a CFO
    pre-compensation inside the windows, equivalent to correlating the
    fully de-rotated vector.
    """
    k_bs, p_fr = config.n_bs, config.n_frames
    n = config.seq_len
    if mus is None:
        mus = np.asarray([spec.mu for spec in config.preambles], dtype=float)
    values = np.zeros((k_bs, p_fr, 2), dtype=np.complex128)
    rows = range(k_bs) if only_k is None else (only_k,)
    for k in rows:
        tau = int(delays[k])
        for i in (0, 1):
            seq = (config.preambles[k].seq0 if i == 0 else config.preambles[k].seq1).samples
            base = tau + i * config.tau_c
            for p in range(p_fr):
                start = base + p * config.frame_len
                if derotate_omega == 0.0:
                    values[k, p, i] = kernels.window_correlate(samples, seq, start)
                else:
                    values[k, p, i] = kernels.window_correlate_rotated(
                        samples, seq, start, derotate_omega)
    if alphas_for_noise is not None:
        if sigma_c_sq is None:
            sigma_c_sq = scenario_sigma_c(config)
        if noise_var is None:
            noise_var = config.noise_var
        nv = noise_variance_grid(alphas_for_noise, mus, sigma_c_sq, noise_var, n)
        nv = np.maximum(nv, 1e-30)
    else:
        nv = np.ones((k_bs, p_fr, 2), dtype=float)
    return CorrelationGrid(values=values, noise_vars=nv, tau_c=config.tau_c)


class DesignMatrix:
    """Block design A = blkdiag(A^(0), ..., A^(P-1)) in factored form.

    Every block differs from the first only by the per-column unit phase
    e^{j omega_k p frame_len}, so one dense (frame_len x K) base plus a
    (P x K) table of frame scales represents the whole operator. ``blocks``
    materialises the dense blocks when needed (tests, small problems).
    """

    def __init__(self, base, frame_scales, delays, omegas):
        self.base = np.ascontiguousarray(base, dtype=np.complex128)
        self.frame_scales = np.asarray(frame_scales, dtype=np.complex128)
        self.delays = np.asarray(delays, dtype=np.int64)
        self.omegas = np.asarray(omegas, dtype=float)
        self._svd = None

    @property
    def n_frames(self):
        return self.frame_scales.shape[0]

    @property
    def frame_len(self):
        return self.base.shape[0]

    @property
    def n_columns(self):
        return self.base.shape[1]

    def block(self, p):
        return self.base * self.frame_scales[p][None, :]

    @property
    def blocks(self):
        return [self.block(p) for p in range(self.n_frames)]

    def assembled(self):
        """Dense (P*frame_len, P*K) block-diagonal operator."""
        p, nf, k = self.n_frames, self.frame_len, self.n_columns
        out = np.zeros((p * nf, p * k), dtype=np.complex128)
        for q in range(p):
            out[q * nf:(q + 1) * nf, q * k:(q + 1) * k] = self.block(q)
        return out

    def apply(self, alphas):
        """y = A vec(alpha) for per-frame gains ``alphas`` of shape (K, P)."""
        coef = alphas.T * self.frame_scales          # (P, K)
        return (self.base @ coef.T).T.reshape(-1)    # frames concatenated

    def _decomposition(self):
        if self._svd is None:
            self._svd = np.linalg.svd(self.base, full_matrices=False)
        return self._svd

    def condition_number(self):
        s = self._decomposition()[1]
        if s[-1] == 0:
            return np.inf
        return float(s[0] / s[-1])


def build_design_matrix(delays, omegas, mus, preambles, frame_len, n_frames,
                        component="full"):
    """Design whose column (p, k) is transmitter k's delayed, CFO-rotated
    waveform inside frame p.

    ``component`` selects the full preamble, only the first training
    sequence ("first"), or only the unscaled second one ("second");
    the partial designs feed the scaling-factor update.
    """
    delays = np.asarray(delays, dtype=np.int64)
    omegas = np.asarray(omegas, dtype=float)
    mus = np.asarray(mus, dtype=float)
    k_bs = len(preambles)
    if not (len(delays) == len(omegas) == len(mus) == k_bs):
        raise ParameterError("parameter vectors must all have length K")
    base = np.zeros((frame_len, k_bs), dtype=np.complex128)
    col = np.zeros(frame_len, dtype=np.complex128)
    for k, spec in enumerate(preambles):
        if component == "full":
            wave = assemble_preamble(spec, mus[k])
            start = int(delays[k])
        elif component == "first":
            wave = spec.seq0.samples
            start = int(delays[k])
        elif component == "second":
            wave = spec.seq1.samples
            start = int(delays[k]) + spec.seq_len + spec.tau0
        else:
            raise ParameterError(f"unknown design component {component!r}")
        col[:] = 0
        kernels.add_modulated(col, wave, 1.0 + 0.0j, float(omegas[k]), start)
        base[:, k] = col
    frames = np.arange(n_frames)
    frame_scales = np.exp(1j * np.outer(frames * frame_len, omegas))
    return DesignMatrix(base=base, frame_scales=frame_scales, delays=delays, omegas=omegas)


def _burst_frames(samples, design):
    nf, p = design.frame_len, design.n_frames
    y = samples[:p * nf]
    return y.reshape(p, nf).T      # (frame_len, P)


def estimate_channel(burst_or_samples, design):
    """Per-frame LLS gains: alpha_hat^(p) = pinv(A^(p)) y^(p), all frames.

    The blocks share one orthogonal decomposition (they differ by a unit
    diagonal), which is numerically identical to solving each frame with
    its own rank-revealing factorisation.
    """
    samples = getattr(burst_or_samples, "samples", burst_or_samples)
    u, s, vh = design._decomposition()
    k = design.n_columns
    rank = int(np.sum(s > s[0] * np.finfo(float).eps * max(design.base.shape))) if s[0] > 0 else 0
    if rank < k:
        raise RankDeficiencyError(
            f"design block rank {rank} < {k}; every frame shares the deficient "
            f"base (first offender: frame 0)", frame=0)
    cond = s[0] / s[-1]
    if cond > COND_LIMIT:
        warnings.warn(
            f"design condition number {cond:.3g} above {COND_LIMIT:.0e}; "
            f"applying Tikhonov floor", NumericalWarning)
        inv_s = s / (s ** 2 + TIKHONOV_FLOOR)
    else:
        inv_s = 1.0 / s
    frames = _burst_frames(samples, design)            # (frame_len, P)
    z = vh.conj().T @ ((u.conj().T @ frames) * inv_s[:, None])   # (K, P)
    return z * np.conj(design.frame_scales.T)


def estimate_mu(burst_or_samples, design_first, design_second, alphas_hat,
                fallback_mus=None, active_energy_floor=1e-12):
    """Real-valued scaling factors from the residual after removing the
    first-sequence component.

    Solves min_mu || (y - A_first alpha_hat) - B mu ||^2 with B's column k
    equal to transmitter k's second-sequence design weighted by its gain
    estimates, constrained to real mu. Transmitters whose estimated gain
    energy is below ``active_energy_floor`` keep their fallback value (their
    columns would be numerically void). Estimates below 1e-6 are clamped
    and flagged.
    """
    samples = getattr(burst_or_samples, "samples", burst_or_samples)
    k_bs = design_first.n_columns
    alphas_hat = np.asarray(alphas_hat, dtype=np.complex128)
    if fallback_mus is None:
        fallback_mus = np.ones(k_bs)
    mus = np.array(fallback_mus, dtype=float, copy=True)

    energy = np.sum(np.abs(alphas_hat) ** 2, axis=1)
    active = energy >= active_energy_floor
    if not np.any(active):
        return mus

    resid = samples[:design_first.n_frames * design_first.frame_len] \
        - design_first.apply(alphas_hat)
    frames = _burst_frames(resid, design_second)                 # (frame_len, P)
    w = alphas_hat.T * design_second.frame_scales                # (P, K) column weights
    gram = design_second.base.conj().T @ design_second.base      # (K, K)
    # G[i,j] = Gram[i,j] * sum_p conj(w_p[i]) w_p[j]
    g = gram * (w.conj().T @ w)
    proj = design_second.base.conj().T @ frames                  # (K, P)
    b = np.sum(w.conj().T * proj, axis=1)                        # (K,)

    idx = np.flatnonzero(active)
    m = np.real(g[np.ix_(idx, idx)])
    rhs = np.real(b[idx])
    cond = np.linalg.cond(m)
    if not np.isfinite(cond) or cond > 1e14:
        raise RankDeficiencyError(
            f"scaling-factor normal equations singular (cond {cond:.3g})")
    sol = np.linalg.solve(m, rhs)
    if np.any(sol < MU_FLOOR):
        warnings.warn("scaling estimate clamped at floor 1e-6", NumericalWarning)
        sol = np.maximum(sol, MU_FLOOR)
    mus[idx] = sol
    return mus


def separate_cfo(grid, k, mu_k):
    """Single-statistic-pair CFO estimate from frame-averaged correlations.

    The two frame means share the same gain/frame-ramp mixture, so their
    ratio exposes only the phase accumulated over the tau_c baseline.
    """
    m0 = np.mean(grid.values[k, :, 0])
    m1 = np.mean(grid.values[k, :, 1]) / mu_k
    if abs(m0) < DEGENERATE_FLOOR or abs(m1) < DEGENERATE_FLOOR:
        raise DegenerateStatisticError(
            f"frame-averaged statistic magnitude below {DEGENERATE_FLOOR}")
    return float(np.angle(m1 * np.conj(m0)) / grid.tau_c)


def separate_cfo_pooled(grid, k, mu_k, frame_weights=None):
    """Separate estimator with frame-coherent pooling: the per-frame
    cross-slot products share one baseline phase (frame ramps cancel inside
    each product), so they are summed before the single angle. This is the
    deployed form used in the comparison harness; ``separate_cfo`` is the
    frame-averaged textbook form. Optional ``frame_weights`` emphasise
    strong frames."""
    prods = grid.values[k, :, 1] * np.conj(grid.values[k, :, 0])
    if frame_weights is not None:
        prods = prods * np.asarray(frame_weights, dtype=float)
    acc = np.sum(prods)
    if abs(acc) < DEGENERATE_FLOOR:
        raise DegenerateStatisticError(
            f"pooled statistic magnitude below {DEGENERATE_FLOOR}")
    return float(np.angle(acc) / grid.tau_c)


def log_likelihood(grid, k, omega, alphas_k, mu_k, r_k_omega):
    """Gaussian log-likelihood of transmitter k's statistics (canonical
    frame: statistics assumed pre-compensated, frame ramp absorbed in the
    gains), up to the constant normalisation."""
    alphas_k = np.asarray(alphas_k, dtype=np.complex128)
    total = 0.0
    rot = mu_k * np.exp(1j * omega * grid.tau_c)
    for i in (0, 1):
        mean = alphas_k * r_k_omega * (rot ** i)
        resid = grid.values[k, :, i] - mean
        total -= float(np.sum(np.abs(resid) ** 2 / grid.noise_vars[k, :, i]))
    return total


def profiled_log_likelihood(grid, k, omega, alphas_k, mu_k):
    """Log-likelihood with the common complex factor (gain-times-peak)
    profiled out in closed form; used as the grid-search oracle for the
    cross-preamble estimator."""
    alphas_k = np.asarray(alphas_k, dtype=np.complex128)
    v0 = grid.values[k, :, 0]
    v1 = grid.values[k, :, 1]
    s0 = grid.noise_vars[k, :, 0]
    s1 = grid.noise_vars[k, :, 1]
    phase = np.exp(-1j * omega * grid.tau_c)
    num = np.sum(np.conj(alphas_k) * v0 / s0) \
        + phase * mu_k * np.sum(np.conj(alphas_k) * v1 / s1)
    den = np.sum(np.abs(alphas_k) ** 2 / s0) + (mu_k ** 2) * np.sum(np.abs(alphas_k) ** 2 / s1)
    if den <= 0:
        raise DegenerateStatisticError("all-zero gains in profiled likelihood")
    base = -float(np.sum(np.abs(v0) ** 2 / s0) + np.sum(np.abs(v1) ** 2 / s1))
    return base + float(np.abs(num) ** 2 / den)


def cross_preamble_cfo(grid, k, alphas_k, mu_k):
    """Cross-preamble ML CFO estimate pooling every frame coherently.

    Gain-conjugate, inverse-variance weighted sums of the two statistic
    branches; the angle of their product accumulates only the tau_c
    baseline phase. Equals the maximiser of the profiled log-likelihood.
    """
    alphas_k = np.asarray(alphas_k, dtype=np.complex128)
    if not np.any(alphas_k != 0):
        raise DegenerateStatisticError("cross-preamble estimator needs a nonzero gain")
    psi0 = np.sum(np.conj(alphas_k) * grid.values[k, :, 0] / grid.noise_vars[k, :, 0])
    psi1 = mu_k * np.sum(np.conj(alphas_k) * grid.values[k, :, 1] / grid.noise_vars[k, :, 1])
    if abs(psi0) < DEGENERATE_FLOOR or abs(psi1) < DEGENERATE_FLOOR:
        raise DegenerateStatisticError(
            f"pooled statistic magnitude below {DEGENERATE_FLOOR}")
    return float(np.angle(psi1 * np.conj(psi0)) / grid.tau_c)
