"""Iterative joint CFO / channel estimation with interference cancellation.

One iteration does:

1. rebuild the design from the current (omega_hat, mu_hat), least-squares
   update of the per-frame gains, then of the scaling factors;
2. for every transmitter k (Jacobi sweep over a fixed snapshot): subtract
   every *other* transmitter's reconstructed signal, remove k's current CFO
   estimate, re-estimate the residual CFO increment delta_k with the
   cross-preamble estimator and apply omega_hat_k += delta_k.

The loop stops when sum_k |delta_k| drops below ``epsilon`` or after
``max_iter`` iterations. Cold start is all-zero gains and CFOs with unit
scalings, which makes the first gain update a plain zero-CFO least squares.
"""

from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from . import kernels
from .errors import BeamsyncError, DegenerateStatisticError, RankDeficiencyError
from .estimators import (build_design_matrix, compute_grid, cross_preamble_cfo,
                         estimate_channel, estimate_mu, scenario_sigma_c)

DEFAULT_EPSILON = 1e-6
DEFAULT_MAX_ITER = 20


@dataclass
class EstimationResult:
    """Joint estimates plus the convergence record of the iteration."""

    omegas_hat: np.ndarray
    alphas_hat: np.ndarray
    mus_hat: np.ndarray
    iteration_trace: List[float] = field(default_factory=list)
    converged: bool = False
    iterations: int = 0
    epsilon: float = DEFAULT_EPSILON

    def __post_init__(self):
        self.omegas_hat = np.asarray(self.omegas_hat, dtype=float)
        self.alphas_hat = np.asarray(self.alphas_hat, dtype=np.complex128)
        self.mus_hat = np.asarray(self.mus_hat, dtype=float)
        if self.iterations >= 1 and not self.iteration_trace:
            raise BeamsyncError("trace must be nonempty once iterations ran")
        if self.converged and self.iteration_trace \
                and not self.iteration_trace[-1] < self.epsilon:
            raise BeamsyncError("converged flag inconsistent with trace")


def zero_estimates(config):
    """Algorithm cold-start state: zero CFOs/gains, unit scalings."""
    k, p = config.n_bs, config.n_frames
    return EstimationResult(
        omegas_hat=np.zeros(k),
        alphas_hat=np.zeros((k, p), dtype=np.complex128),
        mus_hat=np.ones(k),
    )


def sic_residual(burst, estimates, k, delays=None):
    """Burst minus every other transmitter's reconstruction, de-rotated by
    transmitter k's current CFO estimate."""
    cfg = burst.config
    if delays is None:
        delays = burst.known_delays()
    design = build_design_matrix(delays, estimates.omegas_hat, estimates.mus_hat,
                                 cfg.preambles, cfg.frame_len, cfg.n_frames)
    others = estimates.alphas_hat.copy()
    others[k, :] = 0
    resid = burst.samples.copy()
    span = cfg.n_frames * cfg.frame_len
    resid[:span] -= design.apply(others)
    return kernels.derotate(resid, float(estimates.omegas_hat[k]))


def _apply_single(design, alphas_row, k):
    """Reconstruction of a single transmitter: column k over all frames."""
    coef = alphas_row * design.frame_scales[:, k]        # (P,)
    return np.outer(coef, design.base[:, k]).reshape(-1)


def joint_estimate(burst, delays=None, epsilon=DEFAULT_EPSILON,
                   max_iter=DEFAULT_MAX_ITER, init=None):
    """Run the alternating SIC / re-estimation loop on one burst.

    ``init`` overrides the cold-start state (used to probe fixed points).
    Raises the inner estimators' rank/degeneracy errors annotated with the
    iteration and transmitter; exhausting ``max_iter`` is not an error.
    """
    cfg = burst.config
    if delays is None:
        delays = burst.known_delays()
    if max_iter < 1:
        raise BeamsyncError("max_iter must be >= 1")
    sigma_c_sq = scenario_sigma_c(cfg)
    state = init if init is not None else zero_estimates(cfg)
    omegas = np.array(state.omegas_hat, dtype=float, copy=True)
    alphas = np.array(state.alphas_hat, dtype=np.complex128, copy=True)
    mus = np.array(state.mus_hat, dtype=float, copy=True)

    y = burst.samples
    span = cfg.n_frames * cfg.frame_len
    trace: List[float] = []
    converged = False
    iteration = 0

    for iteration in range(1, max_iter + 1):
        try:
            design = build_design_matrix(delays, omegas, mus, cfg.preambles,
                                         cfg.frame_len, cfg.n_frames)
            alphas = estimate_channel(y, design)
            design_first = build_design_matrix(delays, omegas, mus, cfg.preambles,
                                               cfg.frame_len, cfg.n_frames,
                                               component="first")
            design_second = build_design_matrix(delays, omegas, mus, cfg.preambles,
                                                cfg.frame_len, cfg.n_frames,
                                                component="second")
            mus = estimate_mu(y, design_first, design_second, alphas,
                              fallback_mus=mus)
            design = build_design_matrix(delays, omegas, mus, cfg.preambles,
                                         cfg.frame_len, cfg.n_frames)
        except (RankDeficiencyError, DegenerateStatisticError) as exc:
            raise type(exc)(f"iteration {iteration}: {exc}") from exc

        # Jacobi sweep: every residual uses the same estimate snapshot.
        resid_base = y[:span] - design.apply(alphas)
        deltas = np.zeros(cfg.n_bs)
        for k in range(cfg.n_bs):
            resid = resid_base + _apply_single(design, alphas[k], k)
            grid = compute_grid(resid, cfg, delays, alphas_for_noise=alphas,
                                mus=mus, sigma_c_sq=sigma_c_sq,
                                noise_var=cfg.noise_var, only_k=k,
                                derotate_omega=float(omegas[k]))
            try:
                deltas[k] = cross_preamble_cfo(grid, k, alphas[k], float(mus[k]))
            except DegenerateStatisticError as exc:
                raise DegenerateStatisticError(
                    f"iteration {iteration}, transmitter {k}: {exc}") from exc
        omegas = omegas + deltas
        # Estimates are 2*pi/tau_c-periodic; fold into the principal
        # interval so a noisy early update cannot lock onto an alias
        # (the configured CFO range lies inside +-pi/tau_c).
        period = 2.0 * np.pi / cfg.tau_c
        omegas -= period * np.round(omegas / period)
        total = float(np.sum(np.abs(deltas)))
        trace.append(total)
        if total < epsilon:
            converged = True
            break

    return EstimationResult(
        omegas_hat=omegas,
        alphas_hat=alphas,
        mus_hat=mus,
        iteration_trace=trace,
        converged=converged,
        iterations=iteration,
        epsilon=epsilon,
    )
