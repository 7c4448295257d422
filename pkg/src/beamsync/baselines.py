"""Comparison CFO estimators: CP-based blind, half-sequence autocorrelation
split, and power-weighted averaging of per-frame estimates.

The blind baseline needs cyclic-prefix structure that the abstract burst
model does not have, so an optional wrapper re-synthesises each training
sequence as a frequency-mapped symbol with a cyclic prefix. Only the blind
estimator consumes wrapped bursts; everything else runs on the plain model.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import DegenerateStatisticError, ParameterError
from .synthesis import GroundTruth, ReceivedBurst

# Magnitude floor mirroring the estimators' degenerate threshold.
_FLOOR = 1e-15


@dataclass(frozen=True)
class CpWrapConfig:
    """Cyclic-prefix wrapping: symbol length and prefix length in samples."""

    n_fft: int = 256
    n_cp: int = 32

    def __post_init__(self):
        if not (0 < self.n_cp < self.n_fft):
            raise ParameterError("need 0 < n_cp < n_fft")

    @property
    def symbol_len(self):
        return self.n_fft + self.n_cp


def _cp_symbol(seq_samples, cfg):
    """Map a sequence onto subcarriers, IFFT, unit-power scale, prepend CP."""
    n = seq_samples.shape[0]
    if n > cfg.n_fft:
        raise ParameterError("sequence longer than the FFT size")
    spectrum = np.zeros(cfg.n_fft, dtype=np.complex128)
    spectrum[1:n + 1] = seq_samples      # skip DC
    sym = np.fft.ifft(spectrum) * (cfg.n_fft / math.sqrt(n))
    return np.concatenate([sym[-cfg.n_cp:], sym])


def cp_wrap_preamble(spec, cfg):
    """CP-wrapped preamble: [sym0 | tau0 zeros | mu * sym1]."""
    sym0 = _cp_symbol(spec.seq0.samples, cfg)
    sym1 = _cp_symbol(spec.seq1.samples, cfg)
    gap = np.zeros(spec.tau0, dtype=np.complex128)
    return np.concatenate([sym0, gap, spec.mu * sym1])


def synthesize_cp_burst(config, truth, rng, cfg=CpWrapConfig()):
    """Burst with the same truth but CP-wrapped waveforms (feeds cp_blind_cfo)."""
    wrapped_len = 2 * cfg.symbol_len + config.tau0
    if config.frame_len < wrapped_len + config.max_delay:
        raise ParameterError(
            f"frame_len {config.frame_len} too short for CP-wrapped preamble "
            f"({wrapped_len} plus delay)")
    waveforms = [cp_wrap_preamble(spec, cfg) for spec in config.preambles]
    y = np.zeros(config.n_obs, dtype=np.complex128)
    for k in range(config.n_bs):
        omega = float(truth.omegas[k])
        tau = int(truth.delays[k])
        for p in range(config.n_frames):
            alpha = complex(truth.alphas[k, p])
            if alpha == 0:
                continue
            kernels.add_modulated(y, waveforms[k], alpha, omega,
                                  p * config.frame_len + tau)
    if config.noise_var > 0:
        scale = math.sqrt(config.noise_var / 2.0)
        noise = rng.standard_normal(2 * y.shape[0])
        y += scale * (noise[0::2] + 1j * noise[1::2])
    return ReceivedBurst(samples=y, config=config, truth=truth)


def cp_blind_cfo(burst, cfg=CpWrapConfig(), k=0, delays=None):
    """Blind CP-correlation estimate pooled over all wrapped symbols.

    Correlates each prefix against its copy one symbol later; the known
    symbol grid of transmitter ``k`` places the windows, but the statistic
    itself sums whatever occupies them (no sequence matching), which is why
    interference corrupts it.
    """
    config = burst.config
    if delays is None:
        delays = burst.known_delays()
    tau = int(delays[k])
    y = burst.samples
    acc = 0.0 + 0.0j
    for p in range(config.n_frames):
        frame0 = p * config.frame_len + tau
        for i in (0, 1):
            start = frame0 + i * (cfg.symbol_len + config.tau0)
            cp = y[start:start + cfg.n_cp]
            body = y[start + cfg.n_fft:start + cfg.n_fft + cfg.n_cp]
            acc += np.vdot(cp, body)
    if abs(acc) < _FLOOR:
        raise DegenerateStatisticError("CP correlation numerically void")
    return float(np.angle(acc) / cfg.n_fft)


def _split_windows(seq_samples):
    """Early/late half sequences and the late-start offset (odd length drops
    the middle sample)."""
    n = seq_samples.shape[0]
    half = n // 2
    late_start = n - half
    return seq_samples[:half], seq_samples[late_start:], late_start


def autocorr_split_cfo(burst, k, p, i, tau_k):
    """Half-sequence phase-difference estimate from one statistic window."""
    config = burst.config
    seq = (config.preambles[k].seq0 if i == 0 else config.preambles[k].seq1).samples
    early, late, sep = _split_windows(seq)
    start = int(tau_k) + p * config.frame_len + i * config.tau_c
    z_early = kernels.window_correlate(burst.samples, early, start)
    z_late = kernels.window_correlate(burst.samples, late, start + sep)
    prod = z_late * np.conj(z_early)
    if abs(prod) < _FLOOR:
        raise DegenerateStatisticError("half-sequence correlation void")
    return float(np.angle(prod) / sep)


def autocorr_split_burst(burst, k=0, delays=None, frame_weights=None):
    """Burst-level split estimate: complex half-correlation products summed
    over every (frame, sequence) before the single angle.

    The products are frame-ramp free, so they pool coherently; optional
    ``frame_weights`` (e.g. estimated channel powers) emphasise strong
    frames.
    """
    config = burst.config
    if delays is None:
        delays = burst.known_delays()
    if frame_weights is None:
        frame_weights = np.ones(config.n_frames)
    tau = int(delays[k])
    y = burst.samples
    acc = 0.0 + 0.0j
    sep_out = None
    for i in (0, 1):
        seq = (config.preambles[k].seq0 if i == 0 else config.preambles[k].seq1).samples
        early, late, sep = _split_windows(seq)
        sep_out = sep
        base = tau + i * config.tau_c
        for p in range(config.n_frames):
            start = base + p * config.frame_len
            z_early = kernels.window_correlate(y, early, start)
            z_late = kernels.window_correlate(y, late, start + sep)
            acc += frame_weights[p] * z_late * np.conj(z_early)
    if abs(acc) < _FLOOR:
        raise DegenerateStatisticError("pooled half-sequence correlation void")
    return float(np.angle(acc) / sep_out)


def weighted_average_cfo(per_frame_estimates, weights):
    """Channel-power weighted mean of per-frame CFO estimates."""
    est = np.asarray(per_frame_estimates, dtype=float)
    w = np.asarray(weights, dtype=float)
    if est.shape != w.shape:
        raise ParameterError("estimates and weights must align")
    if np.any(w < 0):
        raise ParameterError("weights must be nonnegative")
    total = float(np.sum(w))
    if total <= 0:
        raise DegenerateStatisticError("all-zero weights")
    return float(np.sum(w * est) / total)


def unambiguous_range(baseline_samples):
    """Half-width of an angle estimator's unambiguous CFO interval."""
    return math.pi / baseline_samples
