"""Scenario description, ground-truth drawing and burst synthesis.

Signal model (positive-rotation convention): the observed burst is

    y[m] = sum_k sum_p alpha_k^(p) * c_k[m - p*frame_len - tau_k] * e^{+j omega_k m} + noise

where ``c_k`` is the assembled preamble of transmitter k: its first
training sequence, ``tau0`` zero samples, then ``mu_k`` times its second
training sequence. All estimators in this package share the ``+j``
rotation sign; a positive estimated CFO means a positive rotation.
"""

import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from . import kernels
from .errors import ConfigError, ParameterError
from .sequences import TrainingSequence, default_family

BEAM_FLAT = "flat_rayleigh"
BEAM_DOMINANT = "dominant_beam"

# Amplitude floor of the dominant-beam sweep profile relative to its peak
# (keeps every frame observable; about -26 dB).
_BEAM_FLOOR = 0.05


@dataclass(frozen=True)
class PreambleSpec:
    """One transmitter's preamble: sequence pair, power scaling, gap."""

    seq0: TrainingSequence
    seq1: TrainingSequence
    mu: float = 1.0
    tau0: int = 0

    def __post_init__(self):
        if len(self.seq0) != len(self.seq1):
            raise ParameterError("sequence pair must share one length")
        if self.mu <= 0:
            raise ParameterError(f"mu must be positive, got {self.mu}")
        if self.tau0 < 0:
            raise ParameterError(f"tau0 must be >= 0, got {self.tau0}")

    @property
    def seq_len(self):
        return len(self.seq0)

    @property
    def length(self):
        return 2 * self.seq_len + self.tau0


def assemble_preamble(spec, mu=None):
    """Concatenate [seq0 | tau0 zeros | mu * seq1]; length 2N + tau0.

    ``mu`` overrides the spec's scaling when given (the joint algorithm
    rebuilds preambles from its current scaling estimates).
    """
    mu = spec.mu if mu is None else float(mu)
    if mu <= 0:
        raise ParameterError(f"mu must be positive, got {mu}")
    out = np.zeros(spec.length, dtype=np.complex128)
    n = spec.seq_len
    out[:n] = spec.seq0.samples
    out[n + spec.tau0:] = mu * spec.seq1.samples
    return out


@dataclass(frozen=True)
class ScenarioConfig:
    """Full generative description of one interference scenario."""

    n_bs: int
    n_frames: int
    seq_len: int
    frame_len: int
    tau0: int
    preambles: Tuple[PreambleSpec, ...]
    cfo_range: Tuple[float, float]
    delays: Tuple[int, ...]
    noise_var: float
    target_sinr_db: Optional[float]
    beam_profile: str
    bs_powers: Tuple[float, ...]
    seed: int
    delay_range: Optional[Tuple[int, int]] = None
    n_obs_extra: int = 0

    def __post_init__(self):
        if self.n_bs < 1 or self.n_frames < 1:
            raise ConfigError("n_bs and n_frames must be positive")
        if len(self.preambles) != self.n_bs:
            raise ConfigError("need one preamble spec per transmitter")
        if len(self.delays) != self.n_bs or len(self.bs_powers) != self.n_bs:
            raise ConfigError("delays and bs_powers must have one entry per transmitter")
        for spec in self.preambles:
            if spec.seq_len != self.seq_len or spec.tau0 != self.tau0:
                raise ConfigError("preamble specs disagree with scenario N/tau0")
        max_delay = self.max_delay
        if self.frame_len < 2 * self.seq_len + self.tau0 + max_delay:
            raise ConfigError(
                f"frame_len {self.frame_len} too short for preamble plus delay "
                f"{2 * self.seq_len + self.tau0 + max_delay}")
        if self.noise_var < 0:
            raise ConfigError("noise_var must be >= 0")
        lo, hi = self.cfo_range
        bound = math.pi / self.tau_c
        if lo > hi or lo < -bound or hi > bound:
            raise ConfigError(
                f"cfo_range {self.cfo_range} outside the unambiguous interval "
                f"(+-{bound:.6g})")
        if any(d < 0 for d in self.delays):
            raise ConfigError("delays must be >= 0")
        profile, _ = parse_beam_profile(self.beam_profile)
        if profile not in (BEAM_FLAT, BEAM_DOMINANT):
            raise ConfigError(f"unknown beam profile {self.beam_profile!r}")

    @property
    def tau_c(self):
        """Phase baseline: spacing between the two training sequences."""
        return self.seq_len + self.tau0

    @property
    def preamble_len(self):
        return 2 * self.seq_len + self.tau0

    @property
    def max_delay(self):
        upper = max(self.delays)
        if self.delay_range is not None:
            upper = max(upper, self.delay_range[1])
        return upper

    @property
    def n_obs(self):
        return self.n_frames * self.frame_len + self.n_obs_extra


def parse_beam_profile(text):
    """Split 'dominant_beam:2.5' into (name, rolloff); flat has no arg."""
    if ":" in text:
        name, arg = text.split(":", 1)
        return name, float(arg)
    return text, None


@dataclass(frozen=True)
class GroundTruth:
    """Per-transmitter CFOs, scalings and delays plus per-frame gains."""

    omegas: np.ndarray          # (K,) rad/sample
    alphas: np.ndarray          # (K, P) complex gains
    mus: np.ndarray             # (K,) positive reals
    delays: np.ndarray          # (K,) nonnegative ints

    def __post_init__(self):
        object.__setattr__(self, "omegas", np.asarray(self.omegas, dtype=float))
        object.__setattr__(self, "alphas", np.asarray(self.alphas, dtype=np.complex128))
        object.__setattr__(self, "mus", np.asarray(self.mus, dtype=float))
        object.__setattr__(self, "delays", np.asarray(self.delays, dtype=np.int64))


@dataclass(frozen=True)
class ReceivedBurst:
    """Observed sample vector plus the scenario that produced it."""

    samples: np.ndarray
    config: ScenarioConfig
    truth: Optional[GroundTruth] = None

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=np.complex128)
        object.__setattr__(self, "samples", samples)
        if samples.shape[0] < self.config.n_frames * self.config.frame_len:
            raise ConfigError("burst shorter than n_frames * frame_len")

    def known_delays(self):
        """Delays available to the estimators (assumed known)."""
        if self.truth is not None:
            return np.asarray(self.truth.delays, dtype=np.int64)
        return np.asarray(self.config.delays, dtype=np.int64)


def substream(seed, *branch):
    """Deterministic RNG substream keyed by (seed, *branch)."""
    return np.random.default_rng(np.random.SeedSequence((int(seed),) + tuple(int(b) for b in branch)))


def _beam_gains(config, rng):
    """Draw the (K, P) gain matrix before SINR calibration."""
    k, p = config.n_bs, config.n_frames
    profile, rolloff = parse_beam_profile(config.beam_profile)
    powers = np.asarray(config.bs_powers, dtype=float)
    if profile == BEAM_FLAT:
        gains = (rng.standard_normal((k, p)) + 1j * rng.standard_normal((k, p)))
        gains *= np.sqrt(powers / 2.0)[:, None]
        return gains
    width = rolloff if rolloff and rolloff > 0 else 2.0
    peaks = rng.integers(0, p, size=k)
    frames = np.arange(p)
    dist = np.abs(frames[None, :] - peaks[:, None])
    dist = np.minimum(dist, p - dist)  # circular sweep distance
    shape = np.where(dist <= width, (1.0 + np.cos(np.pi * np.minimum(dist, width) / width)) / 2.0, 0.0)
    shape = np.maximum(shape, _BEAM_FLOOR)
    scale = np.sqrt(powers / np.mean(shape ** 2, axis=1))[:, None]
    phases = np.exp(2j * np.pi * rng.random((k, p)))
    return shape * scale * phases


def burst_energy(truth, config):
    """Noiseless burst energy sum_{k,p} |alpha|^2 * N * (1 + mu^2)."""
    per_bs = np.sum(np.abs(truth.alphas) ** 2, axis=1)
    return float(np.sum(per_bs * config.seq_len * (1.0 + truth.mus ** 2)))


def calibrate_sinr(truth, config):
    """Operating-point SINR (dB) of the target transmitter (index 0).

    Target burst energy per frame over interference-plus-noise energy per
    frame; returns +inf when there is neither interference nor noise.
    """
    n = config.seq_len
    mean_pow = np.mean(np.abs(truth.alphas) ** 2, axis=1)
    sig = mean_pow[0] * n * (1.0 + truth.mus[0] ** 2)
    interf = float(np.sum(mean_pow[1:] * n * (1.0 + truth.mus[1:] ** 2)))
    denom = interf + config.frame_len * config.noise_var
    if denom <= 0.0:
        return math.inf
    return 10.0 * math.log10(sig / denom)


def draw_ground_truth(config, rng):
    """Draw CFOs, delays and beam gains; scale the target to the SINR point."""
    k = config.n_bs
    lo, hi = config.cfo_range
    omegas = rng.uniform(lo, hi, size=k) if hi > lo else np.full(k, lo)
    if config.delay_range is not None:
        dlo, dhi = config.delay_range
        delays = rng.integers(dlo, dhi + 1, size=k)
    else:
        delays = np.asarray(config.delays, dtype=np.int64)
    alphas = _beam_gains(config, rng)
    mus = np.asarray([spec.mu for spec in config.preambles], dtype=float)
    truth = GroundTruth(omegas=omegas, alphas=alphas, mus=mus, delays=delays)
    if config.target_sinr_db is not None and math.isfinite(config.target_sinr_db):
        current = calibrate_sinr(truth, config)
        if math.isfinite(current):
            scale = 10.0 ** ((config.target_sinr_db - current) / 20.0)
            alphas = alphas.copy()
            alphas[0] *= scale
            truth = GroundTruth(omegas=omegas, alphas=alphas, mus=mus, delays=delays)
    return truth


def bs_waveforms(config, mus=None):
    """Assembled preamble per transmitter (list of complex vectors)."""
    if mus is None:
        return [assemble_preamble(spec) for spec in config.preambles]
    return [assemble_preamble(spec, mu) for spec, mu in zip(config.preambles, mus)]


def synthesize_burst(config, truth, rng, waveforms=None):
    """Superimpose all transmitters' modulated preambles plus noise."""
    if waveforms is None:
        waveforms = bs_waveforms(config)
    y = np.zeros(config.n_obs, dtype=np.complex128)
    for k in range(config.n_bs):
        wave = waveforms[k]
        omega = float(truth.omegas[k])
        tau = int(truth.delays[k])
        for p in range(config.n_frames):
            alpha = complex(truth.alphas[k, p])
            if alpha == 0:
                continue
            kernels.add_modulated(y, wave, alpha, omega, p * config.frame_len + tau)
    if config.noise_var > 0:
        scale = math.sqrt(config.noise_var / 2.0)
        noise = rng.standard_normal(2 * y.shape[0])
        y += scale * (noise[0::2] + 1j * noise[1::2])
    return ReceivedBurst(samples=y, config=config, truth=truth)


def fig2_default(seed=20260810, *, n_bs=12, n_frames=12, target_sinr_db=-10.0,
                 beam_profile=BEAM_FLAT, noise_var=3e-3):
    """Default scenario mirroring the reference simulation geometry.

    K = 12 transmitters, P = 12 frames, N = 127, tau0 = 127 (phase baseline
    254), frame length 1024, unit scaling factors, CFOs within 80% of the
    unambiguous range. The sequence family, gain profile, per-BS powers and
    noise floor are package choices; override per keyword as needed.
    """
    seq_len = 127
    tau0 = 127
    pairs = default_family(n_bs, seq_len)
    preambles = tuple(PreambleSpec(seq0=a, seq1=b, mu=1.0, tau0=tau0) for a, b in pairs)
    half = 0.8 * math.pi / (seq_len + tau0)
    return ScenarioConfig(
        n_bs=n_bs,
        n_frames=n_frames,
        seq_len=seq_len,
        frame_len=1024,
        tau0=tau0,
        preambles=preambles,
        cfo_range=(-half, half),
        delays=tuple([0] * n_bs),
        delay_range=(0, 16),
        noise_var=noise_var,
        target_sinr_db=target_sinr_db,
        beam_profile=beam_profile,
        bs_powers=tuple([1.0] * n_bs),
        seed=seed,
    )
