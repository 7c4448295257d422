"""Quick built-in invariant checks behind the ``selftest`` CLI subcommand.

Each check prints one PASS/FAIL line; the command exits 0 only if all pass.
These are smoke-level versions of the full pytest suite.
"""

import math
import tempfile
from pathlib import Path

import numpy as np

from . import harness, kernels
from .bounds import aggregate_sinr, crlb_cfo, fisher_numeric, lemma_mean_fn
from .burstio import load_burst, save_burst
from .joint import joint_estimate
from .sequences import (autocorrelation, dirichlet_magnitude, generate_zc,
                        default_family)
from .synthesis import (PreambleSpec, ScenarioConfig, draw_ground_truth,
                        assemble_preamble, substream, synthesize_burst)


def _small_config(n_bs=2, seed=7, target=None, noise_var=1e-3):
    pairs = default_family(n_bs, 63)
    preambles = tuple(PreambleSpec(seq0=a, seq1=b, mu=1.0, tau0=31) for a, b in pairs)
    half = 0.8 * math.pi / (63 + 31)
    return ScenarioConfig(
        n_bs=n_bs, n_frames=3, seq_len=63, frame_len=256, tau0=31,
        preambles=preambles, cfo_range=(-half, half),
        delays=tuple([0] * n_bs), delay_range=(0, 4), noise_var=noise_var,
        target_sinr_db=target, beam_profile="flat_rayleigh",
        bs_powers=tuple([1.0] * n_bs), seed=seed)


def _check_sequences():
    seq = generate_zc(5, 127)
    if np.max(np.abs(np.abs(seq.samples) - 1.0)) > 1e-12:
        return False
    if abs(autocorrelation(seq, 0.0) - 1.0) > 1e-12:
        return False
    grid = np.linspace(-math.pi / 8, math.pi / 8, 41)
    for w in grid:
        if abs(abs(autocorrelation(seq, w)) - dirichlet_magnitude(127, w)) > 1e-9:
            return False
    return True


def _check_synthesis_energy():
    cfg = _small_config(noise_var=0.0)
    truth = draw_ground_truth(cfg, substream(1, 0, 0))
    burst = synthesize_burst(cfg, truth, substream(1, 0, 1))
    energy = float(np.sum(np.abs(burst.samples) ** 2))
    expect = float(np.sum(np.abs(truth.alphas) ** 2) * cfg.seq_len * 2.0)
    return abs(energy - expect) <= 1e-9 * expect


def _check_exact_recovery():
    cfg = _small_config(n_bs=1, noise_var=0.0)
    omega = 0.8 * math.pi / cfg.tau_c
    rng = substream(3, 0, 0)
    truth = draw_ground_truth(cfg, rng)
    truth.omegas[:] = omega
    burst = synthesize_burst(cfg, truth, substream(3, 0, 1))
    res = joint_estimate(burst)
    return abs(res.omegas_hat[0] - omega) < 1e-10


def _check_crlb_oracle():
    rng = np.random.default_rng(11)
    alphas = rng.standard_normal(4) + 1j * rng.standard_normal(4)
    nv = np.full((4, 2), 0.05)
    g0, g1 = aggregate_sinr(alphas, 1.0, nv)
    omega = 2e-4
    r_mag = dirichlet_magnitude(63, omega)
    closed = crlb_cfo(g0, g1, r_mag, 94).bound
    numeric = fisher_numeric(lemma_mean_fn(alphas, 1.0, 63, 94), nv, alphas, omega)
    return abs(closed - numeric) / closed < 1e-2


def _check_determinism():
    cfg = _small_config(target=0.0)
    spec = harness.SweepSpec(sinr_points_db=(0.0,), trials=3,
                             methods=("separate", "joint_algorithm"),
                             base_config=cfg, seed=5)
    with tempfile.TemporaryDirectory() as tmp:
        a = harness.emit_csv(harness.run_sweep(spec), Path(tmp) / "a.csv")
        b = harness.emit_csv(harness.run_sweep(spec), Path(tmp) / "b.csv")
    return a == b


def _check_burst_roundtrip():
    cfg = _small_config()
    truth = draw_ground_truth(cfg, substream(9, 0, 0))
    burst = synthesize_burst(cfg, truth, substream(9, 0, 1))
    with tempfile.TemporaryDirectory() as tmp:
        path = str(Path(tmp) / "burst.iq")
        save_burst(burst, path)
        loaded = load_burst(path)
    return (np.array_equal(loaded.samples, burst.samples)
            and np.array_equal(loaded.truth.omegas, burst.truth.omegas))


CHECKS = (
    ("sequence invariants (envelope, peak, attenuation law)", _check_sequences),
    ("noiseless burst energy accounting", _check_synthesis_energy),
    ("single-transmitter exact recovery", _check_exact_recovery),
    ("closed-form bound vs numeric Fisher oracle", _check_crlb_oracle),
    ("sweep determinism", _check_determinism),
    ("burst file round-trip", _check_burst_roundtrip),
)


def run():
    print(f"backend: {kernels.backend_name()}")
    failures = 0
    for label, check in CHECKS:
        try:
            ok = check()
        except Exception as exc:   # a crashed check is a failure, keep going
            ok = False
            label = f"{label} ({type(exc).__name__}: {exc})"
        print(f"{'PASS' if ok else 'FAIL'}  {label}")
        failures += 0 if ok else 1
    return 0 if failures == 0 else 3
