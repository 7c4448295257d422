"""Monte-Carlo experiment runner: MAE / NMSE versus SINR with bound overlays.

Determinism contract: every trial derives its RNG substreams from
``(seed, trial_index, purpose)``, so results are independent of worker
count and scheduling, and re-running a sweep reproduces the CSV byte for
byte. Across SINR points a trial shares its interference geometry, CFOs
and noise; only the target transmitter's gain scale moves, so each curve
varies one factor at a time.

Method notes
------------
``cross_preamble`` is the proposed estimator as deployed: the cross-
preamble ML step embedded in the iterative SIC loop (its CFO output equals
``joint_algorithm``'s, which additionally reports channel NMSE). The
``separate``, ``autocorr_split``, ``weighted_avg`` and ``cp_blind`` rows
are the one-shot comparison estimators. The ``crlb`` column is the bound
matched to each method's statistics: interference-aware for the one-shot
estimators, noise-only (post-cancellation) for the SIC-based ones.
"""

import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Dict, Optional, Tuple

import numpy as np

from .baselines import (CpWrapConfig, autocorr_split_burst, cp_blind_cfo,
                        synthesize_cp_burst, weighted_average_cfo)
from .bounds import aggregate_sinr, crlb_cfo
from .errors import (BeamsyncError, BurstIOError, DegenerateStatisticError,
                     ParameterError, RankDeficiencyError, WindowError)
from .estimators import (build_design_matrix, compute_grid, estimate_channel,
                         noise_variance_grid, scenario_sigma_c,
                         separate_cfo_pooled)
from .joint import joint_estimate
from .sequences import dirichlet_magnitude
from .synthesis import draw_ground_truth, substream, synthesize_burst

METHOD_NAMES = ("autocorr_split", "cp_blind", "cross_preamble",
                "joint_algorithm", "separate", "weighted_avg")
SIC_METHODS = frozenset({"cross_preamble", "joint_algorithm"})

# A method failing more than this fraction of trials marks its row suspect.
SUSPECT_FRACTION = 0.1

_CAUGHT = (DegenerateStatisticError, RankDeficiencyError, WindowError)


@dataclass(frozen=True)
class SweepSpec:
    """One MAE/NMSE-versus-SINR experiment."""

    sinr_points_db: Tuple[float, ...]
    trials: int
    methods: Tuple[str, ...]
    base_config: object
    seed: int
    cp_config: CpWrapConfig = CpWrapConfig()

    def __post_init__(self):
        if self.trials < 1:
            raise ParameterError("trials must be >= 1")
        if not self.sinr_points_db:
            raise ParameterError("need at least one SINR point")
        unknown = set(self.methods) - set(METHOD_NAMES)
        if unknown:
            raise ParameterError(f"unknown methods: {sorted(unknown)}")


@dataclass
class MetricsRow:
    """Aggregated metrics of one (SINR point, method) cell."""

    sinr_db: float
    method: str
    cfo_mae: float
    cfo_mse: float
    chan_nmse_db: float
    crlb: float
    trials_ok: int
    wall_time_s: float
    suspect: bool


@dataclass
class TrialOutcome:
    omega_err: float = math.nan
    nmse: float = math.nan
    degenerate: bool = False
    seconds: float = 0.0


def _per_frame_separate(grid, k, mu_k):
    v0 = grid.values[k, :, 0]
    v1 = grid.values[k, :, 1] / mu_k
    return np.angle(v1 * np.conj(v0)) / grid.tau_c


def run_trial(config, trial_index, methods, seed, cp_config=CpWrapConfig()):
    """Synthesize one burst and run every requested method on it.

    Returns ``(outcomes, bound_stats)``: per-method results plus the
    truth-derived aggregate SINRs feeding the bound column.
    """
    truth = draw_ground_truth(config, substream(seed, trial_index, 0))
    burst = synthesize_burst(config, truth, substream(seed, trial_index, 1))
    delays = truth.delays
    mus = truth.mus
    omega0 = float(truth.omegas[0])
    sigma_c_sq = scenario_sigma_c(config)

    shared = {}

    def lls_alphas():
        if "lls" not in shared:
            design = build_design_matrix(delays, np.zeros(config.n_bs), mus,
                                         config.preambles, config.frame_len,
                                         config.n_frames)
            shared["lls"] = estimate_channel(burst, design)
        return shared["lls"]

    def raw_grid():
        if "grid" not in shared:
            shared["grid"] = compute_grid(
                burst.samples, config, delays, alphas_for_noise=lls_alphas(),
                mus=mus, sigma_c_sq=sigma_c_sq, noise_var=config.noise_var)
        return shared["grid"]

    def joint_result():
        if "joint" not in shared:
            shared["joint"] = joint_estimate(burst, delays=delays)
        return shared["joint"]

    outcomes: Dict[str, TrialOutcome] = {}
    for method in METHOD_NAMES:
        if method not in methods:
            continue
        out = TrialOutcome()
        tic = time.perf_counter()
        try:
            if method == "separate":
                weights = np.abs(lls_alphas()[0]) ** 2
                out.omega_err = abs(
                    separate_cfo_pooled(raw_grid(), 0, mus[0], weights) - omega0)
            elif method == "weighted_avg":
                ests = _per_frame_separate(raw_grid(), 0, mus[0])
                weights = np.abs(lls_alphas()[0]) ** 2
                out.omega_err = abs(weighted_average_cfo(ests, weights) - omega0)
            elif method == "autocorr_split":
                weights = np.abs(lls_alphas()[0]) ** 2
                out.omega_err = abs(
                    autocorr_split_burst(burst, 0, delays, weights) - omega0)
            elif method == "cp_blind":
                cp_burst = synthesize_cp_burst(config, truth,
                                               substream(seed, trial_index, 2),
                                               cp_config)
                out.omega_err = abs(cp_blind_cfo(cp_burst, cp_config, 0, delays) - omega0)
            elif method in ("cross_preamble", "joint_algorithm"):
                res = joint_result()
                out.omega_err = abs(float(res.omegas_hat[0]) - omega0)
                denom = float(np.sum(np.abs(truth.alphas[0]) ** 2))
                if denom > 0:
                    out.nmse = float(
                        np.sum(np.abs(res.alphas_hat[0] - truth.alphas[0]) ** 2) / denom)
        except _CAUGHT:
            out.degenerate = True
        out.seconds = time.perf_counter() - tic
        outcomes[method] = out

    n = config.seq_len
    nv_pre = noise_variance_grid(truth.alphas, mus, sigma_c_sq,
                                 config.noise_var, n)[0]
    gamma_pre = aggregate_sinr(truth.alphas[0], mus[0], nv_pre)
    if config.noise_var > 0:
        nv_genie = np.full((config.n_frames, 2), config.noise_var / n)
        gamma_genie = aggregate_sinr(truth.alphas[0], mus[0], nv_genie)
    else:
        gamma_genie = (math.inf, math.inf)
    bound_stats = {
        "gamma_pre": gamma_pre,
        "gamma_genie": gamma_genie,
        "r_mag": float(dirichlet_magnitude(n, omega0)),
    }
    return outcomes, bound_stats


def _trial_job(args):
    config, trial_index, methods, seed, cp_config = args
    return run_trial(config, trial_index, methods, seed, cp_config)


def _bound_for(method, mean_pre, mean_genie, mean_r, tau_c):
    gammas = mean_genie if method in SIC_METHODS else mean_pre
    if not all(math.isfinite(g) for g in gammas):
        return 0.0
    if min(gammas) <= 0 or mean_r <= 0:
        return math.nan
    return crlb_cfo(gammas[0], gammas[1], mean_r, tau_c).bound


def run_sweep(spec, workers=1):
    """Run every (SINR point, trial) cell and aggregate metrics rows."""
    rows = []
    for sinr in spec.sinr_points_db:
        config = replace(spec.base_config, target_sinr_db=float(sinr))
        jobs = [(config, t, spec.methods, spec.seed, spec.cp_config)
                for t in range(spec.trials)]
        if workers > 1:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                results = list(pool.map(_trial_job, jobs, chunksize=8))
        else:
            results = [_trial_job(job) for job in jobs]

        pre = np.mean([r[1]["gamma_pre"] for r in results], axis=0)
        genie_list = [r[1]["gamma_genie"] for r in results]
        if all(math.isfinite(g[0]) and math.isfinite(g[1]) for g in genie_list):
            genie = np.mean(genie_list, axis=0)
        else:
            genie = (math.inf, math.inf)
        mean_r = float(np.mean([r[1]["r_mag"] for r in results]))

        for method in sorted(spec.methods):
            outs = [r[0][method] for r in results]
            ok = [o for o in outs if not o.degenerate]
            errs = np.asarray([o.omega_err for o in ok], dtype=float)
            nmses = np.asarray([o.nmse for o in ok if math.isfinite(o.nmse)], dtype=float)
            rows.append(MetricsRow(
                sinr_db=float(sinr),
                method=method,
                cfo_mae=float(np.mean(errs)) if errs.size else math.nan,
                cfo_mse=float(np.mean(errs ** 2)) if errs.size else math.nan,
                chan_nmse_db=(10.0 * math.log10(float(np.mean(nmses)))
                              if nmses.size else math.nan),
                crlb=_bound_for(method, tuple(pre), tuple(genie), mean_r,
                                spec.base_config.tau_c),
                trials_ok=len(ok),
                wall_time_s=float(sum(o.seconds for o in outs)),
                suspect=(spec.trials - len(ok)) > SUSPECT_FRACTION * spec.trials,
            ))
    rows.sort(key=lambda r: (r.sinr_db, r.method))
    return rows


CSV_FIELDS = ("sinr_db", "method", "cfo_mae", "cfo_mse", "chan_nmse_db",
              "crlb", "trials_ok", "wall_time_s", "suspect")


def _format_cell(value):
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def emit_csv(rows, path, include_wall_time=False):
    """Write metrics rows as CSV; shortest round-trip float formatting.

    ``wall_time_s`` is off by default so identical sweeps produce identical
    bytes; pass ``include_wall_time=True`` for profiling output.
    """
    fields = [f for f in CSV_FIELDS if include_wall_time or f != "wall_time_s"]
    lines = [",".join(fields)]
    ordered = sorted(rows, key=lambda r: (r.sinr_db, r.method))
    for row in ordered:
        lines.append(",".join(_format_cell(getattr(row, f)) for f in fields))
    text = "\n".join(lines) + "\n"
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise BurstIOError(f"cannot write CSV {path}: {exc}") from exc
    return text


def read_csv_rows(path):
    """Parse an emitted CSV back into dictionaries (floats round-trip)."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            lines = [ln for ln in fh.read().splitlines() if ln]
    except OSError as exc:
        raise BurstIOError(f"cannot read CSV {path}: {exc}") from exc
    header = lines[0].split(",")
    out = []
    for line in lines[1:]:
        cells = line.split(",")
        row = {}
        for name, cell in zip(header, cells):
            if name == "method":
                row[name] = cell
            elif name in ("trials_ok", "suspect"):
                row[name] = int(cell)
            else:
                row[name] = float(cell)
        out.append(row)
    return out


def crlb_rows(config, sinr_points_db, seed=None):
    """Interference-aware bound inputs per SINR point (single truth draw)."""
    seed = config.seed if seed is None else seed
    sigma_c_sq = scenario_sigma_c(config)
    out = []
    for sinr in sinr_points_db:
        cfg = replace(config, target_sinr_db=float(sinr))
        truth = draw_ground_truth(cfg, substream(seed, 0, 0))
        nv = noise_variance_grid(truth.alphas, truth.mus, sigma_c_sq,
                                 cfg.noise_var, cfg.seq_len)[0]
        g0, g1 = aggregate_sinr(truth.alphas[0], truth.mus[0], nv)
        r_mag = float(dirichlet_magnitude(cfg.seq_len, float(truth.omegas[0])))
        out.append(crlb_cfo(g0, g1, r_mag, cfg.tau_c))
    return out
