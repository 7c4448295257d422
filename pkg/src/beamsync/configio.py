"""INI-style configuration files for scenarios, sweeps and the CP wrapper.

Three sections are recognised: ``[scenario]``, ``[sweep]`` and
``[baselines]``. Every ScenarioConfig / SweepSpec field is a key; unknown
keys or sections are hard errors so typos cannot silently fall back to
defaults.
"""

import configparser
import io
import math

import numpy as np

from .baselines import CpWrapConfig
from .errors import ConfigError
from .sequences import generate_zc
from .synthesis import PreambleSpec, ScenarioConfig, fig2_default

SCENARIO_KEYS = {
    "n_bs", "n_frames", "seq_len", "frame_len", "tau0", "mu", "zc_root_pairs",
    "cfo_range", "delays", "delay_range", "noise_var", "target_sinr_db",
    "beam_profile", "bs_powers", "n_obs_extra", "seed",
}
SWEEP_KEYS = {"sinr_points_db", "trials", "methods", "seed"}
BASELINE_KEYS = {"n_fft", "n_cp"}
SECTIONS = {"scenario": SCENARIO_KEYS, "sweep": SWEEP_KEYS, "baselines": BASELINE_KEYS}

DEFAULT_SINR_POINTS = (-30.0, -25.0, -20.0, -15.0, -10.0, -5.0, 0.0)
DEFAULT_TRIALS = 200
ALL_METHODS = ("autocorr_split", "cp_blind", "cross_preamble", "joint_algorithm",
               "separate", "weighted_avg")


def _floats(text):
    return tuple(float(tok) for tok in text.replace(";", ",").split(",") if tok.strip())


def _ints(text):
    return tuple(int(tok) for tok in text.split(",") if tok.strip())


def _broadcast(values, n, what):
    if len(values) == 1:
        return tuple(values) * n
    if len(values) != n:
        raise ConfigError(f"{what} needs 1 or {n} entries, got {len(values)}")
    return tuple(values)


def _parse_root_pairs(text, n_bs):
    if text.strip().lower() == "auto":
        return None
    pairs = []
    for chunk in text.split(";"):
        toks = [int(t) for t in chunk.split(",") if t.strip()]
        if len(toks) != 2:
            raise ConfigError(f"bad root pair {chunk!r}")
        pairs.append((toks[0], toks[1]))
    if len(pairs) != n_bs:
        raise ConfigError(f"zc_root_pairs needs {n_bs} pairs, got {len(pairs)}")
    return pairs


def _read_parser(text):
    parser = configparser.ConfigParser(interpolation=None)
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"cannot parse config: {exc}") from exc
    for section in parser.sections():
        if section not in SECTIONS:
            raise ConfigError(f"unknown section [{section}]")
        unknown = set(parser[section]) - SECTIONS[section]
        if unknown:
            raise ConfigError(
                f"unknown keys in [{section}]: {', '.join(sorted(unknown))}")
    return parser


def scenario_from_text(text):
    """Build a ScenarioConfig from config-file text (defaults fill gaps)."""
    parser = _read_parser(text)
    sec = parser["scenario"] if parser.has_section("scenario") else {}
    base = fig2_default()

    n_bs = int(sec.get("n_bs", base.n_bs))
    n_frames = int(sec.get("n_frames", base.n_frames))
    seq_len = int(sec.get("seq_len", base.seq_len))
    frame_len = int(sec.get("frame_len", base.frame_len))
    tau0 = int(sec.get("tau0", base.tau0))
    seed = int(sec.get("seed", base.seed))
    noise_var = float(sec.get("noise_var", base.noise_var))
    n_obs_extra = int(sec.get("n_obs_extra", 0))

    mus = _broadcast(_floats(sec.get("mu", "1.0")), n_bs, "mu")
    pairs = _parse_root_pairs(sec.get("zc_root_pairs", "auto"), n_bs)
    if pairs is None:
        from .sequences import default_family
        seq_pairs = default_family(n_bs, seq_len)
    else:
        seq_pairs = [(generate_zc(a, seq_len), generate_zc(b, seq_len)) for a, b in pairs]
    preambles = tuple(
        PreambleSpec(seq0=a, seq1=b, mu=mus[k], tau0=tau0)
        for k, (a, b) in enumerate(seq_pairs))

    cfo_text = sec.get("cfo_range", "auto").strip().lower()
    if cfo_text == "auto":
        half = 0.8 * math.pi / (seq_len + tau0)
        cfo_range = (-half, half)
    else:
        vals = _floats(cfo_text)
        if len(vals) == 1:
            cfo_range = (-abs(vals[0]), abs(vals[0]))
        elif len(vals) == 2:
            cfo_range = (vals[0], vals[1])
        else:
            raise ConfigError("cfo_range needs 'auto', one half-width, or lo,hi")

    delays = _broadcast(_ints(sec.get("delays", "0")), n_bs, "delays")
    drange_text = sec.get("delay_range", "0,16").strip().lower()
    if drange_text in ("none", ""):
        delay_range = None
    else:
        vals = _ints(drange_text)
        if len(vals) != 2 or vals[0] > vals[1] or vals[0] < 0:
            raise ConfigError("delay_range needs 'none' or lo,hi with 0 <= lo <= hi")
        delay_range = (vals[0], vals[1])

    sinr_text = sec.get("target_sinr_db", "").strip().lower()
    if sinr_text in ("", "none"):
        target = base.target_sinr_db if "target_sinr_db" not in sec else None
    else:
        target = float(sinr_text)

    bs_powers = _broadcast(_floats(sec.get("bs_powers", "1.0")), n_bs, "bs_powers")

    return ScenarioConfig(
        n_bs=n_bs, n_frames=n_frames, seq_len=seq_len, frame_len=frame_len,
        tau0=tau0, preambles=preambles, cfo_range=cfo_range, delays=delays,
        delay_range=delay_range, noise_var=noise_var, target_sinr_db=target,
        beam_profile=sec.get("beam_profile", base.beam_profile),
        bs_powers=bs_powers, n_obs_extra=n_obs_extra, seed=seed)


def sweep_from_text(text, base_config=None):
    """Build (sinr_points, trials, methods, seed) from config-file text."""
    parser = _read_parser(text)
    config = base_config if base_config is not None else scenario_from_text(text)
    sec = parser["sweep"] if parser.has_section("sweep") else {}
    points = _floats(sec.get("sinr_points_db", "")) or DEFAULT_SINR_POINTS
    trials = int(sec.get("trials", DEFAULT_TRIALS))
    if trials < 1:
        raise ConfigError("trials must be >= 1")
    methods_text = sec.get("methods", "").strip()
    methods = tuple(tok.strip() for tok in methods_text.split(",") if tok.strip()) \
        or ALL_METHODS
    unknown = set(methods) - set(ALL_METHODS)
    if unknown:
        raise ConfigError(f"unknown methods: {', '.join(sorted(unknown))}")
    seed = int(sec.get("seed", config.seed))
    return points, trials, methods, seed, config


def baselines_from_text(text):
    parser = _read_parser(text)
    if not parser.has_section("baselines"):
        return CpWrapConfig()
    sec = parser["baselines"]
    return CpWrapConfig(n_fft=int(sec.get("n_fft", 256)), n_cp=int(sec.get("n_cp", 32)))


def _fmt(value):
    if isinstance(value, float):
        return repr(value)
    return str(value)


def scenario_to_text(config):
    """Serialise a ScenarioConfig back to config-file text.

    Only Zadoff-Chu preambles round-trip; custom sample vectors have no
    file representation.
    """
    pairs = []
    for spec in config.preambles:
        if spec.seq0.family_id != "ZadoffChu" or spec.seq1.family_id != "ZadoffChu":
            raise ConfigError("only Zadoff-Chu preambles can be serialised")
        pairs.append(f"{spec.seq0.root},{spec.seq1.root}")
    lines = ["[scenario]"]
    lines.append(f"n_bs = {config.n_bs}")
    lines.append(f"n_frames = {config.n_frames}")
    lines.append(f"seq_len = {config.seq_len}")
    lines.append(f"frame_len = {config.frame_len}")
    lines.append(f"tau0 = {config.tau0}")
    lines.append("mu = " + ",".join(repr(s.mu) for s in config.preambles))
    lines.append("zc_root_pairs = " + ";".join(pairs))
    lines.append(f"cfo_range = {config.cfo_range[0]!r},{config.cfo_range[1]!r}")
    lines.append("delays = " + ",".join(str(d) for d in config.delays))
    if config.delay_range is None:
        lines.append("delay_range = none")
    else:
        lines.append(f"delay_range = {config.delay_range[0]},{config.delay_range[1]}")
    lines.append(f"noise_var = {config.noise_var!r}")
    target = "none" if config.target_sinr_db is None else repr(config.target_sinr_db)
    lines.append(f"target_sinr_db = {target}")
    lines.append(f"beam_profile = {config.beam_profile}")
    lines.append("bs_powers = " + ",".join(repr(p) for p in config.bs_powers))
    lines.append(f"n_obs_extra = {config.n_obs_extra}")
    lines.append(f"seed = {config.seed}")
    return "\n".join(lines) + "\n"


def read_config_file(path):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
