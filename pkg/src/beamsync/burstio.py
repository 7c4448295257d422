"""Burst export/import: little-endian interleaved float64 IQ samples plus an
INI sidecar header carrying the scenario (and the ground truth when known),
so externally captured bursts can be ingested alongside synthetic ones.
"""

import configparser

import numpy as np

from .configio import scenario_from_text, scenario_to_text
from .errors import BurstIOError, ConfigError
from .synthesis import GroundTruth, ReceivedBurst

HEADER_SUFFIX = ".hdr"


def _truth_text(truth):
    lines = ["[truth]"]
    lines.append("omegas = " + ",".join(repr(float(w)) for w in truth.omegas))
    lines.append("mus = " + ",".join(repr(float(m)) for m in truth.mus))
    lines.append("delays = " + ",".join(str(int(d)) for d in truth.delays))
    re_rows = [",".join(repr(float(v)) for v in row) for row in truth.alphas.real]
    im_rows = [",".join(repr(float(v)) for v in row) for row in truth.alphas.imag]
    lines.append("alphas_real = " + ";".join(re_rows))
    lines.append("alphas_imag = " + ";".join(im_rows))
    return "\n".join(lines) + "\n"


def save_burst(burst, path):
    """Write ``path`` (binary IQ) and ``path + '.hdr'`` (scenario header)."""
    iq = np.empty(2 * burst.samples.shape[0], dtype="<f8")
    iq[0::2] = burst.samples.real
    iq[1::2] = burst.samples.imag
    header = "[burst]\n"
    header += f"n_samples = {burst.samples.shape[0]}\n"
    header += scenario_to_text(burst.config)
    if burst.truth is not None:
        header += _truth_text(burst.truth)
    try:
        with open(path, "wb") as fh:
            fh.write(iq.tobytes())
        with open(str(path) + HEADER_SUFFIX, "w", encoding="utf-8") as fh:
            fh.write(header)
    except OSError as exc:
        raise BurstIOError(f"cannot write burst {path}: {exc}") from exc


def _parse_rows(text):
    return np.asarray([[float(v) for v in row.split(",")] for row in text.split(";")])


def load_burst(path):
    """Read a burst written by :func:`save_burst` (truth optional)."""
    header_path = str(path) + HEADER_SUFFIX
    try:
        raw = np.fromfile(path, dtype="<f8")
        with open(header_path, "r", encoding="utf-8") as fh:
            header = fh.read()
    except OSError as exc:
        raise BurstIOError(f"cannot read burst {path}: {exc}") from exc

    parser = configparser.ConfigParser(interpolation=None)
    try:
        parser.read_string(header)
    except configparser.Error as exc:
        raise BurstIOError(f"bad burst header {header_path}: {exc}") from exc
    if not parser.has_section("burst"):
        raise BurstIOError(f"burst header {header_path} missing [burst]")
    n_samples = parser.getint("burst", "n_samples")
    if raw.shape[0] != 2 * n_samples:
        raise BurstIOError(
            f"burst {path}: expected {2 * n_samples} floats, found {raw.shape[0]}")
    samples = raw[0::2] + 1j * raw[1::2]

    scenario_lines = []
    in_scenario = False
    for line in header.splitlines():
        if line.strip().startswith("["):
            in_scenario = line.strip() == "[scenario]"
        if in_scenario:
            scenario_lines.append(line)
    try:
        config = scenario_from_text("\n".join(scenario_lines))
    except ConfigError as exc:
        raise BurstIOError(f"bad scenario in {header_path}: {exc}") from exc

    truth = None
    if parser.has_section("truth"):
        sec = parser["truth"]
        truth = GroundTruth(
            omegas=np.asarray([float(v) for v in sec["omegas"].split(",")]),
            alphas=_parse_rows(sec["alphas_real"]) + 1j * _parse_rows(sec["alphas_imag"]),
            mus=np.asarray([float(v) for v in sec["mus"].split(",")]),
            delays=np.asarray([int(v) for v in sec["delays"].split(",")]),
        )
    return ReceivedBurst(samples=samples, config=config, truth=truth)
