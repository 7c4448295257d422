"""Training-sequence generation and correlation primitives.

Everything downstream (burst synthesis, correlation statistics, the CFO
estimators) consumes the two primitives defined here: the normalised
cross-correlation between two sequences under a timing/frequency offset,
and the empirical sidelobe variance of a sequence family.

Conventions
-----------
* Sequences are unit-envelope complex vectors of length N.
* ``cross_correlate(a, b, tau, omega) = (1/N) sum_m a[m] conj(b[m-tau]) e^{-j omega m}``
  with b treated as zero outside [0, N).
* For any unit-envelope sequence the matched autocorrelation under offset
  ``omega`` has magnitude ``|sin(N omega/2) / (N sin(omega/2))|`` (Dirichlet
  kernel); the mismatched correlations behave like zero-mean complex
  Gaussian with variance ``sigma_c^2 / N``.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ParameterError
from . import kernels


@dataclass(frozen=True)
class TrainingSequence:
    """Unit-power training sequence plus family metadata."""

    samples: np.ndarray
    family_id: str = "Custom"
    root: int = 0

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=np.complex128)
        object.__setattr__(self, "samples", samples)
        n = samples.shape[0]
        if n < 3:
            raise ParameterError(f"sequence length {n} < 3")
        if self.family_id == "ZadoffChu":
            if n % 2 == 0:
                raise ParameterError(f"Zadoff-Chu length {n} must be odd")
            if self.root <= 0 or math.gcd(self.root, n) != 1:
                raise ParameterError(
                    f"Zadoff-Chu root {self.root} not coprime with length {n}")
        mags = np.abs(samples)
        if np.any(np.abs(mags - 1.0) > 1e-12):
            raise ParameterError("sequence is not unit-envelope")

    def __len__(self):
        return self.samples.shape[0]

    def __eq__(self, other):
        if not isinstance(other, TrainingSequence):
            return NotImplemented
        return len(self) == len(other) and np.array_equal(self.samples, other.samples)

    def __hash__(self):
        return hash((self.family_id, self.root, len(self)))


def generate_zc(root, length):
    """Zadoff-Chu sequence c[m] = exp(-j*pi*root*m*(m+1)/length).

    ``length`` must be odd and >= 3, ``root`` coprime with ``length``.
    """
    if length < 3 or length % 2 == 0:
        raise ParameterError(f"length must be odd and >= 3, got {length}")
    if root <= 0 or math.gcd(root, length) != 1:
        raise ParameterError(f"root {root} must be positive and coprime with {length}")
    m = np.arange(length)
    samples = np.exp(-1j * np.pi * root * m * (m + 1) / length)
    return TrainingSequence(samples=samples, family_id="ZadoffChu", root=root)


def cross_correlate(a, b, tau=0, omega=0.0):
    """Normalised cross-correlation of two sequences at offset (tau, omega)."""
    return kernels.shifted_correlate(a.samples, b.samples, int(tau), float(omega))


def autocorrelation(seq, omega=0.0):
    """Matched correlation of a sequence with itself under CFO ``omega``."""
    return kernels.shifted_correlate(seq.samples, seq.samples, 0, float(omega))


def dirichlet_magnitude(n, omega):
    """|sin(N w/2) / (N sin(w/2))|, the matched-peak attenuation profile."""
    omega = np.asarray(omega, dtype=float)
    half = omega / 2.0
    num = np.sin(n * half)
    den = n * np.sin(half)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(np.abs(den) < 1e-300, 1.0, np.abs(num / np.where(den == 0, 1, den)))
    return out if out.ndim else float(out)


def matched_correlation_model(n, omega):
    """Complex matched correlation (1/N) sum_m e^{j omega m} in closed form.

    This is the mean of the matched correlation statistic under the
    positive-rotation synthesis convention; its magnitude is the Dirichlet
    profile.
    """
    if abs(omega) < 1e-300:
        return 1.0 + 0.0j
    half = omega / 2.0
    return np.exp(1j * omega * (n - 1) / 2.0) * math.sin(n * half) / (n * math.sin(half))


def estimate_sigma_c(family, delays=range(1, 17), include_matched=True):
    """Empirical sidelobe variance sigma_c^2 of a sequence family.

    Pools ``cross_correlate(a, b, tau, 0)`` over every mismatched pair at
    tau = 0 and the configured delays, plus matched pairs at the nonzero
    delays; returns N times the sample variance, consistent with modelling
    each pooled value as CN(0, sigma_c^2 / N). Matched pairs at tau = 0 are
    excluded (that is the correlation peak, not a sidelobe).

    ``include_matched=False`` drops the matched-sequence sidelobes from the
    pool; that is the operational mixture when every transmitter owns a
    distinct sequence pair, so no statistic ever sees its own sequence at a
    wrong delay.
    """
    family = list(family)
    if len(family) < 2:
        raise ParameterError("sigma_c estimation needs at least 2 sequences")
    delays = [int(d) for d in delays]
    if any(d == 0 for d in delays):
        raise ParameterError("delay set must not contain 0")
    n = len(family[0])
    values = []
    for a in family:
        for b in family:
            matched = a == b
            if matched and not include_matched:
                continue
            taus = delays if matched else [0] + delays
            for tau in taus:
                values.append(cross_correlate(a, b, tau, 0.0))
    values = np.asarray(values)
    return float(n * np.var(values))


def default_family(n_pairs, length=127):
    """Ordered sequence pairs (c_{k,0}, c_{k,1}) for ``n_pairs`` transmitters.

    Pairs are built from Zadoff-Chu roots 1, 2, ... so that each ordered
    pair is unique per transmitter. Roots that share a factor with
    ``length`` are skipped.
    """
    roots = []
    r = 1
    while len(roots) < 2 * n_pairs:
        if r >= length:
            raise ParameterError(
                f"cannot build {n_pairs} distinct pairs at length {length}")
        if math.gcd(r, length) == 1:
            roots.append(r)
        r += 1
    seqs = [generate_zc(root, length) for root in roots]
    return [(seqs[2 * k], seqs[2 * k + 1]) for k in range(n_pairs)]
