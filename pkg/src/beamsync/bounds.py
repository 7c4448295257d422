"""Closed-form CFO estimation bound and a numeric Fisher-information oracle.

The closed form depends on the statistics only through the two aggregate
SINRs (one per training-sequence slot) and the matched-peak attenuation:

    bound = (1/gamma0 + 1/gamma1) / (2 * tau_c^2 * r_mag^2)

The oracle rebuilds the Fisher information matrix of the statistic model
numerically, treating the per-frame complex gains as nuisance parameters
(the model is linear in them), and returns the (omega, omega) entry of the
inverse. Marginalising the gains is what removes the absolute-phase terms
and leaves the tau_c baseline; a plain sum of |d mean/d omega|^2 / sigma^2
over the statistics does not reproduce the closed form.
"""

from dataclasses import dataclass

import numpy as np

from .errors import ParameterError, StepInstabilityError
from .sequences import matched_correlation_model


@dataclass(frozen=True)
class CrlbReport:
    """Aggregate SINRs and the resulting CFO variance bound."""

    gamma0: float
    gamma1: float
    bound: float
    r_mag: float
    tau_c: int


def aggregate_sinr(alphas_k, mu_k, noise_vars):
    """Aggregate SINRs (Gamma_0, Gamma_1) of the two training sequences.

    ``noise_vars`` has shape (P, 2): per-frame statistic variances for the
    two sequence slots.
    """
    alphas_k = np.asarray(alphas_k)
    noise_vars = np.asarray(noise_vars, dtype=float)
    if np.any(noise_vars <= 0):
        raise ParameterError("noise variances must be positive")
    power = np.abs(alphas_k) ** 2
    gamma0 = float(np.sum(power / noise_vars[:, 0]))
    gamma1 = float(np.sum((mu_k ** 2) * power / noise_vars[:, 1]))
    return gamma0, gamma1


def crlb_cfo(gamma0, gamma1, r_mag, tau_c):
    """Closed-form variance bound on the CFO estimate."""
    if gamma0 <= 0 or gamma1 <= 0:
        raise ParameterError("aggregate SINRs must be positive")
    if r_mag <= 0:
        raise ParameterError("matched-peak magnitude must be positive")
    if tau_c <= 0:
        raise ParameterError("tau_c must be positive")
    bound = (1.0 / gamma0 + 1.0 / gamma1) / (2.0 * tau_c ** 2 * r_mag ** 2)
    return CrlbReport(gamma0=gamma0, gamma1=gamma1, bound=bound,
                      r_mag=float(r_mag), tau_c=int(tau_c))


def lemma_mean_fn(alphas_k, mu_k, seq_len, tau_c):
    """Statistic-mean model m_{p,i}(omega) for a fixed gain vector."""
    alphas_k = np.asarray(alphas_k, dtype=np.complex128)

    def mean_fn(omega):
        r = matched_correlation_model(seq_len, omega)
        rot = mu_k * np.exp(1j * omega * tau_c)
        out = np.empty((alphas_k.shape[0], 2), dtype=np.complex128)
        out[:, 0] = alphas_k * r
        out[:, 1] = alphas_k * r * rot
        return out

    return mean_fn


def fisher_numeric(mean_fn, noise_vars, alphas_k, omega, step=1e-5):
    """Numeric CFO variance bound from the full Fisher information matrix.

    ``mean_fn(omega)`` returns the (P, 2) statistic means. Derivatives with
    respect to omega use central differences (validated against the forward
    difference; disagreement beyond 1% raises). The per-frame complex gains
    are nuisance parameters; because the model is linear in them their
    derivative directions are read off the means directly, and the gain
    block is eliminated by a Schur complement.
    """
    noise_vars = np.asarray(noise_vars, dtype=float)
    alphas_k = np.asarray(alphas_k, dtype=np.complex128)
    if np.any(np.abs(alphas_k) == 0):
        raise ParameterError("oracle needs nonzero per-frame gains")
    if np.any(noise_vars <= 0):
        raise ParameterError("noise variances must be positive")

    m0 = mean_fn(omega)
    plus = mean_fn(omega + step)
    minus = mean_fn(omega - step)
    du = (plus - minus) / (2.0 * step)          # (P, 2) d mean / d omega
    fwd = (plus - m0) / step
    denom = np.linalg.norm(du)
    if denom == 0:
        raise StepInstabilityError("flat model: zero omega-derivative")
    if np.linalg.norm(fwd - du) / denom > 0.01:
        raise StepInstabilityError(
            "forward/central differences disagree by more than 1%; "
            "reduce the step")

    w = 2.0 / noise_vars                         # FIM weights per statistic
    f = m0 / alphas_k[:, None]                   # gain directions (P, 2)

    i_ww = float(np.sum(w * np.abs(du) ** 2))
    cross = du * np.conj(f)
    i_wa = np.sum(w * np.real(cross), axis=1)    # (P,)
    i_wb = np.sum(w * np.imag(cross), axis=1)
    i_aa = np.sum(w * np.abs(f) ** 2, axis=1)
    if np.any(i_aa <= 0):
        raise ParameterError("degenerate gain information")
    i_eff = i_ww - float(np.sum((i_wa ** 2 + i_wb ** 2) / i_aa))
    if i_eff <= 0:
        raise StepInstabilityError("effective information non-positive")
    return 1.0 / i_eff
