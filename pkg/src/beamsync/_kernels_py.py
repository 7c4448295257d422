"""Pure-NumPy implementations of the hot inner loops.

Drop-in fallback for the compiled extension (`_corekernels`). Both backends
implement the same four primitives; `beamsync.kernels` picks one at import
time. Keep signatures and numerical conventions in sync with the .pyx file.
"""

import numpy as np

BACKEND = "python"


def window_correlate(y, c, start):
    """(1/N) * sum_m y[start+m] * conj(c[m]) over the length of ``c``."""
    n = c.shape[0]
    return np.vdot(c, y[start:start + n]) / n


def shifted_correlate(a, b, tau, omega):
    """(1/N) * sum_m a[m] * conj(b[m-tau]) * exp(-1j*omega*m).

    Out-of-range indices of ``b`` contribute zero. Normalised by len(a).
    """
    na = a.shape[0]
    nb = b.shape[0]
    lo = max(0, tau)
    hi = min(na, nb + tau)
    if hi <= lo:
        return 0.0 + 0.0j
    m = np.arange(lo, hi)
    terms = a[lo:hi] * np.conj(b[lo - tau:hi - tau]) * np.exp(-1j * omega * m)
    return terms.sum() / na


def window_correlate_rotated(y, c, start, omega):
    """Like ``window_correlate`` with the window de-rotated by ``omega``:
    (1/N) * sum_m y[start+m] * exp(-1j*omega*(start+m)) * conj(c[m])."""
    n = c.shape[0]
    m = np.arange(start, start + n)
    terms = y[start:start + n] * np.exp(-1j * omega * m) * np.conj(c)
    return terms.sum() / n


def add_modulated(out, seq, amp, omega, start):
    """In place: out[start+m] += amp * seq[m] * exp(1j*omega*(start+m))."""
    n = seq.shape[0]
    m = np.arange(start, start + n)
    out[start:start + n] += amp * seq * np.exp(1j * omega * m)


def derotate(y, omega):
    """Return y[m] * exp(-1j*omega*m) as a new array."""
    m = np.arange(y.shape[0])
    return y * np.exp(-1j * omega * m)
