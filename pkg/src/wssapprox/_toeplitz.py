"""Order recursion for symmetric Toeplitz (Yule-Walker) systems."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass
class DurbinTrace:
    coeffs: list  # coeffs[m-1] holds b_{1..m, m}
    sigma2: np.ndarray  # sigma2[m] for m = 0..reached
    reflection: np.ndarray  # kappa_1..kappa_reached
    stopped_at: int | None  # first order whose sigma2 fell below the floor


def durbin(r: np.ndarray, order: int, floor: float) -> DurbinTrace:
    """Run the Levinson-Durbin recursion on lags ``r[0..order]``.

    Stops at the first order m with ``sigma2[m] < floor``; that order is still
    recorded so callers can inspect how far below the floor it landed.
    """
    r = np.asarray(r, dtype=float)
    b = np.zeros(0)
    sigma2 = [float(r[0])]
    kappas = []
    coeffs = []
    for m in range(1, order + 1):
        acc = r[m] - b @ r[m - 1:0:-1]
        k = acc / sigma2[-1]
        b = np.concatenate([b - k * b[::-1], [k]])
        s = sigma2[-1] * (1.0 - k * k)
        kappas.append(k)
        coeffs.append(b)
        sigma2.append(s)
        if s < floor:
            return DurbinTrace(coeffs, np.array(sigma2), np.array(kappas), m)
    return DurbinTrace(coeffs, np.array(sigma2), np.array(kappas), None)
