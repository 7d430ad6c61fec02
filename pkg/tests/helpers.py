"""Shared test oracles: high-precision gamma evaluation and generic bisection."""

from __future__ import annotations

import mpmath as mp


def oracle_K(n: int, beta: float, dps: int = 50) -> float:
    """50-digit evaluation of the limit-law constant K_n.

    Independent of the library path: direct mpmath gamma products instead of
    summed double-precision log-gammas.
    """
    with mp.workdps(dps):
        b = mp.mpf(beta)
        num = mp.mpf(2) ** ((b + mp.mpf(1) / 2) * n + mp.mpf(1) / 2) * mp.gamma(b + 2) ** n
        den = (
            mp.pi ** (mp.mpf(n - 1) / 2)
            * mp.factorial(n)
            * mp.gamma((b + mp.mpf(3) / 2) * n + mp.mpf(1) / 2)
        )
        return float(num / den)


def bisect_inverse(f, target: float, lo: float, hi: float, iters: int = 200) -> float:
    """Solve f(x) = target for monotone f on [lo, hi] by plain bisection."""
    flo = f(lo)
    fhi = f(hi)
    if not (min(flo, fhi) <= target <= max(flo, fhi)):
        raise ValueError("target not bracketed")
    increasing = fhi >= flo
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if (f(mid) < target) == increasing:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)
