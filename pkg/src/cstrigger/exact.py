"""Exact inference on 2x2 contingency tables.

Fisher's exact test (two-sided, minimum-likelihood) and the relative
switching propensity, i.e. the relative risk of a nearby switch for shared
versus non-shared items.

Hypergeometric point probabilities are evaluated in log space with Loader's
saddle-point decomposition (``stirlerr``/``bd0``) instead of plain
log-factorial differences.  For N around 10**6 the log-factorials are about
1.3e7 in magnitude, so differencing them loses roughly nine digits; the
saddle-point form keeps every term small and the pmf accurate to near machine
precision, which the normalisation checks in the test-suite rely on.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .association import ContingencyTable

__all__ = [
    "ALPHA",
    "TIE_SLACK",
    "TestResult",
    "evaluate_table",
    "fisher_exact_log_p",
    "fisher_exact_two_sided",
    "log_hypergeometric_pmf",
    "log_hypergeometric_support",
    "relative_switching_propensity",
]

ALPHA = 0.05
TIE_SLACK = 1e-7

_LN_2PI = math.log(2.0 * math.pi)
_LN_SQRT_2PI = 0.5 * _LN_2PI

# stirlerr(n) = log(n!) - log(sqrt(2 pi n) (n/e)^n); tabulated for small n,
# asymptotic series above 15.
_STIRLERR_SMALL = [0.0] + [
    math.lgamma(n + 1.0) - (n + 0.5) * math.log(n) + n - _LN_SQRT_2PI
    for n in range(1, 16)
]
_S0 = 1.0 / 12
_S1 = 1.0 / 360
_S2 = 1.0 / 1260
_S3 = 1.0 / 1680
_S4 = 1.0 / 1188


def _stirlerr(n: float) -> float:
    if n <= 15:
        return _STIRLERR_SMALL[int(n)]
    nn = n * n
    if n > 500:
        return (_S0 - _S1 / nn) / n
    if n > 80:
        return (_S0 - (_S1 - _S2 / nn) / nn) / n
    if n > 35:
        return (_S0 - (_S1 - (_S2 - _S3 / nn) / nn) / nn) / n
    return (_S0 - (_S1 - (_S2 - (_S3 - _S4 / nn) / nn) / nn) / nn) / n


def _bd0(x: float, np_: float) -> float:
    # x log(x/np) + np - x, without cancellation when x is close to np
    if abs(x - np_) < 0.1 * (x + np_):
        v = (x - np_) / (x + np_)
        s = (x - np_) * v
        ej = 2.0 * x * v
        v *= v
        for j in range(1, 1000):
            ej *= v
            s1 = s + ej / (2 * j + 1)
            if s1 == s:
                return s1
            s = s1
    return x * math.log(x / np_) + np_ - x


def _log_dbinom(x: int, n: int, p: float, q: float) -> float:
    if p == 0.0:
        return 0.0 if x == 0 else -math.inf
    if q == 0.0:
        return 0.0 if x == n else -math.inf
    if x == 0:
        if n == 0:
            return 0.0
        return -_bd0(n, n * q) - n * p if p < 0.1 else n * math.log(q)
    if x == n:
        return -_bd0(n, n * p) - n * q if q < 0.1 else n * math.log(p)
    lc = _stirlerr(n) - _stirlerr(x) - _stirlerr(n - x) - _bd0(x, n * p) - _bd0(n - x, n * q)
    lf = _LN_2PI + math.log(x) + math.log1p(-x / n)
    return lc - 0.5 * lf


def _check_margins(row1: int, col1: int, n: int) -> None:
    if n < 0 or not (0 <= row1 <= n) or not (0 <= col1 <= n):
        raise ValueError(f"invalid margins (row1={row1}, col1={col1}, N={n})")


def log_hypergeometric_pmf(k: int, row1: int, col1: int, n: int) -> float:
    """Natural log of P(top-left cell = k) for a 2x2 table with fixed margins.

    ``row1`` and ``col1`` are the first row and first column totals, ``n`` the
    grand total.  Raises ``ValueError`` if ``k`` is outside the support
    ``max(0, row1 + col1 - n) <= k <= min(row1, col1)``.
    """
    _check_margins(row1, col1, n)
    lo, hi = max(0, row1 + col1 - n), min(row1, col1)
    if not lo <= k <= hi:
        raise ValueError(f"k={k} outside support [{lo}, {hi}]")
    if n == 0:
        return 0.0
    # k white balls among row1 drawn; col1 white, n - col1 black
    p = row1 / n
    q = (n - row1) / n
    return (
        _log_dbinom(k, col1, p, q)
        + _log_dbinom(row1 - k, n - col1, p, q)
        - _log_dbinom(row1, n, p, q)
    )


# -- vectorised variant, used to sweep the whole support ---------------------

def _stirlerr_vec(n: np.ndarray) -> np.ndarray:
    out = np.empty_like(n)
    small = n <= 15
    out[small] = np.asarray(_STIRLERR_SMALL)[n[small].astype(np.int64)]
    big = ~small
    nb = n[big]
    nn = nb * nb
    res = (_S0 - (_S1 - (_S2 - (_S3 - _S4 / nn) / nn) / nn) / nn) / nb
    res = np.where(nb > 35, (_S0 - (_S1 - (_S2 - _S3 / nn) / nn) / nn) / nb, res)
    res = np.where(nb > 80, (_S0 - (_S1 - _S2 / nn) / nn) / nb, res)
    res = np.where(nb > 500, (_S0 - _S1 / nn) / nb, res)
    out[big] = res
    return out


def _bd0_vec(x: np.ndarray, np_: np.ndarray) -> np.ndarray:
    near = np.abs(x - np_) < 0.1 * (x + np_)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = x * np.log(x / np_) + np_ - x
    if near.any():
        xs, ms = x[near], np_[near]
        v = (xs - ms) / (xs + ms)
        s = (xs - ms) * v
        ej = 2.0 * xs * v
        v2 = v * v
        # |v| < 1/10.5, so 16 terms are far below one ulp
        for j in range(1, 17):
            ej = ej * v2
            s = s + ej / (2 * j + 1)
        out[near] = s
    return out


def _log_dbinom_vec(x: np.ndarray, n: np.ndarray, p: float, q: float) -> np.ndarray:
    out = np.full(x.shape, -np.inf)
    if p == 0.0:
        out[x == 0] = 0.0
        return out
    if q == 0.0:
        out[x == n] = 0.0
        return out
    zero = x == 0
    full = (x == n) & ~zero
    mid = ~(zero | full)
    if zero.any():
        nz = n[zero]
        out[zero] = -_bd0_vec(nz, nz * q) - nz * p if p < 0.1 else nz * math.log(q)
    if full.any():
        nf = n[full]
        out[full] = -_bd0_vec(nf, nf * p) - nf * q if q < 0.1 else nf * math.log(p)
    if mid.any():
        xm, nm = x[mid], n[mid]
        lc = (
            _stirlerr_vec(nm) - _stirlerr_vec(xm) - _stirlerr_vec(nm - xm)
            - _bd0_vec(xm, nm * p) - _bd0_vec(nm - xm, nm * q)
        )
        lf = _LN_2PI + np.log(xm) + np.log1p(-xm / nm)
        out[mid] = lc - 0.5 * lf
    return out


def log_hypergeometric_support(row1: int, col1: int, n: int) -> tuple[int, np.ndarray]:
    """Log-pmf over the whole support; returns ``(lowest k, log-probabilities)``."""
    _check_margins(row1, col1, n)
    lo, hi = max(0, row1 + col1 - n), min(row1, col1)
    if n == 0:
        return 0, np.zeros(1)
    k = np.arange(lo, hi + 1, dtype=np.float64)
    p = row1 / n
    q = (n - row1) / n
    first = _log_dbinom_vec(k, np.full_like(k, col1), p, q)
    second = _log_dbinom_vec(row1 - k, np.full_like(k, n - col1), p, q)
    return lo, first + second - _log_dbinom(row1, n, p, q)


def fisher_exact_log_p(table: ContingencyTable) -> float:
    """Natural log of the two-sided Fisher p-value (never underflows)."""
    a, b, c, d = table.a, table.b, table.c, table.d
    if min(a, b, c, d) < 0:
        raise ValueError(f"negative cell in {table}")
    n = a + b + c + d
    row1, col1 = a + b, a + c
    if n == 0 or row1 in (0, n) or col1 in (0, n):
        return 0.0
    lo, logp = log_hypergeometric_support(row1, col1, n)
    observed = logp[a - lo]
    keep = logp[logp <= observed + math.log1p(TIE_SLACK)]
    top = keep.max()
    total = top + math.log(math.fsum(np.exp(keep - top).tolist()))
    return min(total, 0.0)


def fisher_exact_two_sided(table: ContingencyTable) -> float:
    """Two-sided Fisher exact p-value.

    Sums the probabilities of every table with the observed margins that is no
    more likely than the observed one (with a relative slack of ``TIE_SLACK``
    for floating-point ties).  Tables with a zero margin give 1.0.
    """
    return math.exp(fisher_exact_log_p(table))


def relative_switching_propensity(table: ContingencyTable) -> Optional[float]:
    """Near-switch rate of shared items divided by that of non-shared items.

    Returns ``None`` when either rate is undefined or the non-shared rate is
    zero, so callers never see a silent 0 or infinity.
    """
    a, b, c, d = table.a, table.b, table.c, table.d
    if a + c == 0 or b + d == 0 or b == 0:
        return None
    return (a / (a + c)) / (b / (b + d))


@dataclass(frozen=True)
class TestResult:
    table: ContingencyTable
    rsp: Optional[float]
    p_value: float
    shared_rate: Optional[float]
    nonshared_rate: Optional[float]

    __test__ = False  # not a pytest class

    def significant(self, alpha: float = ALPHA) -> bool:
        return self.p_value < alpha

    def to_dict(self) -> dict:
        return {
            **self.table.to_dict(),
            "shared_rate": self.shared_rate,
            "nonshared_rate": self.nonshared_rate,
            "rsp": self.rsp,
            "p_value": self.p_value,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "TestResult":
        return cls(
            table=ContingencyTable.from_dict(data),
            rsp=data["rsp"],
            p_value=data["p_value"],
            shared_rate=data["shared_rate"],
            nonshared_rate=data["nonshared_rate"],
        )


def evaluate_table(table: ContingencyTable) -> TestResult:
    a, b, c, d = table.a, table.b, table.c, table.d
    return TestResult(
        table=table,
        rsp=relative_switching_propensity(table),
        p_value=fisher_exact_two_sided(table),
        shared_rate=a / (a + c) if a + c else None,
        nonshared_rate=b / (b + d) if b + d else None,
    )
