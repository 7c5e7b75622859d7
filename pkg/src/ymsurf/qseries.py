"""Theta, Euler phi and Bessel-type series with certified truncation bounds.

Every routine returns a :class:`SeriesValue` whose ``tail_bound`` bounds the
distance between ``value`` and the exact sum, including a small allowance for
floating point rounding.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .weights import Family

_EPS = 2.0 ** -52


@dataclass(frozen=True)
class SeriesValue:
    value: float
    tail_bound: float

    @property
    def lower(self) -> float:
        return self.value - self.tail_bound

    @property
    def upper(self) -> float:
        return self.value + self.tail_bound

    def __float__(self):
        return float(self.value)


def q_of_area(T: float) -> float:
    """Nome ``q_T = exp(-T/2)`` attached to a surface of total area ``T``."""
    if not T > 0:
        raise ValueError(f"area must be positive, got {T!r}")
    return math.exp(-0.5 * T)


def _check_q(q):
    if not 0.0 <= q < 1.0:
        raise ValueError(f"q must lie in [0, 1), got {q!r}")


def jacobi_theta(q: float, tol: float = 1e-15) -> SeriesValue:
    """``theta(q) = sum_{n in Z} q^(n^2) = 1 + 2 sum_{n>=1} q^(n^2)``.

    After the term ``n = N`` the remaining terms have ratios at most
    ``q^(2N+3)``, so the tail is below ``2 q^((N+1)^2) / (1 - q^(2N+3))``.

    Examples
    --------
    >>> round(jacobi_theta(0.1).value, 10)
    1.200200002
    """
    _check_q(q)
    if q == 0.0:
        return SeriesValue(1.0, 0.0)
    terms = [1.0]
    n = 0
    while True:
        n += 1
        terms.append(2.0 * q ** (n * n))
        tail = 2.0 * q ** ((n + 1) ** 2) / (1.0 - q ** (2 * n + 3))
        if tail <= 0.5 * tol or tail == 0.0:
            break
    value = math.fsum(terms)
    return SeriesValue(value, tail + 4 * _EPS * value)


def euler_phi(q: float, tol: float = 1e-15) -> SeriesValue:
    """``phi(q) = prod_{m>=1} (1 - q^m)``.

    The omitted factors satisfy
    ``0 <= -log prod_{m>M} (1 - q^m) <= q^(M+1) / ((1 - q)(1 - q^(M+1)))``,
    so the truncated product overshoots by at most ``phi_M * eps``.
    """
    _check_q(q)
    if q == 0.0:
        return SeriesValue(1.0, 0.0)
    log_phi = []
    M = 0
    while True:
        M += 1
        log_phi.append(math.log1p(-q ** M))
        eps = q ** (M + 1) / ((1.0 - q) * (1.0 - q ** (M + 1)))
        value = math.exp(math.fsum(log_phi))
        if value * eps <= 0.5 * tol or eps == 0.0:
            break
    return SeriesValue(value, value * eps + 4 * M * _EPS * value)


def bessel_j1_paper(x: float, tol: float = 1e-15) -> SeriesValue:
    """``sum_m (-1)^m / (m! (m+1)!) (x/2)^(2m)``, equal to ``2 J_1(x) / x``.

    This is normalised to 1 at ``x = 0``, which is the convention of the
    sphere master-field formula.  Once the terms decrease in modulus the
    series alternates, and the first omitted term bounds the error.
    """
    x = float(x)
    if not math.isfinite(x):
        raise ValueError("x must be finite")
    y = 0.25 * x * x
    t = 1.0
    terms = [t]
    m = 0
    while True:
        ratio = y / ((m + 1) * (m + 2))
        t_next = -t * ratio
        decreasing = ratio < 1.0
        if decreasing and abs(t_next) <= 0.5 * tol:
            break
        terms.append(t_next)
        t = t_next
        m += 1
    value = math.fsum(terms)
    rounding = 4 * (m + 1) * _EPS * max(abs(v) for v in terms)
    return SeriesValue(value, abs(t_next) + rounding)


def _interval_limit(family, g, T, tol):
    q = q_of_area(T)
    th = jacobi_theta(q, tol / 8)
    ph = euler_phi(q, tol / 8)
    t_lo, t_hi = th.lower, th.upper
    p_lo, p_hi = ph.lower, ph.upper
    if g >= 2:
        if family is Family.UNITARY_TILDE:
            return t_lo, t_hi
        return 1.0, 1.0
    if family is Family.UNITARY_TILDE:
        return t_lo / p_hi ** 2, t_hi / p_lo ** 2
    if family is Family.SPECIAL_UNITARY:
        return 1.0 / p_hi ** 2, 1.0 / p_lo ** 2
    if family in (Family.ODD_ORTHOGONAL, Family.SYMPLECTIC):
        return 1.0 / p_hi, 1.0 / p_lo
    f = (1.0 + q) / (1.0 - q) ** 2
    return f / p_hi, f / p_lo


def limit_table_value(family, g: int, T: float, tol: float = 1e-12) -> SeriesValue:
    """Large-rank limit of the genus ``g`` partition function, with its error bar.

    ============  ====================  ======
    family        g = 1                 g >= 2
    ============  ====================  ======
    U(r)          theta / phi^2         theta
    SU(r+1)       1 / phi^2             1
    B, C          1 / phi               1
    D             (1+q)/((1-q)^2 phi)   1
    ============  ====================  ======

    Here ``theta``, ``phi`` are evaluated at ``q = exp(-T/2)``.  The bound is
    obtained by interval arithmetic on the certified theta and phi values.

    Notes
    -----
    The D entry is reproduced as tabulated, but the character sums do not
    approach it. Weights ``(m, ..., m, +-m)`` have Casimir
    ``m^2/2 + m(r-1)/2``, so they drop out as ``r`` grows, and the D sums
    converge to ``1 / phi`` like B and C.
    """
    family = Family.parse(family)
    if int(g) != g or g < 1:
        raise ValueError("the large-rank limit is tabulated for genus g >= 1 only")
    lo, hi = _interval_limit(family, int(g), T, tol)
    mid = 0.5 * (lo + hi)
    return SeriesValue(mid, 0.5 * (hi - lo) * (1 + 4 * _EPS) + 4 * _EPS * mid)


def limit_table(family, g: int, T: float, tol: float = 1e-12) -> float:
    """Value of :func:`limit_table_value` as a plain float.

    Examples
    --------
    >>> round(limit_table("B", 1, 2.0), 4)
    1.9824
    >>> limit_table("C", 3, 5.0)
    1.0
    """
    return limit_table_value(family, g, T, tol).value


def shifted_theta(T: float, x: float = 0.0, phase: float = 0.0, tol: float = 1e-15) -> SeriesValue:
    """``sum_{k in Z} exp(-T (k + x)^2 / 2) exp(i k phase)``.

    With ``x = phase = 0`` this is ``theta(exp(-T/2))``.  The value is complex
    when ``phase`` is nonzero.  Terms are summed symmetrically around
    ``k = -x``; each side of the remainder is below
    ``exp(-T (K + 1/2)^2 / 2) / (1 - exp(-T (K + 1)))``.
    """
    if not T > 0:
        raise ValueError("T must be positive")
    c = -round(x)
    K = 1
    while True:
        side = math.exp(-0.5 * T * (K + 0.5) ** 2) / -math.expm1(-T * (K + 1))
        if 2 * side <= 0.5 * tol:
            break
        K += 1
    k = [c + j for j in range(-K, K + 1)]
    w = [math.exp(-0.5 * T * (kk + x) ** 2) for kk in k]
    if phase:
        re = math.fsum(wi * math.cos(kk * phase) for wi, kk in zip(w, k))
        im = math.fsum(wi * math.sin(kk * phase) for wi, kk in zip(w, k))
        value = complex(re, im)
    else:
        value = math.fsum(w)
    return SeriesValue(value, 2 * side + 4 * (2 * K + 1) * _EPS * max(w))
