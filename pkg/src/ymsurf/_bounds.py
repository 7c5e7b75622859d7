"""Size-stratified Boltzmann sums and rigorous tail bounds.

For a family other than U(r), write ``S_T(m) = sum_{size(lambda) = m} exp(-T c_lambda / 2)``.
The Casimir is a sum of one-row terms ``x (x + s_i) / n`` over the parts of a
partition (or of a pair of partitions for SU(N)), so ``S_T`` is computed
exactly by a transfer-matrix recursion over rows, without enumerating weights.

Beyond the last computed size the remainder is bounded by a geometric series
on a concave majorant of ``log S_T(m)``, built from

* ``p(m) <= exp(pi sqrt(2m/3))``,
* the Chebyshev sum inequality ``sum lambda_i s_i >= (|lambda| / l) sum_{i<=l} s_i``,
* ``d_lambda <= (1 + 2 m |kappa|_inf / |Phi+|) ** |Phi+|`` with
  ``kappa = sum_alpha alpha / <2 rho, alpha>`` (AM-GM on the Weyl product),
* for negative powers, the Dynkin-label lower bound of :func:`log_dim_min`.
"""
from __future__ import annotations

import functools
import math

import numpy as np
from scipy.special import logsumexp

from .weights import Family, GroupDescriptor, dimension_exponents

_MAX_SIZE_DP = 2048


class TruncationError(ArithmeticError):
    """The requested tail bound cannot be certified within the size cap."""


def _row_shifts(group: GroupDescriptor):
    """Shift vectors of the row recursion: one tuple per independent partition."""
    f, r = group.family, group.rank
    if f is Family.UNITARY_TILDE:
        raise ValueError("U(r) sums are reduced to SU(r) by the caller")
    if f is Family.SPECIAL_UNITARY:
        N = r + 1
        la, lb = N // 2, (N + 1) // 2 - 1
        s = [N + 1 - 2 * i for i in range(1, N + 1)]
        return tuple(s[:la]), tuple(s[:lb])
    return (tuple(group.rho2),)


def _dp_log_sums(shifts, n, T, M):
    """``log sum exp(-T sum_i x_i (x_i + s_i) / (2n))`` over partitions of each size ``m <= M``.

    Partitions have at most ``len(shifts)`` parts.  Returned as logs, ``-inf``
    for empty strata.
    """
    out = np.full(M + 1, -np.inf)
    out[0] = 0.0
    # rows below the M-th can only hold zeros
    shifts = tuple(shifts)[: M]
    if not shifts:
        return out
    x = np.arange(M + 1, dtype=float)
    # G[x, m]: rows i..end with lambda_i = x and total m, kept as plain floats
    # after subtracting a per-row log scale to avoid overflow
    G = None
    for s in reversed(shifts):
        logw = -T * x * (x + s) / (2.0 * n)
        shift = float(np.max(logw))
        w = np.exp(logw - shift)
        Gn = np.zeros((M + 1, M + 1))
        if G is None:
            Gn[np.arange(M + 1), np.arange(M + 1)] = w
            scale = shift
        else:
            C = np.cumsum(G, axis=0)
            for xi in range(M + 1):
                Gn[xi, xi:] = w[xi] * C[xi, : M + 1 - xi]
            scale += shift
        G = Gn
        # renormalise the whole table, keep track of the log scale
        top = G.max()
        if top > 0:
            G /= top
            scale += math.log(top)
    with np.errstate(divide="ignore"):
        return np.log(G.sum(axis=0)) + scale


@functools.lru_cache(maxsize=128)
def _log_size_sums_cached(group, T, M):
    f = group.family
    if f is Family.SPECIAL_UNITARY:
        N = group.matrix_size
        sa, sb = _row_shifts(group)
        la = _dp_log_sums(sa, N, T, M)
        lb = _dp_log_sums(sb, N, T, M)
        a = np.arange(M + 1)
        L = la[:, None] + lb[None, :] + T * (a[:, None] - a[None, :]) ** 2 / (2.0 * N * N)
        out = np.full(M + 1, -np.inf)
        for m in range(M + 1):
            idx = np.arange(m + 1)
            out[m] = logsumexp(L[idx, m - idx])
        return out
    (s,) = _row_shifts(group)
    n = group.matrix_size
    full = _dp_log_sums(s, n, T, M)
    if f is Family.EVEN_ORTHOGONAL:
        short = _dp_log_sums(s[:-1], n, T, M) if len(s) <= M else full
        # weights with a nonzero last part come with both signs
        with np.errstate(invalid="ignore"):
            out = full + np.log(np.maximum(2.0 - np.exp(short - full), 1.0))
        out[np.isneginf(full)] = -np.inf
        return out
    return full


def log_size_sums(group: GroupDescriptor, T: float, M: int) -> np.ndarray:
    """``log S_T(m)`` for ``m = 0..M`` (exact up to rounding)."""
    arr = _log_size_sums_cached(group, float(T), int(M)).copy()
    return arr


@functools.lru_cache(maxsize=64)
def _dim_growth(group):
    """``(|Phi+|, |kappa|_inf)`` for the dimension majorant."""
    roots = group.positive_roots
    if roots.shape[0] == 0:
        return 0, 0.0
    rho2 = np.asarray(group.rho2, dtype=float)
    kappa = (roots / (roots @ rho2)[:, None]).sum(axis=0)
    return roots.shape[0], float(np.abs(kappa).max())


def log_dim_max(group: GroupDescriptor, m) -> np.ndarray:
    """Upper bound on ``log d_lambda`` over weights of size ``m``."""
    npos, kap = _dim_growth(group)
    m = np.asarray(m, dtype=float)
    if npos == 0:
        return np.zeros_like(m)
    return npos * np.log1p(2.0 * m * kap / npos)


def log_dim_min_nontrivial(group: GroupDescriptor) -> float:
    if group.positive_roots.shape[0] == 0:
        return 0.0
    return float(dimension_exponents(group).min()) * math.log(2.0)


@functools.lru_cache(maxsize=64)
def _label_size_weights(group):
    """``c_k`` with ``size(lambda) <= sum_k c_k a_k`` in terms of the Dynkin labels."""
    f, r = group.family, group.rank
    k = np.arange(1, r + 1, dtype=float)
    if f is Family.SPECIAL_UNITARY:
        N = r + 1
        return np.minimum(k, N - k)
    c = k.copy()
    if f is Family.ODD_ORTHOGONAL:
        c[-1] = r / 2.0
    elif f is Family.EVEN_ORTHOGONAL and r >= 2:
        c[-2:] = r / 2.0
    return c


def log_dim_min(group: GroupDescriptor, m) -> np.ndarray:
    """Lower bound on ``log d_lambda`` over nontrivial weights of size ``m``.

    With Dynkin labels ``a_k`` the size is at most ``sum_k c_k a_k`` and
    ``log d >= sum_k w_k log(a_k + 1)``.  The right side is concave in ``a``,
    so on ``sum_k c_k a_k >= m`` it is smallest at a vertex, giving
    ``min_k w_k log(1 + m / c_k)``.
    """
    m = np.asarray(m, dtype=float)
    if group.positive_roots.shape[0] == 0:
        return np.zeros_like(m)
    w = dimension_exponents(group)
    c = _label_size_weights(group)
    vertex = (w[None, :] * np.log1p(m[..., None] / c[None, :]).reshape(-1, len(c))).min(axis=1)
    vertex = vertex.reshape(m.shape)
    return np.where(m > 0, np.maximum(vertex, log_dim_min_nontrivial(group)), 0.0)


def _log_dim_factor(group, m, power, sharp=True):
    """Majorant of ``log d**power`` at size ``m``; ``sharp=False`` keeps it concave in ``m``."""
    m = np.asarray(m, dtype=float)
    if power > 0:
        return power * log_dim_max(group, m)
    if power < 0:
        if sharp:
            return power * log_dim_min(group, m)
        return np.where(m > 0, power * log_dim_min_nontrivial(group), 0.0)
    return np.zeros_like(m)


def _coarse_log_term(group, T, power, m):
    """Concave majorant of ``log(S_T(m) * dmax(m)**power)``."""
    m = np.asarray(m, dtype=float)
    f, r, n = group.family, group.rank, group.matrix_size
    if f is Family.SPECIAL_UNITARY:
        N = n
        logN = np.log1p(m) + math.pi * np.sqrt(4.0 * m / 3.0)
        cmin = m * m / (2.0 * N * N) + m / 2.0
    else:
        logN = math.pi * np.sqrt(2.0 * m / 3.0)
        if f is Family.EVEN_ORTHOGONAL:
            logN = logN + math.log(2.0)
        s = np.asarray(group.rho2, dtype=float)
        cmin = (m * m / r + m * s.mean()) / n
    return logN + _log_dim_factor(group, m, power, sharp=False) - 0.5 * T * cmin


def _coarse_remainder(group, T, power, M2):
    """Bound on ``sum_{m > M2}`` of the concave majorant; ``inf`` if not yet decreasing."""
    f1, f2 = _coarse_log_term(group, T, power, [M2 + 1, M2 + 2])
    delta = f2 - f1
    if not delta < 0:
        return math.inf
    return math.exp(f1) / -math.expm1(delta)


@functools.lru_cache(maxsize=256)
def tail_profile(group: GroupDescriptor, T: float, power: float, tol: float):
    """Per-size majorants ``b[m]`` and a remainder ``R`` past ``len(b) - 1``.

    ``sum_{size(lambda) > M} exp(-T c / 2) d**power <= b[M+1:].sum() + R``.
    The table is extended until ``R <= tol / 100``.
    """
    M2 = 32
    while True:
        R = _coarse_remainder(group, T, power, M2)
        if R <= tol * 1e-2 or M2 >= _MAX_SIZE_DP:
            break
        M2 *= 2
    logS = log_size_sums(group, T, M2)
    m = np.arange(M2 + 1)
    b = np.exp(logS + _log_dim_factor(group, m, power))
    b = b * (1 + 1e-12)
    b.setflags(write=False)
    return b, R


def size_tail(group: GroupDescriptor, T: float, power: float, M: int, tol: float = 1e-12) -> float:
    """Rigorous bound on ``sum_{size > M} exp(-T c/2) d**power``."""
    b, R = tail_profile(group, float(T), float(power), float(tol))
    if M + 1 >= len(b):
        return _coarse_remainder(group, T, power, M)
    return float(b[M + 1:].sum() + R)


def pick_cutoff(group: GroupDescriptor, T: float, power: float, tol: float, max_size: int | None = None):
    """Smallest size cutoff whose certified tail is at most ``tol``.

    Returns ``(M, tail)``; raises :class:`TruncationError` if ``max_size`` is
    too small or the bound cannot be certified at all.
    """
    b, R = tail_profile(group, float(T), float(power), float(tol))
    suffix = np.concatenate([np.cumsum(b[::-1])[::-1][1:], [0.0]]) + R
    ok = np.nonzero(suffix <= tol)[0]
    if ok.size == 0:
        raise TruncationError(
            f"{group}: tail bound {suffix[-1]:.3g} above tol {tol:g} even at size {len(b) - 1}")
    M = int(ok[0])
    if max_size is not None and M > max_size:
        raise TruncationError(
            f"{group}: certifying tol {tol:g} needs max_size >= {M}, got {max_size}")
    return M, float(suffix[M])


def su_pair_log_sums(group: GroupDescriptor, T: float, M: int):
    """Per-size log sums for the two partitions of the SU(N) pair form, without the coupling factor."""
    N = group.matrix_size
    sa, sb = _row_shifts(group)
    return _dp_log_sums(sa, N, T, M), _dp_log_sums(sb, N, T, M)
