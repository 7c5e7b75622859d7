"""Partition functions of two-dimensional Yang-Mills theory as character sums.

On a closed orientable surface of genus ``g`` and total area ``T``

    Z_{g,T} = sum_lambda exp(-T c_lambda / 2) d_lambda ** (2 - 2g),

and with one boundary component carrying holonomy class ``t``

    Z_{(g,1),T}(t) = sum_lambda exp(-T c_lambda / 2) d_lambda ** (1 - 2g) chi_lambda(t).

For ``g >= 1`` every term is positive and at most ``exp(-T c/2)``, so the
truncated sums come with certified tail bounds (see :mod:`ymsurf._bounds`).
The reported value is a lower bound and the exact sum lies in
``[value, value + tail_bound]``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import zeta as hurwitz_zeta

from . import _bounds
from ._bounds import TruncationError
from .charcalc import ConjugacyClass, character_sum
from .qseries import limit_table_value, shifted_theta
from .weights import (
    Family, GroupDescriptor, casimir_array, dimension_exponents, log_dim_array, make_group,
    stratum_array,
)

__all__ = [
    "TruncationPolicy", "PartitionValue", "TruncationError", "partition_function",
    "partition_boundary", "witten_zeta", "dk_free_energy_weak", "limit_gap",
]

TAIL_MODES = ("auto", "rigorous-g1", "rigorous-g2plus", "heuristic-sphere")


@dataclass(frozen=True)
class TruncationPolicy:
    """How far to sum.

    ``max_size`` caps the weight size (``None`` means the internal cap);
    ``tol`` is the target tail bound.  ``tail_mode="auto"`` picks the
    rigorous bound for ``g >= 1`` and the heuristic stopping rule on the sphere.
    """

    max_size: int | None = None
    tol: float = 1e-10
    tail_mode: str = "auto"

    def __post_init__(self):
        if self.tail_mode not in TAIL_MODES:
            raise ValueError(f"tail_mode must be one of {TAIL_MODES}")
        if not self.tol > 0:
            raise ValueError("tol must be positive")

    def resolve(self, g: int) -> str:
        mode = self.tail_mode
        if mode == "auto":
            return "heuristic-sphere" if g == 0 else ("rigorous-g1" if g == 1 else "rigorous-g2plus")
        if g == 0 and mode != "heuristic-sphere":
            raise ValueError("the sphere (g = 0) only supports tail_mode='heuristic-sphere'")
        if g >= 1 and mode == "heuristic-sphere":
            raise ValueError("heuristic-sphere mode is reserved for g = 0")
        if g == 1 and mode == "rigorous-g2plus":
            raise ValueError("rigorous-g2plus needs g >= 2")
        return mode


@dataclass(frozen=True)
class PartitionValue:
    value: float
    tail_bound: float
    terms_used: int
    heuristic: bool = False

    def __float__(self):
        return float(self.value)


_DEFAULT = TruncationPolicy()
_SPHERE_MAX = 400
_ZETA_MAX_ENTRIES = 20_000_000
_MAX_ENUMERATED = 2_000_000


def _check_area(T):
    if not T > 0:
        raise ValueError(f"area must be positive, got {T!r}")


def _check_genus(g):
    if int(g) != g or g < 0:
        raise ValueError(f"genus must be a non-negative integer, got {g!r}")
    return int(g)


# ---------------------------------------------------------------------------
# closed surfaces

def _genus_one(group, T, policy):
    """Torus sums through the exact per-size recursion; no weights are enumerated."""
    f = group.family
    if f is Family.UNITARY_TILDE:
        r = group.rank
        if r == 1:
            v = shifted_theta(T, 0.0, 0.0, policy.tol)
            return PartitionValue(v.value, v.tail_bound, 1)
        sub = make_group(Family.SPECIAL_UNITARY, r - 1)
        th = shifted_theta(T, 0.0, 0.0, 1e-16).upper
        M, tail = _bounds.pick_cutoff(sub, T, 0.0, policy.tol / th, policy.max_size)
        la, lb = _bounds.su_pair_log_sums(sub, T, M)
        ca, cb = _bounds.su_pair_log_sums(sub, 0.0, M)
        total, count = [], 0.0
        for a in range(M + 1):
            for b in range(M + 1 - a):
                if np.isneginf(la[a]) or np.isneginf(lb[b]):
                    continue
                x = (a - b) / r
                w = math.exp(la[a] + lb[b] + T * x * x / 2.0)
                total.append(w * shifted_theta(T, x, 0.0, 1e-17).value)
                count += math.exp(ca[a] + cb[b])
        return PartitionValue(math.fsum(total), tail * th + 1e-15, int(round(count)))
    M, tail = _bounds.pick_cutoff(group, T, 0.0, policy.tol, policy.max_size)
    S = np.exp(_bounds.log_size_sums(group, T, M))
    counts = np.exp(_bounds.log_size_sums(group, 0.0, M))
    value = math.fsum(S)
    return PartitionValue(value, tail + 4e-16 * value * (M + 1), int(round(counts.sum())))


def _check_enumeration(group, M):
    count = float(np.exp(_bounds.log_size_sums(group, 0.0, M)).sum())
    if count > _MAX_ENUMERATED:
        raise TruncationError(
            f"{group}: the requested tolerance needs {count:.3g} weights up to size {M}; "
            "loosen tol or raise the area")


def _enumerated(group, T, power, M, weight_fn=None):
    """``sum_{size <= M} exp(-T c/2) d**power (* weight_fn(rows))`` by explicit enumeration."""
    _check_enumeration(group, M)
    parts, used = [], 0
    for m in range(M + 1):
        rows = stratum_array(group, m)
        logt = -0.5 * T * casimir_array(group, rows) + power * log_dim_array(group, rows)
        t = np.exp(logt)
        if weight_fn is not None:
            t = t * weight_fn(rows)
        parts.append(math.fsum(t))
        used += len(rows)
    return parts, used


def _theta_weights(group, T):
    r = group.rank

    def fn(rows):
        x = rows.sum(axis=1) / r
        return np.array([shifted_theta(T, xi, 0.0, 1e-17).value for xi in x])
    return fn


def _higher_genus(group, g, T, policy):
    power = 2.0 - 2.0 * g
    if group.family is Family.UNITARY_TILDE:
        if group.rank == 1:
            v = shifted_theta(T, 0.0, 0.0, policy.tol)
            return PartitionValue(v.value, v.tail_bound, 1)
        sub = make_group(Family.SPECIAL_UNITARY, group.rank - 1)
        th = shifted_theta(T, 0.0, 0.0, 1e-16).upper
        M, tail = _bounds.pick_cutoff(sub, T, power, policy.tol / th, policy.max_size)
        parts, used = _enumerated(sub, T, power, M, _theta_weights(group, T))
        return PartitionValue(math.fsum(parts), tail * th + 1e-15, used)
    M, tail = _bounds.pick_cutoff(group, T, power, policy.tol, policy.max_size)
    parts, used = _enumerated(group, T, power, M)
    value = math.fsum(parts)
    return PartitionValue(value, tail + 4e-16 * value, used)


def _unitary_sphere_log(N, T):
    """``log Z_{0,T}`` for U(N) from the discrete orthogonal-polynomial ensemble.

    With ``l = lambda + rho`` (entries in ``Z + (N+1)/2``) the Casimir is
    ``(|l|^2 - |rho|^2) / N`` and ``d = Vandermonde(l) / Vandermonde(rho)``,
    so the sphere sum is a discrete Gaussian Vandermonde-squared integral.
    It equals the product of the squared norms of the monic orthogonal
    polynomials of the weight ``exp(-T x^2 / (2N))`` on ``Z + (N+1)/2``,
    computed here by the Stieltjes procedure.
    """
    eps = 0.5 * ((N + 1) % 2)
    # support wide enough that the polynomial-weighted tail is negligible
    X = math.sqrt(2.0 * N / T * (40.0 + 2 * N * math.log(N + 2.0))) + N + 2
    x = np.arange(-math.ceil(X), math.ceil(X) + 1) + eps
    w = np.exp(-T * x * x / (2.0 * N))
    log_h = []
    q_prev = np.zeros_like(x)
    h0 = w.sum()
    q = np.full_like(x, 1.0 / math.sqrt(h0))
    log_h.append(math.log(h0))
    beta = 0.0
    for _ in range(1, N):
        alpha = float(np.sum(x * q * q * w))
        v = (x - alpha) * q - beta * q_prev
        beta = math.sqrt(float(np.sum(v * v * w)))
        q_prev, q = q, v / beta
        log_h.append(log_h[-1] + 2.0 * math.log(beta))
    rho = np.array([(N + 1 - 2 * i) / 2.0 for i in range(1, N + 1)])
    log_vdm_rho = sum(math.lgamma(k + 1) for k in range(1, N))
    return T * float(rho @ rho) / (2.0 * N) - 2.0 * log_vdm_rho + math.fsum(log_h)


def _sphere(group, T, policy):
    if group.family is Family.UNITARY_TILDE:
        logz = _unitary_sphere_log(group.rank, T)
        return PartitionValue(math.exp(logz), 1e-12 * math.exp(logz), 0)
    cap = policy.max_size if policy.max_size is not None else _SPHERE_MAX
    parts, used, peak = [], 0, 0.0
    for m in range(cap + 1):
        p, u = _enumerated_stratum(group, T, m)
        parts.append(p)
        used += u
        peak = max(peak, p)
        value = math.fsum(parts)
        if m >= 2 and p < parts[-2] and p < policy.tol * value:
            return PartitionValue(value, p, used, heuristic=True)
    raise TruncationError(f"{group}: sphere sum not settled at size {cap}")


def _enumerated_stratum(group, T, m):
    rows = stratum_array(group, m)
    t = np.exp(-0.5 * T * casimir_array(group, rows) + 2.0 * log_dim_array(group, rows))
    return math.fsum(t), len(rows)


def log_sphere_partition_unitary(N: int, T: float) -> float:
    """``log Z_{0,T}`` for U(N), usable for ``N`` large enough that ``Z`` overflows."""
    _check_area(T)
    return _unitary_sphere_log(int(N), float(T))


def partition_function(group: GroupDescriptor, g: int, T: float,
                       policy: TruncationPolicy | None = None) -> PartitionValue:
    """Partition function of the closed genus ``g`` surface of area ``T``.

    For ``g >= 1`` the value is certified: the exact sum lies in
    ``[value, value + tail_bound]``.  On the sphere the sum is stopped once a
    size stratum falls below ``tol`` times the running value, and the result
    is flagged ``heuristic``; for U(N) the sphere is computed through a
    discrete orthogonal-polynomial ensemble instead.

    Examples
    --------
    >>> round(partition_function(make_group("Atilde", 1), 1, 2.0).value, 12)
    1.772637204827
    """
    g = _check_genus(g)
    _check_area(T)
    policy = policy or _DEFAULT
    policy.resolve(g)
    if g == 0:
        return _sphere(group, T, policy)
    if g == 1:
        return _genus_one(group, T, policy)
    return _higher_genus(group, g, T, policy)


def partition_boundary(group: GroupDescriptor, g: int, T: float, cls: ConjugacyClass,
                       tol: float = 1e-10, max_size: int | None = None, with_bound: bool = False):
    """Partition function of a genus ``g`` surface with one boundary of holonomy class ``cls``.

    Returns a complex number, or ``(value, tail_bound)`` with ``with_bound``.
    At the identity class it equals ``Z_{g,T}``, its maximum modulus.
    """
    g = _check_genus(g)
    if g < 1:
        raise ValueError("boundary partition functions are provided for g >= 1")
    _check_area(T)
    val, tail, _ = character_sum(group, T, 1.0 - 2.0 * g, cls, tol, max_size)
    return (val, tail) if with_bound else val


# ---------------------------------------------------------------------------
# Witten zeta function

def _label_factor_sums(group, s, w):
    """Upper bound factors ``sum_a (a+1)^(-s w_k)`` per Dynkin label."""
    out = []
    r = len(w)
    for k, wk in enumerate(w):
        sig = s * wk
        if not sig > 1:
            raise ValueError(f"{group}: zeta bound diverges at s={s} (label exponent {sig:.3g} <= 1)")
        if group.family is Family.ODD_ORTHOGONAL and k == r - 1:
            out.append((1.0 - 2.0 ** -sig) * float(hurwitz_zeta(sig, 1.0)))
        else:
            out.append(float(hurwitz_zeta(sig, 1.0)))
    return out


def _labels_to_rows(group, labels):
    """Vectorised inverse of the Dynkin map; also returns a validity mask."""
    f, r = group.family, group.rank
    a = np.asarray(labels, dtype=np.int64)
    valid = np.ones(len(a), dtype=bool)
    if f is Family.SPECIAL_UNITARY:
        lam = np.cumsum(a[:, ::-1], axis=1)[:, ::-1]
        return np.hstack([lam, np.zeros((len(a), 1), dtype=np.int64)]), valid
    lam = np.zeros_like(a)
    if f is Family.ODD_ORTHOGONAL:
        valid = a[:, -1] % 2 == 0
        lam[:, -1] = a[:, -1] // 2
        start = r - 2
    elif f is Family.SYMPLECTIC:
        lam[:, -1] = a[:, -1]
        start = r - 2
    else:
        ssum = a[:, -2] + a[:, -1]
        valid = ssum % 2 == 0
        lam[:, -2] = ssum // 2
        lam[:, -1] = (a[:, -1] - a[:, -2]) // 2
        start = r - 3
    for i in range(start, -1, -1):
        lam[:, i] = lam[:, i + 1] + a[:, i]
    return lam, valid


def _region(group, w, log_dstar):
    """All label vectors with ``sum_k w_k log(a_k + 1) <= log_dstar``, as an array."""
    r = len(w)
    step_last = 2 if group.family is Family.ODD_ORTHOGONAL else 1
    chunks = []
    prefix = [0] * (r - 1)
    count = [0]

    def rec(k, budget):
        if k == r - 1:
            amax = int(math.floor(math.exp(budget / w[k]) - 1 + 1e-9))
            last = np.arange(0, amax + 1, step_last, dtype=np.int64)
            block = np.empty((len(last), r), dtype=np.int64)
            block[:, : r - 1] = prefix
            block[:, r - 1] = last
            chunks.append(block)
            count[0] += len(last)
            if count[0] * r > _ZETA_MAX_ENTRIES:
                raise TruncationError(f"{group}: zeta region exceeds {_ZETA_MAX_ENTRIES // r} weights")
            return
        a = 0
        while True:
            cost = w[k] * math.log(a + 1)
            if cost > budget + 1e-12:
                break
            prefix[k] = a
            rec(k + 1, budget - cost)
            a += 1
        prefix[k] = 0

    rec(0, log_dstar)
    return np.vstack(chunks)


def witten_zeta(group: GroupDescriptor, s: float, policy: TruncationPolicy | None = None) -> PartitionValue:
    """Witten zeta function ``sum_lambda d_lambda ** (-s)``.

    Writing ``a_k`` for the Dynkin labels of ``lambda``, the Weyl product
    satisfies ``d_lambda >= B(a) = prod_k (a_k + 1) ** w_k`` (AM-GM on each
    root factor).  Weights with ``B(a) <= D`` are summed exactly; the rest
    contribute at most ``prod_k zeta(s w_k) - sum_{B(a) <= D} B(a) ** (-s)``.
    ``D`` grows until that remainder is below ``policy.tol``.  The exact sum
    lies in ``[value, value + tail_bound]``.

    Examples
    --------
    >>> v = witten_zeta(make_group("A", 1), 2.0, TruncationPolicy(tol=1e-6))
    >>> abs(v.value - math.pi ** 2 / 6) < 1e-6
    True
    """
    if not s > 1:
        raise ValueError(f"s must exceed 1, got {s!r}")
    if group.family is Family.UNITARY_TILDE:
        raise ValueError("U(r) has infinitely many one-dimensional representations; its zeta function diverges")
    if group.family is Family.EVEN_ORTHOGONAL and group.rank == 1:
        raise ValueError("SO(2) has only one-dimensional representations; its zeta function diverges")
    policy = policy or _DEFAULT
    w = [float(x) for x in dimension_exponents(group)]
    total_bound = math.prod(_label_factor_sums(group, s, w))
    log_dstar = math.log(8.0)
    while True:
        labels = _region(group, w, log_dstar)
        logb = np.log(labels + 1.0) @ np.asarray(w)
        inside = math.fsum(np.exp(-s * logb))
        tail = max(total_bound - inside, 0.0) + 1e-15 * total_bound
        if tail <= policy.tol:
            break
        if policy.max_size is not None and len(labels) > policy.max_size:
            raise TruncationError(f"{group}: zeta tail {tail:.3g} above tol with {len(labels)} labels")
        log_dstar += math.log(2.0)
        if log_dstar > 60:
            raise TruncationError(f"{group}: zeta tail did not reach tol {policy.tol:g}")
    rows, valid = _labels_to_rows(group, labels)
    rows = rows[valid]
    value = math.fsum(np.exp(-s * log_dim_array(group, rows)))
    return PartitionValue(value, tail, int(len(rows)))


# ---------------------------------------------------------------------------
# large-rank diagnostics

def dk_free_energy_weak(T: float) -> float:
    """Weak-phase sphere free energy ``T/24 + 3/4 - log(T)/2`` for ``0 < T <= pi^2``.

    Examples
    --------
    >>> round(dk_free_energy_weak(math.pi ** 2), 6)
    0.016504
    """
    if not 0 < T <= math.pi ** 2:
        raise ValueError("the closed form holds only in the weak phase 0 < T <= pi^2")
    return T / 24.0 + 0.75 - 0.5 * math.log(T)


def limit_gap(family, g: int, T: float, r: int, tol: float = 1e-10, with_bound: bool = False):
    """Distance between the rank ``r`` partition function and its large-rank limit.

    With ``with_bound=True`` returns ``(gap, error)`` where ``error`` sums the
    truncation bounds of both sides.
    """
    fam = Family.parse(family)
    if int(g) != g or g < 1:
        raise ValueError("limit_gap needs g >= 1")
    z = partition_function(make_group(fam, r), int(g), T, TruncationPolicy(tol=tol))
    lim = limit_table_value(fam, int(g), T, tol)
    mid = z.value + 0.5 * z.tail_bound
    gap = abs(mid - lim.value)
    err = 0.5 * z.tail_bound + lim.tail_bound
    return (gap, err) if with_bound else gap
