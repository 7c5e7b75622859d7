"""Wilson loops: master-field closed forms, torus moments and holonomy densities.

``W_l = tr(h_l) = Tr(h_l) / n`` is the normalised trace of the holonomy
along a loop.  Large-rank limits of its moments are the master-field values
``mu_t(n)`` (plane) and ``mu_{t,T}(n)`` (sphere, weak phase).  On the torus
the moments of non-separating and commutator loops are finite character sums
organised by the Pieri rule of :mod:`ymsurf.charcalc`.

Negative powers: ``W_{l^-k}`` is the complex conjugate of ``W_{l^k}``, so the
routines below work with ``|k|`` where the result is real.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import _bounds
from .charcalc import ConjugacyClass, character_sum, pieri
from .partition import TruncationPolicy, partition_boundary, partition_function
from .qseries import bessel_j1_paper, shifted_theta
from .weights import (
    Family, GroupDescriptor, casimir_array, make_group, stratum_array, weyl_dim,
)

__all__ = [
    "LoopSpec", "mf_plane_power", "mf_sphere_power", "torus_moments", "commutator_moment",
    "nonsep_density", "sep_density", "disc_density_ratio", "loop_moment",
]

LOOP_KINDS = ("plane_simple_power", "sphere_simple_power", "torus_nonseparating_power", "torus_commutator")
_WEAK_PHASE = math.pi ** 2


# ---------------------------------------------------------------------------
# master field

def mf_plane_power(t: float, n: int) -> float:
    """Moment ``mu_t(n)`` of the free unitary Brownian motion at time ``t``.

    ``mu_t(n) = exp(-n t/2) / n * sum_{m<n} (-n t)^m / m! * C(n, m+1)``.
    The alternating sum is done in exact rational arithmetic on the binary
    value of ``t`` and rounded once, so large ``n t`` loses no precision.

    Examples
    --------
    >>> round(mf_plane_power(1.0, 1), 12) == round(math.exp(-0.5), 12)
    True
    >>> mf_plane_power(1.0, 2)
    0.0
    """
    n = int(n)
    if n == 0:
        raise ValueError("n must be nonzero")
    if not t >= 0:
        raise ValueError(f"t must be non-negative, got {t!r}")
    n = abs(n)
    x = -n * Fraction(t)
    term, total = Fraction(1), Fraction(0)
    for m in range(n):
        if m:
            term = term * x / m
        total += term * math.comb(n, m + 1)
    if total == 0:
        return 0.0
    try:
        return float(total / n) * math.exp(-0.5 * n * t)
    except OverflowError:
        # huge partial sums only occur with a tiny prefactor; combine in logs
        sign = 1.0 if total > 0 else -1.0
        log_abs = math.log(abs(total.numerator)) - math.log(total.denominator) - math.log(n)
        return sign * math.exp(log_abs - 0.5 * n * t)


def _sigma(t, T):
    return math.sqrt(t * (T - t) / T)


def mf_sphere_power(t: float, T: float, n: int) -> float:
    """Weak-phase sphere master field ``mu_{t,T}(n) = J(2 n sigma)``.

    ``sigma = sqrt(t (T - t) / T)`` and ``J(x) = sum_m (-1)^m (x/2)^(2m) / (m! (m+1)!)``,
    the Bessel series normalised to 1 at 0.  Only ``0 <= t <= T <= pi^2`` is
    accepted; the strong phase has a different expression.
    """
    n = int(n)
    if n == 0:
        raise ValueError("n must be nonzero")
    if not 0 <= t <= T:
        raise ValueError("need 0 <= t <= T")
    if not 0 < T <= _WEAK_PHASE:
        raise ValueError("the sphere formula is the weak-phase one; it needs 0 < T <= pi^2")
    return bessel_j1_paper(2 * abs(n) * _sigma(t, T)).value


# ---------------------------------------------------------------------------
# truncated sums over weights

def _weighted_rows(group, T, power, tol, max_size=None):
    """Dominant weights with Boltzmann factors, truncated with a certified tail.

    Yields ``(weights, boltzmann)`` per size stratum, where for U(r) each row
    stands for the whole determinant orbit and ``boltzmann`` already includes
    the theta sum over it.  Returns ``tail`` through the final ``StopIteration``
    value; ``tail`` bounds the omitted ``sum exp(-T c/2) d**power``.
    """
    if group.family is Family.UNITARY_TILDE:
        r = group.rank
        if r == 1:
            th = shifted_theta(T, 0.0, 0.0, tol * 1e-2)
            yield [(0,)], np.array([th.value])
            return th.tail_bound
        sub = make_group(Family.SPECIAL_UNITARY, r - 1)
        th = shifted_theta(T, 0.0, 0.0, 1e-16).upper
        M, tail = _bounds.pick_cutoff(sub, T, power, tol / th, max_size)
        for m in range(M + 1):
            rows = stratum_array(sub, m)
            if not len(rows):
                continue
            x = rows.sum(axis=1) / r
            theta = np.array([shifted_theta(T, xi, 0.0, 1e-17).value for xi in x])
            b = np.exp(-0.5 * T * casimir_array(sub, rows)) * theta
            yield [tuple(int(v) for v in row) for row in rows], b
        return tail * th
    M, tail = _bounds.pick_cutoff(group, T, power, tol, max_size)
    cut = group.family is Family.SPECIAL_UNITARY
    for m in range(M + 1):
        rows = stratum_array(group, m)
        if not len(rows):
            continue
        b = np.exp(-0.5 * T * casimir_array(group, rows))
        weights = [tuple(int(v) for v in (row[:-1] if cut else row)) for row in rows]
        yield weights, b
    return tail


def _drain(gen, fn):
    """Sum ``boltzmann * fn(weight)`` over a :func:`_weighted_rows` generator; return ``(sum, tail)``."""
    parts = []
    while True:
        try:
            weights, b = next(gen)
        except StopIteration as stop:
            return math.fsum(parts), stop.value
        parts.append(math.fsum(bi * fn(w) for w, bi in zip(weights, b)))


def _unitary_pieri_group(group):
    return group.family.is_unitary


def _expansion(group, lam, k):
    return pieri(group, lam, k, unitary_extension=_unitary_pieri_group(group))


# ---------------------------------------------------------------------------
# torus

def torus_moments(group: GroupDescriptor, T: float, k: int, policy: TruncationPolicy | None = None,
                  with_bound: bool = False):
    """First and second moments of ``W_{l^k}`` for a non-separating simple loop on a torus.

    ``n E[W] = Z^-1 sum_lambda exp(-T c/2) c_{lambda,k}^lambda`` and
    ``n^2 E[|W|^2] = Z^-1 sum_lambda exp(-T c/2) sum_mu (c_{lambda,k}^mu)^2``,
    with the Pieri coefficients ``c``.  Both are bounded by ``1/n`` because
    the coefficients lie in ``{-1, 0, 1}`` and at most ``n`` are nonzero;
    the bounds are checked on every result.

    For U(r) the expectation vanishes by the symmetry under the centre;
    for SU(N) it vanishes unless ``N`` divides ``k``.  The remaining unitary
    cases use the unitary extension of the Pieri rule.

    Returns ``(expectation, second_moment)``, plus a bound on the truncation
    error of both with ``with_bound``.
    """
    k = int(k)
    if k == 0:
        raise ValueError("k must be nonzero")
    if not T > 0:
        raise ValueError("area must be positive")
    policy = policy or TruncationPolicy()
    tol = policy.tol
    n = group.matrix_size
    k = abs(k)
    z = partition_function(group, 1, T, TruncationPolicy(max_size=policy.max_size, tol=tol))
    zlo = z.value

    center_zero = group.family is Family.UNITARY_TILDE or (
        group.family is Family.SPECIAL_UNITARY and k % n != 0)
    cache = {}

    def coeffs(lam):
        if lam not in cache:
            e = _expansion(group, lam, k).as_dict()
            cache[lam] = (e.get(lam, 0), sum(c * c for c in e.values()))
        return cache[lam]

    if center_zero:
        num_e, tail_e = 0.0, 0.0
    else:
        num_e, tail_e = _drain(_weighted_rows(group, T, 0.0, tol, policy.max_size), lambda w: coeffs(w)[0])
    num_v, tail_v = _drain(_weighted_rows(group, T, 0.0, tol, policy.max_size), lambda w: coeffs(w)[1])
    tail_v *= n
    # |a/z - a_true/z_true| with |a| <= b z: both errors enter at most linearly
    exp_val = num_e / (n * zlo)
    var_val = num_v / (n * n * zlo)
    err = (tail_e / n + tail_v / n ** 2 + z.tail_bound / n) / zlo
    if abs(exp_val) > 1.0 / n + err or var_val > 1.0 / n + err:
        raise ArithmeticError(f"{group}: torus moments exceed the 1/n bound ({exp_val}, {var_val})")
    return (exp_val, var_val, err) if with_bound else (exp_val, var_val)


def commutator_moment(group: GroupDescriptor, T: float, k: int, policy: TruncationPolicy | None = None,
                      with_bound: bool = False) -> float:
    """``E[tr([x, y]^k)]`` for the boundary of the single face of a torus of area ``T``.

    With ``x, y`` Haar the commutator has density ``sum_lambda chi_lambda / d_lambda``,
    so ``n E = Z^-1 sum_mu exp(-T c_mu/2) d_mu sum_nu c_{mu,k}^nu / d_nu``.
    Unitary groups use the unitary extension of the Pieri rule.
    """
    k = int(k)
    if k == 0:
        raise ValueError("k must be nonzero")
    if not T > 0:
        raise ValueError("area must be positive")
    policy = policy or TruncationPolicy()
    n = group.matrix_size
    z = partition_function(group, 1, T, TruncationPolicy(max_size=policy.max_size, tol=policy.tol))
    k_eff = k if group.family.is_unitary else abs(k)

    def term(lam):
        e = _expansion(group, lam, k_eff)
        return weyl_dim(group, lam) * sum(c / weyl_dim(group, nu) for nu, c in e)

    # |term| <= n d_mu, hence the tail with one power of d
    num, tail = _drain(_weighted_rows(group, T, 1.0, policy.tol, policy.max_size), term)
    val = num / (n * z.value)
    err = (tail + z.tail_bound) / z.value
    return (val, err) if with_bound else val


# ---------------------------------------------------------------------------
# densities

def nonsep_density(group: GroupDescriptor, g: int, T: float, cls: ConjugacyClass, tol: float = 1e-10,
                   max_size: int | None = None, with_bound: bool = False):
    """Unnormalised density of the holonomy of a non-separating simple loop.

    ``phi_{g,T}(h) = sum_lambda exp(-T c/2) d^(2-2g) |chi_lambda(h)|^2``; divide by
    ``Z_{g,T}`` for a probability density against Haar measure.  The maximum
    is at the identity, where it equals ``Z_{g-1,T}``.
    """
    if int(g) != g or g < 1:
        raise ValueError("a non-separating loop needs genus g >= 1")
    val, tail, _ = character_sum(group, T, 2.0 - 2.0 * g, cls, tol, max_size, conj_power=1)
    return (val.real, tail) if with_bound else val.real


def sep_density(group: GroupDescriptor, g1: int, T1: float, g2: int, T2: float, cls: ConjugacyClass,
                tol: float = 1e-10, max_size: int | None = None) -> float:
    """Density against Haar measure of the holonomy of a separating simple loop.

    The loop cuts the surface into pieces of genus ``g1``, ``g2`` and areas
    ``T1``, ``T2``; the density is
    ``Z_{(g1,1),T1}(h) Z_{(g2,1),T2}(h^-1) / Z_{g1+g2, T1+T2}``.
    """
    a = partition_boundary(group, g1, T1, cls, tol, max_size)
    b = partition_boundary(group, g2, T2, cls.inverse(), tol, max_size)
    z = partition_function(group, int(g1) + int(g2), T1 + T2, TruncationPolicy(max_size=max_size, tol=tol))
    return float((a * b).real / z.value)


def disc_density_ratio(group: GroupDescriptor, g: int, T: float, u: float,
                       policy: TruncationPolicy | None = None, with_bound: bool = False):
    """``Z_{g,u} / Z_{g,T}`` for ``0 < u < T``.

    This bounds the density of the Yang-Mills measure restricted to the
    complement of a disc of area ``T - u`` against the measure with that disc
    collapsed, uniformly in the holonomies.  It is at least 1 since ``Z``
    decreases with the area.
    """
    if not 0 < u < T:
        raise ValueError("need 0 < u < T")
    policy = policy or TruncationPolicy()
    a = partition_function(group, g, u, policy)
    b = partition_function(group, g, T, policy)
    ratio = a.value / b.value
    err = (a.tail_bound + ratio * b.tail_bound) / b.value
    return (ratio, err) if with_bound else ratio


# ---------------------------------------------------------------------------
# loop descriptions

@dataclass(frozen=True)
class LoopSpec:
    """A loop whose Wilson moment has a closed form or an exact character sum.

    ``areas`` is ``(t,)`` for the plane, ``(t, T)`` for the sphere and
    ``(T,)`` for the torus kinds.
    """

    kind: str
    power: int
    areas: tuple

    def __post_init__(self):
        if self.kind not in LOOP_KINDS:
            raise ValueError(f"kind must be one of {LOOP_KINDS}")
        if int(self.power) == 0:
            raise ValueError("power must be nonzero")
        object.__setattr__(self, "areas", tuple(float(a) for a in self.areas))
        need = 2 if self.kind == "sphere_simple_power" else 1
        if len(self.areas) != need:
            raise ValueError(f"{self.kind} takes {need} area parameter(s)")
        if self.kind == "sphere_simple_power":
            t, T = self.areas
            if not 0 <= t <= T <= _WEAK_PHASE:
                raise ValueError("sphere loops need 0 <= t <= T <= pi^2")
        elif self.kind == "plane_simple_power":
            if self.areas[0] < 0:
                raise ValueError("area must be non-negative")
        elif self.areas[0] <= 0:
            raise ValueError("area must be positive")


def loop_moment(spec: LoopSpec, group: GroupDescriptor | None = None, tol: float = 1e-10) -> float:
    """``E[W]`` for a :class:`LoopSpec`; master-field kinds need no group."""
    if spec.kind == "plane_simple_power":
        return mf_plane_power(spec.areas[0], spec.power)
    if spec.kind == "sphere_simple_power":
        return mf_sphere_power(spec.areas[0], spec.areas[1], spec.power)
    if group is None:
        raise ValueError(f"{spec.kind} needs a group")
    if spec.kind == "torus_nonseparating_power":
        return torus_moments(group, spec.areas[0], spec.power, TruncationPolicy(tol=tol))[0]
    return commutator_moment(group, spec.areas[0], spec.power, TruncationPolicy(tol=tol))
