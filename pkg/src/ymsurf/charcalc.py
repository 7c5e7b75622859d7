"""Irreducible characters, heat kernels and the signed Pieri rule.

Characters are evaluated from the Weyl alternant ratio.  Close to the walls
of the torus, where the alternant denominator vanishes, the evaluation
switches to determinantal formulas in the complete symmetric functions of the
eigenvalues, which are polynomial and hence exact up to rounding:

* unitary:      ``s_lambda = det h_{lambda_i - i + j}``,
* symplectic:   ``sp_lambda = det [h_{lambda_i - i + 1} | h_{lambda_i - i + j} + h_{lambda_i - i - j + 2}]``,
* orthogonal:   ``o_lambda = det (h_{lambda_i - i + j} - h_{lambda_i - i - j})``.

For SO(2r) with ``lambda_r != 0`` the orthogonal formula gives the sum of the
characters of ``lambda`` and its mirror image; the difference is an explicit
symplectic character times ``prod (z_i - 1/z_i)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import _bounds
from .qseries import shifted_theta
from .weights import (
    Family, GroupDescriptor, casimir_array, check_dominant, full_vector, log_dim_array,
    make_group, stratum_array, weyl_dim,
)

RANK_CAP = 8
_SEP_MIN = 1e-3


@dataclass(frozen=True)
class ConjugacyClass:
    """Eigenangles of a group element.

    For B, C, D the element has eigenvalues ``exp(+-i angles)`` (plus 1 for
    odd orthogonal groups); for U(r) and SU(r+1) one angle per eigenvalue.
    """

    angles: tuple

    def __post_init__(self):
        object.__setattr__(self, "angles", tuple(float(a) for a in self.angles))

    @classmethod
    def identity(cls, group: GroupDescriptor) -> "ConjugacyClass":
        k = group.n_coords
        return cls((0.0,) * k)

    @classmethod
    def from_matrix(cls, group: GroupDescriptor, g: np.ndarray) -> "ConjugacyClass":
        """Read the class off a group element given as an ``n x n`` matrix.

        For SO(2r) the sign of the Pfaffian-type invariant is not recovered;
        the result is the class up to the outer automorphism, which is all
        the heat kernel depends on.
        """
        phi = np.angle(np.linalg.eigvals(np.asarray(g)))
        if group.family.is_unitary:
            return cls(tuple(np.sort(phi)[::-1]))
        a = np.sort(np.abs(phi))[::-1]
        return cls(tuple(a[0: 2 * group.rank: 2]))

    def inverse(self) -> "ConjugacyClass":
        return ConjugacyClass(tuple(-a for a in self.angles))

    def eigenvalues(self, group: GroupDescriptor) -> np.ndarray:
        z = np.exp(1j * np.asarray(self.angles))
        if group.family.is_unitary:
            return z
        ev = np.concatenate([z, z.conj()])
        if group.family is Family.ODD_ORTHOGONAL:
            ev = np.append(ev, 1.0)
        return ev


def _check_class(group, cls):
    if len(cls.angles) != group.n_coords:
        raise ValueError(f"{group} needs {group.n_coords} eigenangles, got {len(cls.angles)}")


def _check_cap(group):
    if group.rank > RANK_CAP:
        raise ValueError(f"pointwise character sums are capped at rank {RANK_CAP}, got {group}")


# ---------------------------------------------------------------------------
# alternants

def _separation(group, theta):
    z = np.exp(1j * theta)
    k = len(z)
    f = group.family
    d = [math.inf]
    for i in range(k):
        for j in range(i + 1, k):
            d.append(abs(z[i] - z[j]))
            if not f.is_unitary:
                d.append(abs(z[i] - z[j].conjugate()))
    if f is Family.ODD_ORTHOGONAL:
        d.extend(np.abs(z - 1.0))
    elif f is Family.SYMPLECTIC:
        d.extend(np.abs(z - z.conj()))
    return min(d)


def _alternant(group, rows, theta):
    """Weyl alternant ratio for each full coordinate row."""
    f = group.family
    rows = np.asarray(rows)
    th = np.asarray(theta, dtype=float)
    if f.is_unitary:
        k = len(th)
        mu = rows + (k - 1 - np.arange(k))
        num = np.linalg.det(np.exp(1j * th[None, :, None] * mu[:, None, :]))
        den = np.linalg.det(np.exp(1j * th[:, None] * (k - 1 - np.arange(k))[None, :]))
        return num / den
    rho2 = np.asarray(group.rho2)
    mu = (2 * rows + rho2) / 2.0
    rho = rho2 / 2.0
    arg = th[None, :, None] * mu[:, None, :]
    if f is Family.EVEN_ORTHOGONAL:
        r = group.rank
        den = np.linalg.det(np.cos(th[:, None] * rho[None, :]))
        out = np.linalg.det(np.cos(arg)).astype(complex)
        if np.any(rows[:, -1] != 0):
            out = out + (1j ** r) * np.linalg.det(np.sin(arg))
        return out / den
    num = np.linalg.det(np.sin(arg))
    den = np.linalg.det(np.sin(th[:, None] * rho[None, :]))
    return (num / den).astype(complex)


# ---------------------------------------------------------------------------
# determinantal formulas

def _complete_symmetric(variables, kmax):
    """``h_0 .. h_kmax`` of the given variables, by adding one variable at a time."""
    h = np.zeros(kmax + 1, dtype=complex)
    h[0] = 1.0
    for x in variables:
        for k in range(1, kmax + 1):
            h[k] = h[k] + x * h[k - 1]
    return h


def _hget(h, idx):
    idx = np.asarray(idx)
    out = np.where(idx >= 0, h[np.clip(idx, 0, len(h) - 1)], 0.0)
    return np.where(idx < len(h), out, np.nan)


def _jt_matrices(parts, h, kind):
    """Batched Jacobi-Trudi-type matrices for partition rows ``parts`` (W x L)."""
    W, L = parts.shape
    i = np.arange(1, L + 1)[:, None]
    j = np.arange(1, L + 1)[None, :]
    base = parts[:, :, None] - i[None] + j[None]
    if kind == "schur":
        return _hget(h, base)
    if kind == "orth":
        return _hget(h, base) - _hget(h, parts[:, :, None] - i[None] - j[None])
    m = _hget(h, base) + _hget(h, parts[:, :, None] - i[None] - j[None] + 2)
    m[:, :, 0] = _hget(h, parts - i[:, 0][None] + 1)
    return m


def _det_formula(parts, variables, kind):
    parts = np.asarray(parts, dtype=np.int64)
    if parts.shape[1] == 0 or not np.any(parts):
        return np.ones(parts.shape[0], dtype=complex)
    L = int((parts != 0).sum(axis=1).max())
    parts = parts[:, :L]
    h = _complete_symmetric(variables, int(parts[:, 0].max()) + L + 1)
    return np.linalg.det(_jt_matrices(parts, h, kind))


def _polynomial(group, rows, theta):
    f = group.family
    rows = np.asarray(rows, dtype=np.int64)
    z = np.exp(1j * np.asarray(theta, dtype=float))
    if f.is_unitary:
        last = rows[:, -1]
        return _det_formula(rows - last[:, None], z, "schur") * np.prod(z) ** last
    zz = np.concatenate([z, z.conj()])
    if f is Family.SYMPLECTIC:
        return _det_formula(rows, zz, "symp")
    if f is Family.ODD_ORTHOGONAL:
        return _det_formula(rows, np.append(zz, 1.0), "orth")
    absrows = np.abs(rows)
    out = _det_formula(absrows, zz, "orth")
    sgn = np.sign(rows[:, -1])
    nz = sgn != 0
    if np.any(nz):
        inner = _det_formula(absrows[nz] - 1, zz, "symp") * np.prod(z - z.conj())
        out = out.astype(complex)
        out[nz] = 0.5 * (out[nz] + sgn[nz] * inner)
    return out


def char_values(group: GroupDescriptor, rows: np.ndarray, cls: ConjugacyClass) -> np.ndarray:
    """Characters of several weights, given as full coordinate rows, at one class."""
    _check_class(group, cls)
    rows = np.asarray(rows, dtype=np.int64).reshape(-1, group.n_coords)
    theta = np.asarray(cls.angles)
    if len(theta) == 1 and group.family in (Family.UNITARY_TILDE, Family.EVEN_ORTHOGONAL):
        return np.exp(1j * theta[0] * rows[:, 0])
    if _separation(group, theta) >= _SEP_MIN:
        return _alternant(group, rows, theta)
    return _polynomial(group, rows, theta)


def char_eval(group: GroupDescriptor, lam: Sequence[int], cls: ConjugacyClass) -> complex:
    """Character of the irreducible representation ``lam`` at the class ``cls``.

    Examples
    --------
    >>> g = make_group("C", 1)
    >>> round(char_eval(g, (2,), ConjugacyClass((0.3,))).real, 12) == round(math.sin(0.9) / math.sin(0.3), 12)
    True
    """
    _check_cap(group)
    lam = check_dominant(group, lam)
    if not any(cls.angles):
        return complex(weyl_dim(group, lam))
    row = np.array([full_vector(group, lam)])
    return complex(char_values(group, row, cls)[0])


# ---------------------------------------------------------------------------
# heat kernel and other pointwise character sums

def _su_reduction(group):
    """SU(r) used to factor a U(r) sum, or None for the circle."""
    return make_group(Family.SPECIAL_UNITARY, group.rank - 1) if group.rank > 1 else None


def character_sum(group: GroupDescriptor, T: float, power: float, cls: ConjugacyClass, tol: float,
                  max_size: int | None = None, conj_power: int = 0):
    """``sum_lambda exp(-T c/2) d**power chi(g) conj(chi(g))**conj_power`` with a certified tail.

    Returns ``(value, tail_bound, terms_used)``.  The modulus of each term is at
    most ``exp(-T c/2) d**(power + 1 + conj_power)``, which is what the tail
    bound controls.
    """
    _check_cap(group)
    _check_class(group, cls)
    if not T > 0:
        raise ValueError("area must be positive")
    growth = power + 1 + conj_power
    f = group.family
    theta = np.asarray(cls.angles)
    if f is Family.UNITARY_TILDE:
        sub = _su_reduction(group)
        phase = float(theta.sum())
        th = shifted_theta(T, 0.0, 0.0, tol * 1e-3).value
        if sub is None:
            if conj_power:
                v = shifted_theta(T, 0.0, 0.0, tol * 1e-2)
            else:
                v = shifted_theta(T, 0.0, phase, tol * 1e-2)
            return complex(v.value), v.tail_bound, 1
        M, tail = _bounds.pick_cutoff(sub, T, growth, tol / (2 * th), max_size)
        total, used = 0.0 + 0.0j, 0
        for m in range(M + 1):
            rows = stratum_array(sub, m)
            c = casimir_array(sub, rows)
            ld = log_dim_array(sub, rows)
            ch = char_values(group, rows, cls)
            x = rows.sum(axis=1) / group.rank
            ph = 0.0 if conj_power else phase
            k_sum = np.array([shifted_theta(T, xi, ph, tol * 1e-3 / max(len(rows), 1)).value for xi in x])
            term = np.exp(-0.5 * T * c + power * ld) * ch * k_sum
            if conj_power:
                term = term * np.conj(ch) ** conj_power
            total += term.sum()
            used += len(rows)
        return complex(total), tail * th + tol * 1e-3, used
    M, tail = _bounds.pick_cutoff(group, T, growth, tol, max_size)
    total, used = 0.0 + 0.0j, 0
    for m in range(M + 1):
        rows = stratum_array(group, m)
        c = casimir_array(group, rows)
        ld = log_dim_array(group, rows)
        ch = char_values(group, rows, cls)
        term = np.exp(-0.5 * T * c + power * ld) * ch
        if conj_power:
            term = term * np.conj(ch) ** conj_power
        total += term.sum()
        used += len(rows)
    return complex(total), tail, used


def heat_kernel_eval(group: GroupDescriptor, t: float, cls: ConjugacyClass, tol: float = 1e-10,
                     max_size: int | None = None) -> float:
    """Heat kernel ``p_t(g) = sum_lambda exp(-t c/2) d chi_lambda(g)`` against Haar measure.

    The sum is truncated at the smallest weight size whose certified tail is
    below ``tol``.
    """
    if not t > 0:
        raise ValueError(f"time must be positive, got {t!r}")
    val, _, _ = character_sum(group, t, 1.0, cls, tol, max_size)
    return float(val.real)


# ---------------------------------------------------------------------------
# Pieri rule

@dataclass(frozen=True)
class CharacterExpansion:
    """Sparse integer combination of irreducible characters."""

    group: GroupDescriptor
    terms: tuple

    @classmethod
    def from_dict(cls, group, d):
        items = tuple(sorted(((tuple(k), int(v)) for k, v in d.items() if v), reverse=True))
        return cls(group, items)

    def as_dict(self) -> dict:
        return dict(self.terms)

    def __getitem__(self, lam):
        return self.as_dict().get(tuple(lam), 0)

    def __iter__(self):
        return iter(self.terms)

    def __len__(self):
        return len(self.terms)

    def l1(self) -> int:
        return sum(abs(c) for _, c in self.terms)

    def dimension(self) -> int:
        return sum(c * weyl_dim(self.group, lam) for lam, c in self.terms)

    def evaluate(self, cls: ConjugacyClass) -> complex:
        if not self.terms:
            return 0j
        rows = np.array([full_vector(self.group, lam) for lam, _ in self.terms])
        coef = np.array([c for _, c in self.terms])
        return complex((coef * char_values(self.group, rows, cls)).sum())


def _perm_sign_sort_desc(v):
    """Sort ``v`` in decreasing order; return the sorted list and the sign of the permutation."""
    order = sorted(range(len(v)), key=lambda i: -v[i])
    seen, sign = [False] * len(v), 1
    for i in range(len(v)):
        if seen[i]:
            continue
        j, length = i, 0
        while not seen[j]:
            seen[j] = True
            j = order[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return [v[i] for i in order], sign


def _straighten_bcd(group, nu2):
    """Reduce the alternant of a doubled shifted vector to ``(sign, weight)``, or ``None`` if it vanishes."""
    f = group.family
    absv = [abs(x) for x in nu2]
    if len(set(absv)) < len(absv):
        return None
    neg = sum(1 for x in nu2 if x < 0)
    if f is Family.EVEN_ORTHOGONAL:
        sign = 1
    else:
        if 0 in absv:
            return None
        sign = -1 if neg % 2 else 1
    srt, psign = _perm_sign_sort_desc(absv)
    sign *= psign
    if f is Family.EVEN_ORTHOGONAL and neg % 2 and 0 not in absv:
        srt[-1] = -srt[-1]
    lam = tuple((a - b) // 2 for a, b in zip(srt, group.rho2))
    return sign, lam


def _straighten_unitary(group, nu):
    if len(set(nu)) < len(nu):
        return None
    srt, sign = _perm_sign_sort_desc(list(nu))
    k = len(nu)
    lam = [a - (k - 1 - i) for i, a in enumerate(srt)]
    if group.family is Family.SPECIAL_UNITARY:
        lam = [x - lam[-1] for x in lam][:-1]
    return sign, tuple(lam)


def pieri(group: GroupDescriptor, lam: Sequence[int], k: int, unitary_extension: bool = False) -> CharacterExpansion:
    """Expand ``Tr(g^k) chi_lam(g)`` into irreducible characters.

    For B, C, D the shifted highest weight ``lam + rho`` is moved by ``+-k`` in
    one coordinate at a time; the resulting alternants are reflected back into
    the dominant chamber, picking up the sign of the Weyl group element, or
    vanish when the shifted vector lies on a wall.  The eigenvalue 1 of odd
    orthogonal matrices adds ``chi_lam`` itself.  Coefficients are in
    ``{-1, 0, 1}`` and their absolute values sum to at most ``n``.

    The unitary families follow the same recipe with shifts ``+k e_j`` only;
    this is an extension beyond the B, C, D statement and must be requested
    with ``unitary_extension=True``.

    Examples
    --------
    >>> pieri(make_group("B", 2), (0, 0), 1).as_dict()
    {(1, 0): 1}
    >>> pieri(make_group("C", 1), (1,), 4).as_dict()
    {(5,): 1, (1,): -1}
    """
    k = int(k)
    if k == 0:
        raise ValueError("k must be nonzero")
    lam = check_dominant(group, lam)
    out: dict = {}
    if group.family.is_unitary:
        if not unitary_extension:
            raise ValueError("the Pieri rule for unitary families is an extension; pass unitary_extension=True")
        v = full_vector(group, lam)
        K = len(v)
        base = [x + K - 1 - i for i, x in enumerate(v)]
        for j in range(K):
            nu = list(base)
            nu[j] += k
            res = _straighten_unitary(group, nu)
            if res is not None:
                out[res[1]] = out.get(res[1], 0) + res[0]
        return CharacterExpansion.from_dict(group, out)
    k = abs(k)
    base = [2 * x + s for x, s in zip(lam, group.rho2)]
    for j in range(group.rank):
        for step in (2 * k, -2 * k):
            nu = list(base)
            nu[j] += step
            res = _straighten_bcd(group, nu)
            if res is not None:
                out[res[1]] = out.get(res[1], 0) + res[0]
    if group.family is Family.ODD_ORTHOGONAL:
        out[lam] = out.get(lam, 0) + 1
    return CharacterExpansion.from_dict(group, out)
