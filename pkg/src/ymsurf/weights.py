"""Root data, dominant weights, Casimir numbers and Weyl dimensions.

The five classical families are labelled by the type of their root system:

============  ==============  ======  ====
family        group           n       beta
============  ==============  ======  ====
UnitaryTilde  U(r)            r       2
SpecialUnit.  SU(r+1)         r+1     2
OddOrthog.    SO(2r+1)        2r+1    1
Symplectic    Sp(r)           2r      4
EvenOrthog.   SO(2r)          2r      1
============  ==============  ======  ====

Weights are integer tuples of length ``rank``.  For ``SpecialUnitary`` the
stored tuple is the representative with an implicit trailing zero, so the
full coordinate vector has ``rank + 1`` entries.

All Casimir and dimension values are computed in exact integer/rational
arithmetic; the floating point versions are derived from them.  Half-integer
shifts are handled by doubling (``rho2 = 2 * rho``).
"""
from __future__ import annotations

import enum
import functools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence

import numpy as np


class Family(str, enum.Enum):
    UNITARY_TILDE = "UnitaryTilde"
    SPECIAL_UNITARY = "SpecialUnitary"
    ODD_ORTHOGONAL = "OddOrthogonal"
    SYMPLECTIC = "Symplectic"
    EVEN_ORTHOGONAL = "EvenOrthogonal"

    @property
    def letter(self) -> str:
        return _LETTERS[self]

    @property
    def is_unitary(self) -> bool:
        return self in (Family.UNITARY_TILDE, Family.SPECIAL_UNITARY)

    @classmethod
    def parse(cls, name) -> "Family":
        """Accept a Family, its value, or a short letter such as ``"B"`` or ``"Atilde"``."""
        if isinstance(name, Family):
            return name
        key = str(name).strip()
        for fam in cls:
            if key.lower() == fam.value.lower():
                return fam
        alias = _ALIASES.get(key.lower())
        if alias is None:
            raise ValueError(f"unknown family {name!r}")
        return alias


_LETTERS = {
    Family.UNITARY_TILDE: "Atilde",
    Family.SPECIAL_UNITARY: "A",
    Family.ODD_ORTHOGONAL: "B",
    Family.SYMPLECTIC: "C",
    Family.EVEN_ORTHOGONAL: "D",
}
_ALIASES = {
    "atilde": Family.UNITARY_TILDE, "a~": Family.UNITARY_TILDE, "u": Family.UNITARY_TILDE,
    "a": Family.SPECIAL_UNITARY, "su": Family.SPECIAL_UNITARY,
    "b": Family.ODD_ORTHOGONAL, "so_odd": Family.ODD_ORTHOGONAL,
    "c": Family.SYMPLECTIC, "sp": Family.SYMPLECTIC,
    "d": Family.EVEN_ORTHOGONAL, "so_even": Family.EVEN_ORTHOGONAL,
}


class WeightError(ValueError):
    """Raised for non-dominant or malformed weights."""


@dataclass(frozen=True)
class GroupDescriptor:
    """A classical compact group, identified by root-system family and rank."""

    family: Family
    rank: int

    def __post_init__(self):
        object.__setattr__(self, "family", Family.parse(self.family))
        if int(self.rank) != self.rank or self.rank < 1:
            raise ValueError(f"rank must be a positive integer, got {self.rank!r}")
        object.__setattr__(self, "rank", int(self.rank))

    def __str__(self):
        return f"{self.family.letter}_{self.rank}"

    @property
    def matrix_size(self) -> int:
        r = self.rank
        return {
            Family.UNITARY_TILDE: r,
            Family.SPECIAL_UNITARY: r + 1,
            Family.ODD_ORTHOGONAL: 2 * r + 1,
            Family.SYMPLECTIC: 2 * r,
            Family.EVEN_ORTHOGONAL: 2 * r,
        }[self.family]

    @property
    def dyson_beta(self) -> int:
        if self.family.is_unitary:
            return 2
        return 4 if self.family is Family.SYMPLECTIC else 1

    @property
    def n_coords(self) -> int:
        """Length of the full coordinate vector of a weight."""
        return self.rank + 1 if self.family is Family.SPECIAL_UNITARY else self.rank

    @functools.cached_property
    def rho2(self) -> tuple:
        """Twice the half-sum of positive roots, in coordinates."""
        r = self.rank
        f = self.family
        if f is Family.UNITARY_TILDE:
            return tuple(r + 1 - 2 * i for i in range(1, r + 1))
        if f is Family.SPECIAL_UNITARY:
            return tuple(r + 2 - 2 * i for i in range(1, r + 2))
        if f is Family.ODD_ORTHOGONAL:
            return tuple(2 * r + 1 - 2 * i for i in range(1, r + 1))
        if f is Family.SYMPLECTIC:
            return tuple(2 * r + 2 - 2 * i for i in range(1, r + 1))
        return tuple(2 * r - 2 * i for i in range(1, r + 1))

    @property
    def rho(self) -> tuple:
        return tuple(Fraction(x, 2) for x in self.rho2)

    @functools.cached_property
    def positive_roots(self) -> np.ndarray:
        """Positive roots as integer rows in the coordinate basis."""
        m = self.n_coords
        rows = []
        for i in range(m):
            for j in range(i + 1, m):
                v = [0] * m
                v[i], v[j] = 1, -1
                rows.append(v)
        if not self.family.is_unitary:
            for i in range(m):
                for j in range(i + 1, m):
                    v = [0] * m
                    v[i], v[j] = 1, 1
                    rows.append(v)
            if self.family is Family.ODD_ORTHOGONAL:
                rows.extend([[int(k == i) for k in range(m)] for i in range(m)])
            elif self.family is Family.SYMPLECTIC:
                rows.extend([[2 * int(k == i) for k in range(m)] for i in range(m)])
        return np.array(rows, dtype=np.int64).reshape(-1, m)

    @functools.cached_property
    def simple_coroots(self) -> np.ndarray:
        """Simple coroots as rows; ``<lambda, coroot_k>`` are the Dynkin labels."""
        m, r = self.n_coords, self.rank
        rows = []
        n_diff = m - 1 if self.family.is_unitary else r - 1
        for k in range(n_diff):
            v = [0] * m
            v[k], v[k + 1] = 1, -1
            rows.append(v)
        last = [0] * m
        if self.family is Family.ODD_ORTHOGONAL:
            last[r - 1] = 2
            rows.append(last)
        elif self.family is Family.SYMPLECTIC:
            last[r - 1] = 1
            rows.append(last)
        elif self.family is Family.EVEN_ORTHOGONAL and r >= 2:
            last[r - 2], last[r - 1] = 1, 1
            rows.append(last)
        return np.array(rows, dtype=np.int64).reshape(-1, m)


def make_group(family, rank: int) -> GroupDescriptor:
    """Build the descriptor of the family's group of the given rank.

    Examples
    --------
    >>> g = make_group("B", 2)
    >>> g.matrix_size, g.dyson_beta, g.rho
    (5, 1, (Fraction(3, 2), Fraction(1, 2)))
    """
    return GroupDescriptor(Family.parse(family), rank)


# ---------------------------------------------------------------------------
# dominance and bookkeeping

def full_vector(group: GroupDescriptor, lam: Sequence[int]) -> tuple:
    lam = tuple(int(x) for x in lam)
    if group.family is Family.SPECIAL_UNITARY:
        return lam + (0,)
    return lam


def is_dominant(group: GroupDescriptor, lam: Sequence[int]) -> bool:
    lam = tuple(lam)
    if len(lam) != group.rank:
        return False
    if any(int(x) != x for x in lam):
        return False
    f = group.family
    r = group.rank
    if any(lam[i] < lam[i + 1] for i in range(r - 2)):
        return False
    if f is Family.EVEN_ORTHOGONAL:
        return r == 1 or lam[r - 2] >= abs(lam[r - 1])
    if r >= 2 and lam[r - 2] < lam[r - 1]:
        return False
    if f is Family.UNITARY_TILDE:
        return True
    return lam[r - 1] >= 0


def check_dominant(group: GroupDescriptor, lam: Sequence[int]) -> tuple:
    if not is_dominant(group, lam):
        raise WeightError(f"{tuple(lam)} is not a dominant weight of {group}")
    return tuple(int(x) for x in lam)


def weight_size(group: GroupDescriptor, lam: Sequence[int]) -> int:
    """Size used to stratify enumeration.

    ``sum(lam)`` for B and C, ``sum(|lam_i|)`` for D, the larger of the
    positive and negative parts for U(r), and for SU(r+1) the smallest
    ``sum |v_i - k|`` over all integer shifts ``k`` of the full vector.
    """
    v = full_vector(group, lam)
    f = group.family
    if f is Family.UNITARY_TILDE:
        return max(sum(x for x in v if x > 0), -sum(x for x in v if x < 0))
    if f is Family.SPECIAL_UNITARY:
        k = sorted(v)[(len(v) - 1) // 2]
        return sum(abs(x - k) for x in v)
    return sum(abs(x) for x in v)


def weight_length(lam: Sequence[int]) -> int:
    return sum(1 for x in lam if x != 0)


# ---------------------------------------------------------------------------
# Casimir and dimension

def casimir_exact(group: GroupDescriptor, lam: Sequence[int]) -> Fraction:
    """Exact Casimir number ``c_lambda`` as a Fraction."""
    lam = check_dominant(group, lam)
    v = full_vector(group, lam)
    n = group.matrix_size
    num = sum(x * (x + s) for x, s in zip(v, group.rho2))
    c = Fraction(num, n)
    if group.family is Family.SPECIAL_UNITARY:
        c -= Fraction(sum(v) ** 2, n * n)
    return c


def casimir(group: GroupDescriptor, lam: Sequence[int]) -> float:
    """Casimir number of the irreducible representation with highest weight ``lam``.

    Examples
    --------
    >>> casimir(make_group("B", 2), (1, 0))
    0.8
    """
    return float(casimir_exact(group, lam))


def weyl_dim(group: GroupDescriptor, lam: Sequence[int]) -> int:
    """Weyl dimension, as an exact integer."""
    lam = check_dominant(group, lam)
    v2 = np.array([2 * x for x in full_vector(group, lam)], dtype=object)
    rho2 = np.array(group.rho2, dtype=object)
    num, den = 1, 1
    for a in group.positive_roots.astype(object):
        num *= int(np.dot(v2 + rho2, a))
        den *= int(np.dot(rho2, a))
    d, rem = divmod(num, den)
    if rem:
        raise ArithmeticError(f"non-integral dimension for {lam} in {group}")
    return d


@dataclass(frozen=True)
class WeightStats:
    casimir: Fraction
    dimension: int
    size: int
    length: int


def weight_stats(group: GroupDescriptor, lam: Sequence[int]) -> WeightStats:
    return WeightStats(casimir_exact(group, lam), weyl_dim(group, lam),
                       weight_size(group, lam), weight_length(lam))


def dynkin_labels(group: GroupDescriptor, lam: Sequence[int]) -> tuple:
    v = np.array(full_vector(group, lam), dtype=np.int64)
    return tuple(int(x) for x in group.simple_coroots @ v)


# ---------------------------------------------------------------------------
# enumeration

def partitions(m: int, max_parts: int, max_part: int | None = None) -> Iterator[tuple]:
    """Partitions of ``m`` with at most ``max_parts`` parts, in reverse lexicographic order."""
    if max_part is None:
        max_part = m
    if m == 0:
        yield ()
        return
    if max_parts <= 0:
        return
    lo = -(-m // max_parts)
    for p in range(min(m, max_part), lo - 1, -1):
        for rest in partitions(m - p, max_parts - 1, p):
            yield (p,) + rest


@functools.lru_cache(maxsize=256)
def partition_array(m: int, max_parts: int) -> np.ndarray:
    """All partitions of ``m`` with at most ``max_parts`` parts, zero-padded to ``max_parts`` columns."""
    width = max(max_parts, 0)
    rows = [p + (0,) * (width - len(p)) for p in partitions(m, max_parts)]
    arr = np.array(rows, dtype=np.int64).reshape(len(rows), width)
    arr.setflags(write=False)
    return arr


def _pair_vectors(alpha_list, beta_list, n):
    out = []
    for a in alpha_list:
        for b in beta_list:
            if len(a) + len(b) > n:
                continue
            out.append(a + (0,) * (n - len(a) - len(b)) + tuple(-x for x in reversed(b)))
    return out


def _stratum(group: GroupDescriptor, m: int) -> list:
    f, r = group.family, group.rank
    if f in (Family.ODD_ORTHOGONAL, Family.SYMPLECTIC):
        return [p + (0,) * (r - len(p)) for p in partitions(m, r)]
    if f is Family.EVEN_ORTHOGONAL:
        out = []
        for p in partitions(m, r):
            lam = p + (0,) * (r - len(p))
            out.append(lam)
            if lam[-1] != 0:
                out.append(lam[:-1] + (-lam[-1],))
        return out
    if f is Family.SPECIAL_UNITARY:
        n = r + 1
        la, lb = n // 2, (n + 1) // 2 - 1
        out = []
        for a in range(m, -1, -1):
            vecs = _pair_vectors(list(partitions(a, la)), list(partitions(m - a, lb)), n)
            out.extend(tuple(x - v[-1] for x in v[:-1]) for v in vecs)
        return out
    # U(r): max(|alpha|, |beta|) == m
    out = []
    for a in range(m, -1, -1):
        bs = range(m, -1, -1) if a == m else (m,)
        for b in bs:
            out.extend(_pair_vectors(list(partitions(a, r)), list(partitions(b, r)), r))
    return out


def enumerate_dominant(group: GroupDescriptor, max_size: int) -> Iterator[tuple]:
    """Yield every dominant weight of size at most ``max_size`` exactly once.

    Weights come out in non-decreasing :func:`weight_size` order.  For the
    even orthogonal family both signs of the last coordinate are emitted; for
    U(r) vectors with negative entries are included.

    Examples
    --------
    >>> list(enumerate_dominant(make_group("B", 2), 2))
    [(0, 0), (1, 0), (2, 0), (1, 1)]
    """
    if max_size < 0:
        return
    for m in range(int(max_size) + 1):
        yield from _stratum(group, m)


def stratum_array(group: GroupDescriptor, m: int) -> np.ndarray:
    """Weights of size exactly ``m`` as rows of full coordinate vectors."""
    return _stratum_array_cached(group, m)


@functools.lru_cache(maxsize=512)
def _stratum_array_cached(group, m):
    rows = [full_vector(group, lam) for lam in _stratum(group, m)]
    arr = np.array(rows, dtype=np.int64).reshape(len(rows), group.n_coords)
    arr.setflags(write=False)
    return arr


# ---------------------------------------------------------------------------
# vectorised helpers used by the character sums

def casimir_array(group: GroupDescriptor, vecs: np.ndarray) -> np.ndarray:
    """Casimir numbers of full coordinate rows, as floats.

    Each value is obtained from an exact integer numerator divided once by an
    integer denominator, so results are reproducible bit for bit.
    """
    vecs = np.asarray(vecs, dtype=np.int64)
    n = group.matrix_size
    s = np.asarray(group.rho2, dtype=np.int64)[: vecs.shape[1]]
    num = (vecs * (vecs + s)).sum(axis=1)
    if group.family is Family.SPECIAL_UNITARY:
        tot = vecs.sum(axis=1)
        return (n * num - tot * tot) / float(n * n)
    return num / float(n)


def log_dim_array(group: GroupDescriptor, vecs: np.ndarray) -> np.ndarray:
    """Natural log of the Weyl dimension of each full coordinate row."""
    vecs = np.asarray(vecs, dtype=np.int64)
    roots = group.positive_roots
    if roots.shape[0] == 0:
        return np.zeros(vecs.shape[0])
    rho2 = np.asarray(group.rho2, dtype=np.int64)
    num = (2 * vecs + rho2) @ roots.T
    den = rho2 @ roots.T
    return (np.log(num) - np.log(den)).sum(axis=1)


@functools.lru_cache(maxsize=64)
def dimension_exponents(group: GroupDescriptor) -> np.ndarray:
    """Exponents ``w_k`` with ``d_lambda >= prod_k (a_k + 1) ** w_k``.

    Every factor of the Weyl product is a weighted mean of the shifted Dynkin
    labels ``a_k + 1`` with weights read off the coroot expansion; the
    arithmetic-geometric mean inequality then bounds it below by the
    weighted geometric mean.
    """
    simple = group.simple_coroots.astype(float)
    w = np.zeros(simple.shape[0])
    for a in group.positive_roots.astype(float):
        co = 2.0 * a / float(a @ a)
        coef = np.round(np.linalg.lstsq(simple.T, co, rcond=None)[0], 9)
        w += coef / coef.sum()
    return w


def from_dynkin(group: GroupDescriptor, labels: Sequence[int]) -> tuple | None:
    """Inverse of :func:`dynkin_labels`; ``None`` when the labels are not an integral weight."""
    a = [int(x) for x in labels]
    r, f = group.rank, group.family
    if f in (Family.SPECIAL_UNITARY, Family.UNITARY_TILDE):
        if f is Family.UNITARY_TILDE:
            raise ValueError("U(r) weights are not determined by Dynkin labels")
        lam = [0] * (r + 1)
        for i in range(r - 1, -1, -1):
            lam[i] = lam[i + 1] + a[i]
        return tuple(lam[:r])
    lam = [0] * r
    if f is Family.ODD_ORTHOGONAL:
        if a[-1] % 2:
            return None
        lam[-1] = a[-1] // 2
    elif f is Family.SYMPLECTIC:
        lam[-1] = a[-1]
    else:
        if r == 1:
            raise ValueError("SO(2) weights are not determined by Dynkin labels")
        s = a[-2] + a[-1]
        if s % 2:
            return None
        lam[-2] = s // 2
        lam[-1] = (a[-1] - a[-2]) // 2
        for i in range(r - 3, -1, -1):
            lam[i] = lam[i + 1] + a[i]
        return tuple(lam)
    for i in range(r - 2, -1, -1):
        lam[i] = lam[i + 1] + a[i]
    return tuple(lam)


def log_partition_bound(m: int) -> float:
    """Upper bound ``log p(m) <= pi * sqrt(2 m / 3)`` on the partition count."""
    return math.pi * math.sqrt(2.0 * m / 3.0)
