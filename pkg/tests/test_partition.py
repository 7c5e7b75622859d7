import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ymsurf.charcalc import ConjugacyClass
from ymsurf.partition import (
    PartitionValue, TruncationError, TruncationPolicy, dk_free_energy_weak, limit_gap,
    log_sphere_partition_unitary, partition_boundary, partition_function, witten_zeta,
)
from ymsurf.qseries import jacobi_theta
from ymsurf.weights import casimir, enumerate_dominant, make_group, weyl_dim


def _brute(group, g, T, size):
    # independent oracle: plain loop over enumerated weights
    return math.fsum(math.exp(-0.5 * T * casimir(group, lam)) * weyl_dim(group, lam) ** (2 - 2 * g)
                     for lam in enumerate_dominant(group, size))


def _box_unitary(r, g, T, box):
    # U(r) weights as non-increasing integer vectors in a box
    grp = make_group("Atilde", r)
    out = []
    for lam in itertools.product(range(-box, box + 1), repeat=r):
        if all(lam[i] >= lam[i + 1] for i in range(r - 1)):
            out.append(math.exp(-0.5 * T * casimir(grp, lam)) * weyl_dim(grp, lam) ** (2 - 2 * g))
    return math.fsum(out)


@pytest.mark.parametrize("fam,r", [("A", 2), ("A", 3), ("B", 2), ("B", 3), ("C", 2), ("C", 3), ("D", 2), ("D", 3)])
@pytest.mark.parametrize("g", [1, 2])
def test_matches_enumeration(fam, r, g):
    grp = make_group(fam, r)
    T = 2.5
    z = partition_function(grp, g, T, TruncationPolicy(tol=1e-11))
    ref = _brute(grp, g, T, 26)
    assert ref - 1e-13 <= z.value + z.tail_bound
    assert abs(z.value - ref) <= z.tail_bound + 1e-12


@pytest.mark.parametrize("r", [2, 3])
@pytest.mark.parametrize("g", [1, 2])
def test_unitary_matches_box_sum(r, g):
    z = partition_function(make_group("Atilde", r), g, 2.0, TruncationPolicy(tol=1e-11))
    assert abs(z.value - _box_unitary(r, g, 2.0, 12)) <= z.tail_bound + 1e-12


@pytest.mark.parametrize("T", [0.5, 2.0, 8.0])
@pytest.mark.parametrize("g", [0, 1, 3])
def test_circle_is_theta(T, g):
    z = partition_function(make_group("Atilde", 1), g, T, TruncationPolicy(tol=1e-12))
    th = jacobi_theta(math.exp(-T / 2))
    assert abs(z.value - th.value) <= max(z.tail_bound, 1e-12) + th.tail_bound


def test_large_area_tends_to_one():
    for fam in ("A", "B", "C", "D"):
        z = partition_function(make_group(fam, 3), 2, 60.0)
        assert 1.0 <= z.value < 1 + 1e-6


@pytest.mark.parametrize("fam", ["A", "B", "C", "D", "Atilde"])
def test_monotone_in_area_and_genus(fam):
    grp = make_group(fam, 3)
    grid = [0.7, 1.5, 3.0, 6.0]
    for g in (1, 2, 3):
        vals = [partition_function(grp, g, T).value for T in grid]
        assert all(a > b for a, b in zip(vals, vals[1:]))
    for T in grid:
        vals = [partition_function(grp, g, T).value for g in (1, 2, 3)]
        assert all(a > b for a, b in zip(vals, vals[1:]))


@pytest.mark.parametrize("fam,r", [("A", 3), ("B", 2), ("B", 5), ("C", 4), ("D", 4), ("D", 10), ("C", 10)])
def test_bracketed_by_zeta(fam, r):
    grp = make_group(fam, r)
    for g in (2, 3):
        zeta = witten_zeta(grp, 2 * g - 2.0, TruncationPolicy(tol=1e-6))
        for T in (0.5, 1.0, 3.0):
            z = partition_function(grp, g, T)
            assert z.value >= 1.0
            assert z.value <= zeta.value + zeta.tail_bound


def test_policy_validation():
    grp = make_group("B", 2)
    with pytest.raises(ValueError):
        partition_function(grp, 0, 1.0, TruncationPolicy(tail_mode="rigorous-g1"))
    with pytest.raises(ValueError):
        partition_function(grp, 1, 1.0, TruncationPolicy(tail_mode="heuristic-sphere"))
    with pytest.raises(ValueError):
        partition_function(grp, 1, 1.0, TruncationPolicy(tail_mode="rigorous-g2plus"))
    with pytest.raises(ValueError):
        partition_function(grp, 1, 0.0)
    with pytest.raises(ValueError):
        partition_function(grp, -1, 1.0)
    with pytest.raises(ValueError):
        TruncationPolicy(tail_mode="guess")
    with pytest.raises(TruncationError):
        partition_function(grp, 2, 0.5, TruncationPolicy(tol=1e-12, max_size=3))


def test_enumeration_guard():
    with pytest.raises(TruncationError):
        partition_function(make_group("A", 20), 2, 0.1, TruncationPolicy(tol=1e-12))


def test_explicit_modes_agree_with_auto():
    grp = make_group("C", 2)
    a = partition_function(grp, 1, 1.0, TruncationPolicy(tail_mode="rigorous-g1"))
    b = partition_function(grp, 1, 1.0)
    assert a == b
    assert isinstance(a, PartitionValue)
    assert float(a) == a.value


# ---------------------------------------------------------------------------
# sphere

@pytest.mark.parametrize("N", [2, 3, 4])
def test_unitary_sphere_ensemble_matches_enumeration(N):
    T = 3.0
    z = partition_function(make_group("Atilde", N), 0, T)
    box = {2: 30, 3: 18, 4: 11}[N]
    ref = _box_unitary(N, 0, T, box)
    assert z.value == pytest.approx(ref, rel=1e-10)
    assert log_sphere_partition_unitary(N, T) == pytest.approx(math.log(ref), abs=1e-10)


def test_sphere_heuristic_flag():
    z = partition_function(make_group("C", 2), 0, 4.0, TruncationPolicy(tol=1e-10))
    assert z.heuristic
    ref = _brute(make_group("C", 2), 0, 4.0, 40)
    assert z.value == pytest.approx(ref, rel=1e-9)


# ---------------------------------------------------------------------------
# boundary

@pytest.mark.parametrize("fam,r", [("B", 2), ("C", 2), ("D", 3), ("A", 2), ("Atilde", 2)])
def test_boundary_identity_and_modulus(fam, r):
    grp = make_group(fam, r)
    for g in (1, 2):
        z = partition_function(grp, g, 1.5)
        b, tail = partition_boundary(grp, g, 1.5, ConjugacyClass.identity(grp), with_bound=True)
        assert abs(b - z.value) <= tail + z.tail_bound + 1e-12
        rng = np.random.default_rng(5)
        for _ in range(5):
            th = rng.uniform(-3, 3, grp.n_coords)
            if fam == "A":
                th[-1] = -th[:-1].sum()
            assert abs(partition_boundary(grp, g, 1.5, ConjugacyClass(th))) <= z.value + 1e-9


def test_boundary_circle():
    grp = make_group("Atilde", 1)
    T, th = 1.3, 0.8
    m = np.arange(-40, 41)
    oracle = np.sum(np.exp(-T * m * m / 2) * np.exp(1j * m * th))
    assert partition_boundary(grp, 1, T, ConjugacyClass((th,))) == pytest.approx(oracle, abs=1e-12)


def test_boundary_rejects_sphere():
    with pytest.raises(ValueError):
        partition_boundary(make_group("C", 1), 0, 1.0, ConjugacyClass((0.0,)))


# ---------------------------------------------------------------------------
# Witten zeta

def test_basel():
    v = witten_zeta(make_group("A", 1), 2.0, TruncationPolicy(tol=1e-6))
    assert v.tail_bound <= 1e-6
    assert v.value <= math.pi ** 2 / 6 <= v.value + v.tail_bound
    assert abs(v.value - math.pi ** 2 / 6) < 1e-6


def test_zeta_b_decreasing():
    vals = [witten_zeta(make_group("B", r), 2.0, TruncationPolicy(tol=1e-8)).value for r in (2, 4, 8)]
    assert vals[0] > vals[1] > vals[2] > 1.0


@pytest.mark.parametrize("fam,r", [("A", 2), ("B", 2), ("C", 3), ("D", 4)])
def test_zeta_matches_enumeration(fam, r):
    grp = make_group(fam, r)
    s = 3.0
    v = witten_zeta(grp, s, TruncationPolicy(tol=1e-6))
    size = {"A": 80, "B": 40, "C": 24, "D": 18}[fam]
    partial = math.fsum(weyl_dim(grp, lam) ** -s for lam in enumerate_dominant(grp, size))
    assert partial <= v.value + v.tail_bound + 1e-12
    assert v.value - 1e-12 <= partial + 1e-6


def test_zeta_large_exponent():
    # only the smallest nontrivial dimension survives: for C_3 that is the
    # 6-dimensional defining representation, next come two of dimension 14
    grp = make_group("C", 3)
    s = 12.0
    v = witten_zeta(grp, s, TruncationPolicy(tol=1e-14))
    excess = (v.value - 1.0) / 6.0 ** -s
    assert excess == pytest.approx(1 + 2 * (6 / 14) ** s, rel=1e-3)


def test_zeta_region_cap(monkeypatch):
    import ymsurf.partition as part
    monkeypatch.setattr(part, "_ZETA_MAX_ENTRIES", 1000)
    with pytest.raises(TruncationError):
        witten_zeta(make_group("D", 4), 2.0, TruncationPolicy(tol=1e-8))


def test_zeta_rejects():
    with pytest.raises(ValueError):
        witten_zeta(make_group("B", 2), 1.0)
    with pytest.raises(ValueError):
        witten_zeta(make_group("Atilde", 2), 2.0)
    with pytest.raises(ValueError):
        witten_zeta(make_group("D", 1), 2.0)


# ---------------------------------------------------------------------------
# Douglas-Kazakov and limit gaps

def test_dk_value():
    assert dk_free_energy_weak(math.pi ** 2) == pytest.approx(math.pi ** 2 / 24 + 0.75 - math.log(math.pi), abs=1e-15)
    assert round(dk_free_energy_weak(math.pi ** 2), 7) == 0.0165036


def test_dk_decreasing_and_positive():
    grid = np.linspace(1e-3, math.pi ** 2, 400)
    vals = np.array([dk_free_energy_weak(t) for t in grid])
    assert np.all(np.diff(vals) < 0)
    assert np.all(vals > 0)
    with pytest.raises(ValueError):
        dk_free_energy_weak(10.0)
    with pytest.raises(ValueError):
        dk_free_energy_weak(0.0)


def test_limit_gap_examples():
    gap, err = limit_gap("C", 2, 3.0, 20, with_bound=True)
    zeta = witten_zeta(make_group("C", 20), 2.0, TruncationPolicy(tol=1e-7))
    assert gap <= zeta.value + zeta.tail_bound - 1
    # the defining representation dominates: d = 40, c = 41/40
    lead = math.exp(-1.5 * 41 / 40) / 40 ** 2
    assert lead <= gap + err <= 1.01 * lead
    assert limit_gap("B", 1, 60.0, 4) < 1e-10
    gaps = [limit_gap("Atilde", 1, 2.0, r) for r in (10, 20, 40)]
    assert gaps[0] > gaps[1] > gaps[2]
    with pytest.raises(ValueError):
        limit_gap("B", 0, 1.0, 3)


@settings(max_examples=25, deadline=None)
@given(fam=st.sampled_from(["A", "B", "C", "D"]), r=st.integers(2, 6),
       T=st.floats(0.3, 6.0), tol=st.sampled_from([1e-6, 1e-9]))
def test_certified_bracket(fam, r, T, tol):
    grp = make_group(fam, r)
    coarse = partition_function(grp, 1, T, TruncationPolicy(tol=tol))
    fine = partition_function(grp, 1, T, TruncationPolicy(tol=1e-13))
    assert coarse.tail_bound <= tol * (1 + 1e-9) + 1e-13
    assert coarse.value - 1e-12 <= fine.value + fine.tail_bound
    assert fine.value <= coarse.value + coarse.tail_bound + 1e-12
