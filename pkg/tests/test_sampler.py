import csv
import math

import numpy as np
import pytest
from scipy.special import eval_genlaguerre

from ymsurf.maps import AreaWeightedMap, extract_disc, example_torus_map
from ymsurf.sampler import (
    LoopRecipe, McEstimate, McmcParams, RngStream, brownian_sample, brownian_samples, euler_bias_budget,
    haar_samples, integrated_autocorr, ks_uniform_angles, lie_gaussian, mcmc_chains, mcmc_ym,
    metric_scale, plane_wilson_mc, unitary_bm_moments, unitary_walk_moments,
)
from ymsurf.sampler import _estimate, _gue_step_moments, _KernelTable
from ymsurf.charcalc import ConjugacyClass, heat_kernel_eval
from ymsurf.weights import casimir, make_group
from ymsurf.wilson import commutator_moment, mf_plane_power, torus_moments

TORUS = AreaWeightedMap(["b' a' b a"], [2.0], vertex_count=1)
FAMILIES = [("Atilde", 1), ("Atilde", 3), ("A", 2), ("B", 2), ("C", 1), ("C", 2), ("D", 3)]
J2 = np.block([[np.zeros((2, 2)), np.eye(2)], [-np.eye(2), np.zeros((2, 2))]])


def _defining(group):
    return (1,) + (0,) * (group.rank - 1)


def _algebra_dim(group):
    n, f = group.matrix_size, group.family.name
    return {"UNITARY_TILDE": n * n, "SPECIAL_UNITARY": n * n - 1, "SYMPLECTIC": group.rank * (2 * group.rank + 1)
            }.get(f, n * (n - 1) // 2)


# ---------------------------------------------------------------------------
# streams and estimates

def test_streams_are_reproducible_and_distinct():
    a = RngStream(42, 0).generator().standard_normal(5)
    b = RngStream(42, 0).generator().standard_normal(5)
    c = RngStream(42, 1).generator().standard_normal(5)
    assert np.array_equal(a, b)
    assert not np.allclose(a, c)


def test_independent_stderr():
    x = np.arange(10.0)
    e = _estimate(x, False)
    assert e.stderr == pytest.approx(np.std(x, ddof=1) / math.sqrt(10))
    assert e.tau == 0.5 and e.n_effective == 10
    assert McEstimate(1.0, 0.1, 10).agrees(1.25) and not McEstimate(1.0, 0.1, 10).agrees(1.35)


def test_autocorrelation_time():
    rng = np.random.default_rng(0)
    assert integrated_autocorr(rng.standard_normal(20000)) == pytest.approx(0.5, abs=0.05)
    phi = 0.8
    x = np.empty(200000)
    x[0] = 0.0
    eps = rng.standard_normal(len(x))
    for i in range(1, len(x)):
        x[i] = phi * x[i - 1] + eps[i]
    # AR(1): tau = (1 + phi) / (2 (1 - phi))
    assert integrated_autocorr(x) == pytest.approx((1 + phi) / (2 * (1 - phi)), rel=0.1)


# ---------------------------------------------------------------------------
# Lie algebra, Haar measure and Brownian motion

@pytest.mark.parametrize("fam,r", FAMILIES)
def test_lie_gaussian(fam, r):
    g = make_group(fam, r)
    x = lie_gaussian(g, RngStream(1), 4000)
    assert np.allclose(x.conj().swapaxes(-1, -2), -x)
    if fam == "A":
        assert np.allclose(np.trace(x, axis1=1, axis2=2), 0)
    if fam == "C":
        J = np.block([[np.zeros((r, r)), np.eye(r)], [-np.eye(r), np.zeros((r, r))]])
        assert np.allclose(x.swapaxes(-1, -2) @ J + J @ x, 0)
    if fam in ("B", "D"):
        assert np.isrealobj(x)
    # standard normal coordinates on an orthonormal basis: E kappa |X|^2 = dim
    q = metric_scale(g) * np.sum(np.abs(x) ** 2, axis=(1, 2))
    d = _algebra_dim(g)
    assert q.mean() == pytest.approx(d, abs=4 * math.sqrt(2 * d / 4000))


@pytest.mark.parametrize("fam,r", FAMILIES)
def test_haar_samples(fam, r):
    g = make_group(fam, r)
    n = g.matrix_size
    u = haar_samples(g, RngStream(2), 4000)
    assert np.abs(u.conj().swapaxes(-1, -2) @ u - np.eye(n)).max() < 1e-12
    if fam in ("A", "B", "D"):
        assert np.allclose(np.linalg.det(u), 1)
    if fam == "C" and r == 2:
        assert np.abs(u.swapaxes(-1, -2) @ J2 @ u - J2).max() < 1e-12
    tr = np.trace(u, axis1=1, axis2=2)
    # the defining representation is irreducible and nontrivial
    assert abs(tr.mean()) < 4 * math.sqrt(1 / 4000)
    m2 = np.abs(tr) ** 2
    assert m2.mean() == pytest.approx(1.0, abs=4 * m2.std() / math.sqrt(4000))


def test_circle_brownian_mean():
    g = make_group("Atilde", 1)
    t = 1.0
    b = brownian_samples(g, t, RngStream(3), 100000)[:, 0, 0]
    se = b.real.std() / math.sqrt(len(b))
    assert abs(b.real.mean() - math.exp(-t / 2)) < 3 * se
    # exactly unit modulus
    assert np.abs(np.abs(b) - 1).max() < 1e-12


@pytest.mark.parametrize("fam,r", FAMILIES)
def test_brownian_matches_casimir(fam, r):
    # E tr(B_t) = exp(-t c / 2) for the defining representation; the walk bias is O(t dt)
    g = make_group(fam, r)
    t = 0.8
    b = brownian_samples(g, t, RngStream(4), 3000)
    n = g.matrix_size
    assert np.abs(b.conj().swapaxes(-1, -2) @ b - np.eye(n)).max() < 1e-10
    tr = np.trace(b, axis1=1, axis2=2).real / n
    ref = math.exp(-t * casimir(g, _defining(g)) / 2)
    assert abs(tr.mean() - ref) < 4 * tr.std() / math.sqrt(len(tr)) + 1e-3


def test_brownian_checks_and_single_sample():
    g = make_group("C", 2)
    b = brownian_sample(g, 0.5, rng=RngStream(1))
    assert b.shape == (4, 4)
    assert np.abs(b.T @ J2 @ b - J2).max() < 1e-10
    assert np.array_equal(b, brownian_sample(g, 0.5, rng=RngStream(1)))
    with pytest.raises(ValueError):
        brownian_sample(g, 0.0)
    with pytest.raises(ValueError):
        brownian_sample(g, 1.0, n_steps=50)


def test_small_time_contraction():
    g = make_group("Atilde", 3)
    grid = [0.05, 0.1, 0.2, 0.4]
    gaps = []
    for s in grid:
        tr = np.trace(brownian_samples(g, s, RngStream(5), 3000), axis1=1, axis2=2).real / 3
        gaps.append(1 - tr.mean())
    assert all(a < b for a, b in zip(gaps, gaps[1:]))
    c = max(gp / s for gp, s in zip(gaps, grid))
    assert all(gp <= c * s for gp, s in zip(gaps, grid))
    # the exact contraction is 1 - exp(-s/2) <= s/2
    assert c == pytest.approx(0.5, abs=0.1)


# ---------------------------------------------------------------------------
# exact moments of the Euler walk

@pytest.mark.parametrize("N", [1, 2, 5, 20])
def test_gue_step_against_laguerre(N):
    s = 0.25
    p1, _, p2 = _gue_step_moments(N, s)
    lag = math.exp(-s * s / (2 * N)) * eval_genlaguerre(N - 1, 1, s * s / N)
    assert p1.real == pytest.approx(lag, abs=1e-12)
    lag2 = math.exp(-4 * s * s / (2 * N)) * eval_genlaguerre(N - 1, 1, 4 * s * s / N)
    assert p2.real == pytest.approx(lag2, abs=1e-12)


def test_walk_moments_limits():
    # circle: the walk is exact; quadrature rounding (~1e-14 per step) compounds over 100 steps
    m1, m2 = unitary_walk_moments(1, 1.0, 100)
    assert m1 == pytest.approx(math.exp(-0.5), abs=1e-10)
    assert m2 == pytest.approx(math.exp(-2.0), abs=1e-10)
    exact = unitary_bm_moments(6, 1.0)
    err = [np.abs(np.subtract(unitary_walk_moments(6, 1.0, K), exact)).max() for K in (100, 400)]
    assert err[1] < err[0] / 3
    assert euler_bias_budget(50, 1.0, 2) < 1e-3
    with pytest.raises(ValueError):
        euler_bias_budget(50, 1.0, 3)


def test_walk_moments_by_simulation():
    N, t, K = 4, 1.0, 100
    b = brownian_samples(make_group("Atilde", N), t, RngStream(6), 4000, n_steps=K)
    m1, m2 = unitary_walk_moments(N, t, K)
    tr1 = np.trace(b, axis1=1, axis2=2).real / N
    tr2 = np.trace(b @ b, axis1=1, axis2=2).real / N
    assert abs(tr1.mean() - m1) < 3 * tr1.std() / math.sqrt(len(b))
    assert abs(tr2.mean() - m2) < 3 * tr2.std() / math.sqrt(len(b))


# ---------------------------------------------------------------------------
# recipes

def test_simple_recipe():
    g = make_group("Atilde", 10)
    for n in (1, 2):
        rec = LoopRecipe("simple", t=1.0, power=n)
        e = plane_wilson_mc(rec, g, 1000, RngStream(10 + n))
        assert e.agrees(mf_plane_power(1.0, n), 3, euler_bias_budget(10, 1.0, n))
        assert e.agrees(unitary_walk_moments(10, 1.0, 100)[n - 1], 3)
    tiny = plane_wilson_mc(LoopRecipe("simple", t=1e-3), g, 50, RngStream(1))
    assert abs(tiny.mean - 1) < 1e-3


def test_example_recipe():
    N = 10
    rec = LoopRecipe("example", a2=0.5, a3=0.5)
    e = plane_wilson_mc(rec, make_group("Atilde", N), 1000, RngStream(20))
    # the Haar conjugation factorises the expectation into two walk moments
    walk = unitary_walk_moments(N, 0.5, 50)
    assert e.agrees(walk[1] * walk[0], 3)
    assert rec.limit() == pytest.approx(math.exp(-0.75) * 0.5, abs=1e-15)


def test_commutator_recipe():
    g = make_group("C", 1)
    e = plane_wilson_mc(LoopRecipe("commutator", T=1.0), g, 8000, RngStream(30))
    assert e.agrees(commutator_moment(g, 1.0, 1), 3)
    c = plane_wilson_mc(LoopRecipe("commutator", T=1.0), make_group("Atilde", 1), 20, RngStream(1))
    assert c.mean == pytest.approx(1.0, abs=1e-12)
    with pytest.raises(ValueError):
        plane_wilson_mc(LoopRecipe("commutator"), make_group("C", 3), 10, RngStream(1))
    with pytest.raises(ValueError):
        LoopRecipe("figure-eight")
    with pytest.raises(ValueError):
        LoopRecipe("commutator").limit()


# ---------------------------------------------------------------------------
# Metropolis

@pytest.mark.parametrize("fam,r,T", [("C", 1, 0.7), ("B", 2, 1.3), ("A", 2, 0.9), ("Atilde", 1, 0.5)])
def test_kernel_table_matches_heat_kernel(fam, r, T):
    g = make_group(fam, r)
    tab = _KernelTable(g, T, 1e-11)
    rng = np.random.default_rng(0)
    for _ in range(5):
        th = rng.uniform(-3, 3, g.n_coords)
        if fam == "A":
            th[-1] = -th[:-1].sum()
        cls = ConjugacyClass(th)
        assert tab(cls) == pytest.approx(max(heat_kernel_eval(g, T, cls, 1e-11), 0.0), abs=1e-9)


def test_circle_torus_uniform():
    res = mcmc_ym(TORUS, make_group("Atilde", 1), McmcParams(4000, burn_in=300), RngStream(40), ["a"])
    e = res.estimates["a"]
    assert e.agrees(0.0, 3)
    assert ks_uniform_angles(np.angle(res.trace["a"]), thin=max(1, round(2 * e.tau))).pvalue > 0.01


def test_symplectic_torus_matches_character_sum():
    g = make_group("C", 1)
    res = mcmc_ym(TORUS, g, McmcParams(12000, burn_in=600), RngStream(41), ["a a"])
    e = res.estimates["a a"]
    assert e.agrees(torus_moments(g, 2.0, 2)[0], 3)


def test_refinement_invariance():
    # split the torus face by a contractible loop t; areas add up to the same total
    g = make_group("C", 1)
    split = AreaWeightedMap(["b' a' b a t", "t'"], [1.2, 0.8], vertex_count=1)
    p = McmcParams(8000, burn_in=600)
    a = mcmc_ym(TORUS, g, p, RngStream(50), ["a a"]).estimates["a a"]
    b = mcmc_ym(split, g, p, RngStream(51), ["a a"]).estimates["a a"]
    assert abs(a.mean - b.mean) <= 3 * math.hypot(a.stderr, b.stderr)


def test_tuning_reaches_band():
    res = mcmc_ym(TORUS, make_group("C", 1), McmcParams(400, burn_in=600), RngStream(3), ["a"], total_area=0.2)
    assert 0.25 <= res.acceptance <= 0.55


def test_determinism_chains_and_csv(tmp_path):
    g = make_group("C", 1)
    p = McmcParams(300, burn_in=100)
    a = mcmc_ym(TORUS, g, p, RngStream(9, 2), ["a", "b a"])
    b = mcmc_ym(TORUS, g, p, RngStream(9, 2), ["a", "b a"])
    assert a.estimates == b.estimates
    c1 = mcmc_chains(TORUS, g, p, 9, 2, ["a"])
    c2 = mcmc_chains(TORUS, g, p, 9, 2, ["a"], workers=2)
    assert c1.estimates == c2.estimates
    assert c1.estimates["a"].n_samples == 600
    path = tmp_path / "trace.csv"
    a.write_trace_csv(path)
    rows = list(csv.DictReader(open(path)))
    assert len(rows) == 600
    assert float(rows[0]["value_re"]) == a.trace["a"][0].real


def test_mcmc_rejections():
    g = make_group("C", 1)
    p = McmcParams(10, burn_in=0)
    with pytest.raises(ValueError):
        mcmc_ym(TORUS, make_group("C", 3), p, RngStream(1))
    planar = extract_disc(example_torus_map(), ["F2", "F3"]).map
    with pytest.raises(ValueError):
        mcmc_ym(planar, g, p, RngStream(1))
    with pytest.raises(ValueError):
        mcmc_ym(TORUS, g, p, RngStream(1), ["z"])
    with pytest.raises(ValueError):
        McmcParams(1)
