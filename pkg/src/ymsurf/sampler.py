"""Monte Carlo checks: Brownian motion on the classical groups and Metropolis sampling.

Brownian motion
    The Lie algebra carries the inner product ``kappa Tr(X^* Y)`` on ``n x n``
    matrices, with ``kappa = N`` for U(N) and SU(N), ``n/2`` for SO(n) and
    ``r`` for Sp(r) acting on ``C^{2r}``.  This is the normalisation under
    which the generator of the motion is half the Laplacian whose
    eigenvalues on characters are the Casimir numbers of
    :func:`ymsurf.weights.casimir`.  Increments are isotropic Gaussians for
    this inner product; the walk multiplies their exponentials (geodesic
    Euler scheme) and re-unitarises after every step.

Metropolis
    The target is the discrete Yang-Mills density ``prod_f p_{a_f}(h_{df})``
    against the product of Haar measures on the edges.  Proposals multiply one
    edge by the exponential of a scaled Lie algebra Gaussian, which is as
    likely as its inverse, so the acceptance ratio is a ratio of heat
    kernels.

Random streams are ``numpy`` generators seeded by
``SeedSequence(entropy=seed, spawn_key=(stream_id,))``.
"""
from __future__ import annotations

import csv
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.linalg import expm
from scipy.stats import kstest

from . import _bounds
from .charcalc import ConjugacyClass, char_values, heat_kernel_eval
from .maps import AreaWeightedMap, LoopWord, validate_and_genus
from .weights import Family, GroupDescriptor, casimir_array, log_dim_array, stratum_array
from .wilson import mf_plane_power

__all__ = [
    "MAX_STEP", "MCMC_RANK_CAP", "RngStream", "McEstimate", "metric_scale", "lie_gaussian",
    "haar_samples", "brownian_samples", "brownian_sample", "LoopRecipe", "recipe_samples", "recipe_estimate", "plane_wilson_mc",
    "unitary_walk_moments", "unitary_bm_moments", "euler_bias_budget", "integrated_autocorr",
    "McmcParams", "McmcResult", "mcmc_ym", "mcmc_chains", "ks_uniform_angles",
]

MAX_STEP = 1e-2
MCMC_RANK_CAP = 2


# ---------------------------------------------------------------------------
# random streams and estimates

@dataclass(frozen=True)
class RngStream:
    """Reproducible random stream identified by ``(seed, stream_id)``."""

    seed: int
    stream_id: int = 0

    def generator(self) -> np.random.Generator:
        ss = np.random.SeedSequence(entropy=int(self.seed), spawn_key=(int(self.stream_id),))
        return np.random.default_rng(ss)


def _generator(rng) -> np.random.Generator:
    if isinstance(rng, np.random.Generator):
        return rng
    if isinstance(rng, RngStream):
        return rng.generator()
    if rng is None or isinstance(rng, (int, np.integer)):
        return RngStream(0 if rng is None else int(rng)).generator()
    raise TypeError(f"cannot build a random generator from {rng!r}")


@dataclass(frozen=True)
class McEstimate:
    """Monte Carlo mean with its standard error.

    ``stderr = sd / sqrt(n_samples / (2 tau))`` where ``tau`` is the
    integrated autocorrelation time, ``1/2`` for independent samples.  For
    complex means the real and imaginary errors are added in quadrature.
    """

    mean: complex
    stderr: float
    n_samples: int
    tau: float = 0.5

    @property
    def n_effective(self) -> float:
        return self.n_samples / (2 * self.tau)

    def deviation(self, ref) -> float:
        return abs(self.mean - ref)

    def agrees(self, ref, sigmas: float = 3.0, budget: float = 0.0) -> bool:
        return self.deviation(ref) <= sigmas * self.stderr + budget


def integrated_autocorr(x, c: float = 5.0) -> float:
    """Integrated autocorrelation time with Sokal's automatic window.

    The window ``W`` is the smallest lag with ``W >= c tau(W)``, where
    ``tau(W) = 1/2 + sum_{t=1}^{W} rho(t)``.
    """
    x = np.asarray(x, dtype=float)
    n = len(x)
    if n < 4:
        return 0.5
    x = x - x.mean()
    f = np.fft.rfft(x, 2 * n)
    acf = np.fft.irfft(f * np.conj(f))[:n]
    if acf[0] <= 0:
        return 0.5
    taus = 0.5 + np.cumsum(acf[1:] / acf[0])
    ok = np.nonzero(np.arange(1, n) >= c * taus)[0]
    tau = taus[ok[0]] if ok.size else taus[-1]
    return max(float(tau), 0.5)


def _estimate(values, correlated: bool) -> McEstimate:
    v = np.asarray(values)
    n = len(v)
    if n < 2:
        raise ValueError("need at least two samples")
    parts = [v.real] + ([v.imag] if np.iscomplexobj(v) else [])
    var, tau = 0.0, 0.5
    for p in parts:
        t = integrated_autocorr(p) if correlated else 0.5
        tau = max(tau, t)
        var += np.var(p, ddof=1) * 2 * t
    mean = complex(v.mean()) if np.iscomplexobj(v) else float(v.mean())
    return McEstimate(mean, math.sqrt(var / n), n, tau)


# ---------------------------------------------------------------------------
# Lie algebra Gaussians, Haar samples and Brownian motion

def metric_scale(group: GroupDescriptor) -> float:
    """``kappa`` in the inner product ``kappa Tr(X^* Y)`` on the Lie algebra."""
    f, n = group.family, group.matrix_size
    if f.is_unitary:
        return float(n)
    if f is Family.SYMPLECTIC:
        return float(group.rank)
    return n / 2.0


def _symplectic_form(r):
    J = np.zeros((2 * r, 2 * r))
    J[:r, r:] = np.eye(r)
    J[r:, :r] = -np.eye(r)
    return J


def lie_gaussian(group: GroupDescriptor, rng, size: int = 1) -> np.ndarray:
    """Isotropic Gaussians in the Lie algebra, shape ``(size, n, n)``.

    The density is proportional to ``exp(-kappa Tr(X^* X) / 2)``, so the
    coordinates on an orthonormal basis are independent standard normals.
    """
    rng = _generator(rng)
    n, kappa, f = group.matrix_size, metric_scale(group), group.family
    if f in (Family.ODD_ORTHOGONAL, Family.EVEN_ORTHOGONAL):
        a = rng.standard_normal((size, n, n)) / math.sqrt(2 * kappa)
        a = np.triu(a, 1)
        return a - a.swapaxes(-1, -2)
    # Hermitian H with density exp(-kappa Tr H^2 / 2); X = i H
    z = (rng.standard_normal((size, n, n)) + 1j * rng.standard_normal((size, n, n))) / math.sqrt(2 * kappa)
    h = np.triu(z, 1)
    h = h + h.conj().swapaxes(-1, -2)
    idx = np.arange(n)
    h[:, idx, idx] = rng.standard_normal((size, n)) / math.sqrt(kappa)
    if f is Family.SPECIAL_UNITARY:
        h[:, idx, idx] -= np.trace(h, axis1=1, axis2=2)[:, None].real / n
    elif f is Family.SYMPLECTIC:
        # orthogonal projection onto the Hermitian part of sp(r)
        J = _symplectic_form(group.rank)
        h = 0.5 * (h - J.T @ h.conj() @ J)
    return 1j * h


def _reunitarise(u, group):
    # one Newton-Schulz step towards the polar factor
    n = u.shape[-1]
    u = 0.5 * u @ (3 * np.eye(n) - u.conj().swapaxes(-1, -2) @ u)
    if group.family is Family.SPECIAL_UNITARY:
        d = np.linalg.det(u)
        u = u * (np.abs(d) / d)[:, None, None] ** (1.0 / n)
    return u


def haar_samples(group: GroupDescriptor, rng, size: int = 1) -> np.ndarray:
    """Independent Haar distributed elements, shape ``(size, n, n)``."""
    rng = _generator(rng)
    n, f = group.matrix_size, group.family
    if f in (Family.ODD_ORTHOGONAL, Family.EVEN_ORTHOGONAL):
        q, r = np.linalg.qr(rng.standard_normal((size, n, n)))
        q = q * np.sign(np.diagonal(r, axis1=1, axis2=2))[:, None, :]
        flip = np.linalg.det(q) < 0
        q[flip, :, 0] *= -1
        return q
    if f is Family.SYMPLECTIC:
        # quaternionic Gram-Schmidt: columns u_j and -J conj(u_j)
        r = group.rank
        J = _symplectic_form(r)
        cols = []
        for _ in range(r):
            v = rng.standard_normal((size, n)) + 1j * rng.standard_normal((size, n))
            for c in cols:
                v = v - np.sum(c.conj() * v, axis=1)[:, None] * c
            v = v / np.linalg.norm(v, axis=1)[:, None]
            cols += [v, -(v.conj() @ J.T)]
        u = np.stack(cols[0::2] + cols[1::2], axis=2)
        return u
    z = (rng.standard_normal((size, n, n)) + 1j * rng.standard_normal((size, n, n))) / math.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r, axis1=1, axis2=2)
    q = q * (d / np.abs(d))[:, None, :]
    if f is Family.SPECIAL_UNITARY:
        det = np.linalg.det(q)
        q = q / (det[:, None, None] ** (1.0 / n))
    return q


def _check_steps(t, n_steps):
    if not t > 0:
        raise ValueError(f"Brownian time must be positive, got {t!r}")
    need = math.ceil(t / MAX_STEP - 1e-9)
    if n_steps is None:
        return need
    if n_steps < need:
        raise ValueError(f"time {t} needs at least {need} steps of size <= {MAX_STEP}")
    return int(n_steps)


def brownian_samples(group: GroupDescriptor, t: float, rng, size: int = 1,
                     n_steps: int | None = None, chunk: int = 256) -> np.ndarray:
    """Independent geodesic Euler approximations of ``B_t``, shape ``(size, n, n)``.

    Each step multiplies by ``exp(sqrt(t / n_steps) X)`` with ``X`` from
    :func:`lie_gaussian` and re-unitarises the product.
    """
    rng = _generator(rng)
    K = _check_steps(t, n_steps)
    s = math.sqrt(t / K)
    n = group.matrix_size
    real = group.family in (Family.ODD_ORTHOGONAL, Family.EVEN_ORTHOGONAL)
    out = []
    for start in range(0, size, chunk):
        m = min(chunk, size - start)
        u = np.broadcast_to(np.eye(n), (m, n, n)).astype(float if real else complex)
        for _ in range(K):
            u = _reunitarise(expm(s * lie_gaussian(group, rng, m)) @ u, group)
        out.append(u)
    return np.concatenate(out)


def brownian_sample(group: GroupDescriptor, t: float, n_steps: int | None = None, rng=None) -> np.ndarray:
    """One geodesic Euler approximation of ``B_t`` as an ``n x n`` matrix.

    Examples
    --------
    >>> from ymsurf.weights import make_group
    >>> b = brownian_sample(make_group("C", 2), 0.5, rng=RngStream(1))
    >>> bool(np.allclose(b.conj().T @ b, np.eye(4), atol=1e-12))
    True
    """
    return brownian_samples(group, t, rng, 1, n_steps)[0]


def _tr(u):
    return np.trace(u, axis1=-2, axis2=-1) / u.shape[-1]


# ---------------------------------------------------------------------------
# exact moments of the unitary Euler walk

def _hermite_functions(N, y):
    psi = np.empty((N, len(y)))
    psi[0] = np.exp(-y * y / 4) / (2 * math.pi) ** 0.25
    if N > 1:
        psi[1] = y * psi[0]
    for k in range(1, N - 1):
        psi[k + 1] = (y * psi[k] - math.sqrt(k) * psi[k - 1]) / math.sqrt(k + 1)
    return psi


def _gue_step_moments(N, s):
    # E p1, E p1^2, E p2 for U = exp(i s H), H with density exp(-N Tr H^2 / 2)
    L = 2 * math.sqrt(N) + 14
    y = np.arange(-L, L + 1e-12, 0.02)
    w = np.full(len(y), 0.02)
    psi = _hermite_functions(N, y)
    f = np.exp(1j * s * y / math.sqrt(N))

    def gram(g):
        return (psi * (g * w)) @ psi.T

    F, F2 = gram(f), gram(f * f)
    p1 = np.trace(F)
    p2 = np.trace(F2)
    p1sq = p2 + p1 * p1 - np.sum(F * F.T)
    return complex(p1), complex(p1sq), complex(p2)


def unitary_walk_moments(N: int, t: float, n_steps: int) -> tuple:
    """Exact ``(E tr B, E tr B^2)`` for the Euler walk on U(N) after time ``t``.

    The law of a step is conjugation invariant, so the walk acts diagonally
    on characters: ``E chi_lam(B) = d_lam m_lam^K`` with
    ``m_lam = E chi_lam(exp(s X)) / d_lam``.  The one-step averages are
    linear statistics of the Gaussian unitary ensemble, computed from the
    Hermite kernel.
    """
    K = _check_steps(t, n_steps)
    p1, p1sq, p2 = _gue_step_moments(N, math.sqrt(t / K))
    m1 = (p1 / N).real
    d2, d11 = N * (N + 1) / 2, N * (N - 1) / 2
    e2 = d2 * (((p1sq + p2) / 2).real / d2) ** K
    if N > 1:
        e2 -= d11 * (((p1sq - p2) / 2).real / d11) ** K
    return m1 ** K, e2 / N


def unitary_bm_moments(N: int, t: float) -> tuple:
    """Exact ``(E tr B_t, E tr B_t^2)`` for Brownian motion on U(N)."""
    return math.exp(-t / 2), math.exp(-t) * (math.cosh(t / N) - N * math.sinh(t / N))


def euler_bias_budget(N: int, t: float, n: int, n_steps: int | None = None) -> float:
    """``|E_walk tr B^n - mu_t(n)|`` for ``|n| <= 2`` on U(N).

    This covers both the time discretisation and the finite ``N`` correction.
    """
    if abs(n) not in (1, 2):
        raise ValueError("the exact walk moments are available for |n| in {1, 2}")
    walk = unitary_walk_moments(N, t, _check_steps(t, n_steps))[abs(n) - 1]
    return abs(walk - mf_plane_power(t, abs(n)))


# ---------------------------------------------------------------------------
# heat kernel tables for repeated evaluation

class _KernelTable:
    """``p_t`` at a fixed time, with the weight set and coefficients cached."""

    def __init__(self, group, t, tol):
        self.group, self.t, self.tol = group, t, tol
        self.rows = None
        if group.family is not Family.UNITARY_TILDE:
            M, _ = _bounds.pick_cutoff(group, t, 2.0, tol)
            rows = np.vstack([stratum_array(group, m) for m in range(M + 1)])
            self.rows = rows
            self.coef = np.exp(-0.5 * t * casimir_array(group, rows) + log_dim_array(group, rows))

    def __call__(self, cls):
        if self.rows is None:
            return max(heat_kernel_eval(self.group, self.t, cls, self.tol), 0.0)
        v = float(np.real(self.coef @ char_values(self.group, self.rows, cls)))
        return max(v, 0.0)


def _holonomy(values, word):
    h = None
    for label, sign in word:
        x = values[label]
        if sign < 0:
            x = x.conj().T
        h = x if h is None else x @ h
    return h


# ---------------------------------------------------------------------------
# planar recipes

@dataclass(frozen=True)
class LoopRecipe:
    """Built-in Wilson loop recipes.

    ``"simple"``
        ``tr(B_t^power)`` for a simple loop enclosing area ``t``.
    ``"example"``
        ``tr(v B_{a3}^2 v^-1 C_{a2}^-1)`` with ``v`` Haar and ``B, C``
        independent Brownian motions; its large-rank limit is
        ``exp(-a2/2 - a3)(1 - a3)``.
    ``"commutator"``
        ``tr([x, y]^power)`` for Haar ``x, y`` reweighted by ``p_T([x, y])``,
        the commutator loop of the one-face torus of area ``T``.
    """

    kind: str
    t: float = 1.0
    power: int = 1
    a2: float = 0.5
    a3: float = 0.5
    T: float = 1.0

    def __post_init__(self):
        if self.kind not in ("simple", "example", "commutator"):
            raise ValueError(f"unknown recipe {self.kind!r}; use 'simple', 'example' or 'commutator'")
        if self.power == 0:
            raise ValueError("power must be nonzero")

    def limit(self) -> float:
        """Large-rank value of the plane recipes."""
        if self.kind == "simple":
            return mf_plane_power(self.t, self.power)
        if self.kind == "example":
            return math.exp(-self.a2 / 2 - self.a3) * (1 - self.a3)
        raise ValueError("the commutator recipe has no plane limit; use wilson.commutator_moment")


def _matrix_power(u, k):
    if k < 0:
        u, k = u.conj().swapaxes(-1, -2), -k
    return np.linalg.matrix_power(u, k)


def recipe_samples(recipe: LoopRecipe, group: GroupDescriptor, n_samples: int, rng,
                   n_steps: int | None = None, tol: float = 1e-10) -> tuple:
    """Per-replica values of a recipe and their importance weights.

    Returns ``(values, weights)``; ``weights`` is ``None`` for the plane
    recipes and ``p_T([x, y])`` for the commutator recipe.
    """
    rng = _generator(rng)
    if n_samples < 2:
        raise ValueError("need at least two samples")
    if recipe.kind == "simple":
        b = brownian_samples(group, recipe.t, rng, n_samples, n_steps)
        return _tr(_matrix_power(b, recipe.power)), None
    if recipe.kind == "example":
        v = haar_samples(group, rng, n_samples)
        b = brownian_samples(group, recipe.a3, rng, n_samples, n_steps)
        c = brownian_samples(group, recipe.a2, rng, n_samples, n_steps)
        w = v @ (b @ b) @ v.conj().swapaxes(-1, -2) @ c.conj().swapaxes(-1, -2)
        return _tr(w), None
    if group.rank > MCMC_RANK_CAP:
        raise ValueError(f"the commutator recipe uses heat kernels and is capped at rank {MCMC_RANK_CAP}")
    x = haar_samples(group, rng, n_samples)
    y = haar_samples(group, rng, n_samples)
    xh, yh = x.conj().swapaxes(-1, -2), y.conj().swapaxes(-1, -2)
    comm = x @ y @ xh @ yh
    kern = _KernelTable(group, recipe.T, tol)
    w = np.array([kern(ConjugacyClass.from_matrix(group, c)) for c in comm])
    return _tr(_matrix_power(comm, recipe.power)), w


def recipe_estimate(values, weights=None) -> McEstimate:
    """Mean and standard error of recipe samples, self-normalised when weighted."""
    if weights is None:
        return _estimate(values, False)
    W = weights.sum()
    mean = complex(np.sum(weights * values) / W)
    # delta method for the self-normalised ratio
    r = weights * (values - mean)
    se = math.sqrt(float(np.sum(np.abs(r) ** 2))) / W
    return McEstimate(mean, float(se), len(values))


def plane_wilson_mc(recipe: LoopRecipe, group: GroupDescriptor, n_samples: int, rng,
                    n_steps: int | None = None, tol: float = 1e-10) -> McEstimate:
    """Monte Carlo estimate of a recipe over independent replicas.

    ``n_steps`` is the number of Euler steps of each Brownian motion; by
    default the smallest count with step at most :data:`MAX_STEP`.
    """
    return recipe_estimate(*recipe_samples(recipe, group, n_samples, rng, n_steps, tol))


# ---------------------------------------------------------------------------
# Metropolis sampling of the discrete Yang-Mills measure

@dataclass(frozen=True)
class McmcParams:
    """Chain length and proposal settings.

    During burn-in the proposal scale is multiplied by 0.7 or 1.4 every
    ``tune_every`` sweeps until the acceptance rate lies in ``target``; it is
    frozen afterwards.  ``max_scale`` caps it when every move is accepted,
    as for abelian groups on a torus.
    """

    n_sweeps: int
    burn_in: int = 500
    proposal_scale: float = 0.5
    tune_every: int = 50
    target: tuple = (0.3, 0.5)
    max_scale: float = 10.0

    def __post_init__(self):
        if self.n_sweeps < 2 or self.burn_in < 0 or self.proposal_scale <= 0 or self.tune_every < 1:
            raise ValueError("invalid chain parameters")


@dataclass
class McmcResult:
    """Per-observable estimates and traces of one or more chains."""

    estimates: dict
    trace: dict = field(repr=False)
    acceptance: float = 0.0
    proposal_scale: float = 0.0

    def write_trace_csv(self, path) -> None:
        """One row per measurement: sweep, observable, real and imaginary parts."""
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["sweep", "observable", "value_re", "value_im"])
            for name, vals in self.trace.items():
                for i, v in enumerate(vals):
                    w.writerow([i, name, repr(float(v.real)), repr(float(v.imag))])


def _prepare(m, group, total_area):
    if m.outer is not None:
        raise ValueError("Metropolis sampling needs a closed map, this one has a marked face")
    validate_and_genus(m)
    if group.rank > MCMC_RANK_CAP:
        raise ValueError(f"Metropolis sampling is capped at rank {MCMC_RANK_CAP}, got {group}")
    areas = np.array(m.areas, dtype=float)
    if total_area is not None:
        areas = areas * (float(total_area) / areas.sum())
    return areas


def mcmc_ym(m: AreaWeightedMap, group: GroupDescriptor, params: McmcParams, rng,
            observables: Sequence = (), total_area: float | None = None, tol: float = 1e-10) -> McmcResult:
    """Metropolis sampler of the discrete Yang-Mills measure on a closed map.

    Parameters
    ----------
    m : AreaWeightedMap
        Closed map; ``total_area`` rescales its areas to that sum if given.
    group : GroupDescriptor
        Rank at most :data:`MCMC_RANK_CAP`.
    params : McmcParams
    rng : RngStream, Generator or int
    observables : sequence of LoopWord or words
        Loops whose Wilson variables ``tr(h_l)`` are recorded after every
        sweep past burn-in.

    Returns
    -------
    McmcResult
        Estimates carry autocorrelation-adjusted standard errors.
    """
    rng = _generator(rng)
    areas = _prepare(m, group, total_area)
    loops = [o if isinstance(o, LoopWord) else LoopWord(o) for o in observables]
    names = [str(lw) for lw in loops]
    n = group.matrix_size
    kernels = {}
    for a in areas:
        kernels.setdefault(float(a), _KernelTable(group, float(a), tol))
    face_kernel = [kernels[float(a)] for a in areas]
    faces = m.faces
    touching = {e: sorted({i for i, w in enumerate(faces) if any(label == e for label, _ in w)})
                for e in m.edges}
    for lw in loops:
        missing = {label for label, _ in lw.word} - set(m.edges)
        if missing:
            raise ValueError(f"observable {lw} uses unknown edges {sorted(missing)}")

    dtype = float if group.family in (Family.ODD_ORTHOGONAL, Family.EVEN_ORTHOGONAL) else complex
    values = {e: np.eye(n, dtype=dtype) for e in m.edges}

    def face_weight(i):
        return face_kernel[i](ConjugacyClass.from_matrix(group, _holonomy(values, faces[i])))

    fw = np.array([face_weight(i) for i in range(len(faces))])
    scale = params.proposal_scale
    lo, hi = params.target
    trace = {name: np.empty(params.n_sweeps, dtype=complex) for name in names}
    accepted = window_acc = window_tot = 0
    total = 0
    for sweep in range(params.burn_in + params.n_sweeps):
        for e in m.edges:
            old = values[e]
            values[e] = expm(scale * lie_gaussian(group, rng, 1)[0]) @ old
            idx = touching[e]
            new = np.array([face_weight(i) for i in idx])
            num, den = float(np.prod(new)), float(np.prod(fw[idx]))
            if num >= den or rng.random() * den < num:
                fw[idx] = new
                window_acc += 1
                if sweep >= params.burn_in:
                    accepted += 1
            else:
                values[e] = old
            window_tot += 1
        if sweep < params.burn_in:
            if (sweep + 1) % params.tune_every == 0:
                rate = window_acc / window_tot
                if rate < lo:
                    scale *= 0.7
                elif rate > hi:
                    scale = min(scale * 1.4, params.max_scale)
                window_acc = window_tot = 0
            continue
        total += len(m.edges)
        k = sweep - params.burn_in
        for name, lw in zip(names, loops):
            trace[name][k] = np.trace(_holonomy(values, lw.word)) / n
    estimates = {name: _estimate(trace[name], True) for name in names}
    return McmcResult(estimates, trace, accepted / max(total, 1), scale)


def _chain(args):
    m, group, params, seed, stream_id, observables, total_area, tol = args
    return mcmc_ym(m, group, params, RngStream(seed, stream_id), observables, total_area, tol)


def mcmc_chains(m: AreaWeightedMap, group: GroupDescriptor, params: McmcParams, seed: int, n_chains: int,
                observables: Sequence = (), total_area: float | None = None, tol: float = 1e-10,
                workers: int = 1) -> McmcResult:
    """Independent chains on streams ``(seed, 0), ..., (seed, n_chains - 1)``.

    The combined mean is the average of the chain means and the error adds the
    chain errors in quadrature.  Chains are reduced in stream order, so the
    result does not depend on ``workers``.
    """
    jobs = [(m, group, params, seed, i, tuple(observables), total_area, tol) for i in range(n_chains)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_chain, jobs))
    else:
        results = [_chain(j) for j in jobs]
    estimates = {}
    for name in results[0].estimates:
        ests = [r.estimates[name] for r in results]
        mean = sum(e.mean for e in ests) / n_chains
        se = math.sqrt(sum(e.stderr ** 2 for e in ests)) / n_chains
        estimates[name] = McEstimate(mean, se, sum(e.n_samples for e in ests), max(e.tau for e in ests))
    trace = {name: np.concatenate([r.trace[name] for r in results]) for name in results[0].trace}
    acc = float(np.mean([r.acceptance for r in results]))
    return McmcResult(estimates, trace, acc, float(np.mean([r.proposal_scale for r in results])))


def ks_uniform_angles(angles, thin: int = 1):
    """Kolmogorov-Smirnov test of eigenangles against the uniform law on the circle."""
    a = np.asarray(angles, dtype=float)[::thin]
    return kstest(np.mod(a / (2 * math.pi), 1.0), "uniform")
