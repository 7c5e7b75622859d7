"""Weyl-integration quadrature used as an independent oracle in the tests.

Class functions are integrated over the maximal torus against the squared
Weyl denominator, on a uniform periodic grid.  The trapezoid rule on such a
grid is exact for trigonometric polynomials of degree below the grid size,
so integrals of products of characters come out exact up to rounding.
"""
import itertools

import numpy as np

from ymsurf.weights import Family


def weyl_density(group, theta):
    """Unnormalised Weyl density ``|Delta(z)|^2`` at rows of torus angles."""
    z = np.exp(1j * theta)
    k = z.shape[1]
    f = group.family
    w = np.ones(len(z))
    for i, j in itertools.combinations(range(k), 2):
        w = w * np.abs(z[:, i] - z[:, j]) ** 2
        if not f.is_unitary:
            w = w * np.abs(z[:, i] - np.conj(z[:, j])) ** 2
    if f is Family.ODD_ORTHOGONAL:
        w = w * np.prod(np.abs(z - 1.0) ** 2, axis=1)
    elif f is Family.SYMPLECTIC:
        w = w * np.prod(np.abs(z * z - 1.0) ** 2, axis=1)
    return w


def torus_grid(group, points=48):
    """Grid of torus angles and normalised Haar weights for class functions."""
    k = group.n_coords
    ax = 2 * np.pi * np.arange(points) / points
    if group.family is Family.SPECIAL_UNITARY:
        # last angle fixed by the determinant
        theta = np.array(list(itertools.product(ax, repeat=k - 1)))
        theta = np.hstack([theta, -theta.sum(axis=1, keepdims=True)])
    else:
        theta = np.array(list(itertools.product(ax, repeat=k)))
    w = weyl_density(group, theta)
    return theta, w / w.sum()


def power_trace(group, theta, k):
    """``Tr(g^k)`` in the defining representation."""
    c = np.exp(1j * k * theta)
    if group.family.is_unitary:
        return c.sum(axis=1)
    out = 2 * np.cos(k * theta).sum(axis=1)
    if group.family is Family.ODD_ORTHOGONAL:
        out = out + 1.0
    return out
