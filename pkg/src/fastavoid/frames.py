"""Basis construction and the modulation product shared by every path.

The modulated velocity E diag(l_r, l_e, ..) E^-1 v never needs an explicit
inverse: writing v = a0 r + t with t in the tangent plane (t orthogonal to n)
gives a0 = <n, v>/<n, r>, so

    modulated = l_e * v + (l_r - l_e) * a0 * r

which holds in any dimension and for both the orthonormal (n == r) and the
oblique analytic frame.
"""

import numpy as np


def unit(v: np.ndarray):
    n = float(np.linalg.norm(v))
    if n == 0.0:
        raise ValueError("cannot normalize a zero vector")
    return v / n, n


def tangent_basis(n: np.ndarray) -> np.ndarray:
    """Orthonormal basis of the hyperplane orthogonal to unit vector n.

    d=2 uses the left-hand perpendicular; d>2 uses a Householder reflection
    that maps e1 onto n, whose remaining columns span the complement. Both
    are deterministic in n.
    """
    d = len(n)
    if d == 2:
        return np.array([[-n[1]], [n[0]]])
    e1 = np.zeros(d)
    e1[0] = 1.0
    u = n - e1 if n[0] >= 0 else n + e1
    nu = float(u @ u)
    if nu < 1e-24:
        H = np.eye(d)
    else:
        H = np.eye(d) - 2.0 * np.outer(u, u) / nu
    return H[:, 1:]


def basis_matrix(r: np.ndarray, n: np.ndarray) -> np.ndarray:
    """Decomposition matrix: first column the unit reference r, remaining
    columns an orthonormal tangent basis of unit normal n."""
    return np.column_stack([r, tangent_basis(n)])


def modulate_velocity(v, r, n, lambda_r, lambda_e):
    """Apply the eigen-stretching in the (r, tangent-of-n) frame to v."""
    rn = float(n @ r)
    a0 = float(n @ v) / rn
    return lambda_e * v + (lambda_r - lambda_e) * a0 * r
