"""Symmetric traceless 2-tensors on the unit sphere.

A traceless tensor is stored through its two scalar potentials,

    C_AB = F_AB[c] + Fb_AB[cb],
    F_AB[c]   = (grad_A grad_B - 1/2 sigma_AB Lap) c,
    Fb_AB[cb] = 1/2 (eps_AD grad^D grad_B cb + eps_BD grad^D grad_A cb),

with both potentials supported in degrees l >= 2 (the map is blind to
l <= 1).  Pointwise work uses ambient Cartesian components on a
:class:`SphereGrid`: a tangent k-tensor is an array with k leading axes of
length 3 followed by the grid axes.  Covariant derivatives are surface
gradients of every Cartesian component followed by tangential projection of
the original indices; the new index is put first, so ``D[a, b, d]`` holds
grad_A T_BD.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass

import numpy as np

from .spectral import (CovectorField, ScalarField, SphereGrid, helmholtz_plus_two,
                       laplacian)

_LETTERS = "abcdefgh"


@dataclass(frozen=True, eq=False)
class TracelessTensor:
    """Symmetric traceless tensor held by electric and magnetic potentials."""

    electric: ScalarField
    magnetic: ScalarField

    def __post_init__(self):
        band = max(self.electric.band_limit, self.magnetic.band_limit)
        object.__setattr__(self, "electric", self.electric.with_band(band))
        object.__setattr__(self, "magnetic", self.magnetic.with_band(band))
        for name in ("electric", "magnetic"):
            low = getattr(self, name).degree_part(0, 1).coeffs
            if np.any(low != 0.0):
                raise ValueError(f"{name} potential has l <= 1 content; "
                                 "use TracelessTensor.from_potentials")

    @classmethod
    def from_potentials(cls, c, cbar=None, strict=False):
        """Build from potentials, dropping their l <= 1 part.

        With ``strict`` any l <= 1 content raises ValueError instead.
        """
        if cbar is None:
            cbar = ScalarField.zeros(c.band_limit)
        if strict:
            for name, f in (("electric", c), ("magnetic", cbar)):
                if np.any(f.degree_part(0, 1).coeffs != 0.0):
                    raise ValueError(f"{name} potential has l <= 1 content")
        return cls(c.degree_part(2), cbar.degree_part(2))

    @classmethod
    def zeros(cls, band):
        return cls(ScalarField.zeros(band), ScalarField.zeros(band))

    @property
    def band_limit(self):
        return self.electric.band_limit

    @property
    def is_closed(self):
        """True when the magnetic potential vanishes identically."""
        return not np.any(self.magnetic.coeffs)

    def values(self, grid):
        """Ambient components, shape (3, 3, n_theta, n_phi)."""
        return ShearGeometry(self, grid).C


# ---------------------------------------------------------------------------
# ambient calculus

def ambient_derivative(arr, grid):
    """Surface gradient of every Cartesian component; new axis first."""
    return grid.synthesize_gradient(grid.analyze(arr))


def project(arr, grid, axes):
    """Apply the tangential projector to the listed tensor axes."""
    for ax in axes:
        arr = np.moveaxis(np.einsum("ij...,j...->i...", grid.metric,
                                    np.moveaxis(arr, ax, 0)), 0, ax)
    return arr


def covariant_derivative(arr, grid):
    """grad_A T_{B...} of a tangent tensor given by ambient components."""
    rank = arr.ndim - 2
    return project(ambient_derivative(arr, grid), grid, range(1, rank + 1))


def vector_divergence(vec, grid):
    """grad^A V_A of an ambient tangent vector, as grid values."""
    return np.einsum("ii...->...", ambient_derivative(vec, grid))


def tensor_divergence(tensor, grid):
    """grad^A T_AB of an ambient tangent 2-tensor, as ambient grid values."""
    d = ambient_derivative(tensor, grid)
    return project(np.einsum("iij...->j...", d), grid, [0])


def rotate(arr, grid, axis=0):
    """Apply the area form to one index: (eps T)_A = eps_AB T_B."""
    moved = np.moveaxis(arr, axis, 0)
    out = np.einsum("ij...,j...->i...", grid.area_form, moved)
    return np.moveaxis(out, 0, axis)


def dot(u, v):
    """Pointwise contraction of two ambient vectors."""
    return np.einsum("i...,i...->...", u, v)


def apply(tensor, vec):
    """(T . V)_A = T_AB V_B pointwise."""
    return np.einsum("ij...,j...->i...", tensor, vec)


def double_dot(s, t):
    """S_AB T_AB pointwise."""
    return np.einsum("ij...,ij...->...", s, t)


def gradient_values(f, grid):
    return grid.synthesize_gradient(f.coeffs)


def hessian_values(f, grid):
    return covariant_derivative(gradient_values(f, grid), grid)


def _electric(hess, grid):
    trace = np.einsum("ii...->...", hess)
    return hess - 0.5 * grid.metric * trace


def _magnetic(hess, grid):
    rot = rotate(hess, grid, 0)
    return 0.5 * (rot + np.swapaxes(rot, 0, 1))


class ShearGeometry:
    """Lazily evaluated pointwise quantities of a traceless tensor on a grid."""

    def __init__(self, tensor, grid):
        if tensor.band_limit + 4 > grid.max_band:
            raise ValueError(f"tensor band {tensor.band_limit} exceeds grid resolution")
        self.tensor = tensor
        self.grid = grid

    @functools.cached_property
    def grad_c(self):
        return gradient_values(self.tensor.electric, self.grid)

    @functools.cached_property
    def grad_cbar(self):
        return gradient_values(self.tensor.magnetic, self.grid)

    @functools.cached_property
    def hess_c(self):
        return covariant_derivative(self.grad_c, self.grid)

    @functools.cached_property
    def hess_cbar(self):
        return covariant_derivative(self.grad_cbar, self.grid)

    @functools.cached_property
    def third_cbar(self):
        """grad_E grad_A grad_D cb, indexed [E, A, D]."""
        return covariant_derivative(self.hess_cbar, self.grid)

    @functools.cached_property
    def F(self):
        return _electric(self.hess_c, self.grid)

    @functools.cached_property
    def Fbar(self):
        return _magnetic(self.hess_cbar, self.grid)

    @functools.cached_property
    def C(self):
        return self.F + self.Fbar

    @functools.cached_property
    def dF(self):
        return covariant_derivative(self.F, self.grid)

    @functools.cached_property
    def dFbar(self):
        return covariant_derivative(self.Fbar, self.grid)

    @functools.cached_property
    def dC(self):
        return self.dF + self.dFbar

    @functools.cached_property
    def d2C(self):
        """grad_E grad_A C_BD, indexed [E, A, B, D]."""
        return covariant_derivative(self.dC, self.grid)

    @functools.cached_property
    def div_F(self):
        return np.einsum("iij...->j...", self.dF)

    @functools.cached_property
    def div_Fbar(self):
        return np.einsum("iij...->j...", self.dFbar)

    @functools.cached_property
    def div_C(self):
        return self.div_F + self.div_Fbar

    @functools.cached_property
    def ddC(self):
        """grad^A grad^B C_AB from the pointwise derivatives."""
        return vector_divergence(self.div_C, self.grid)

    @functools.cached_property
    def CC(self):
        return double_dot(self.C, self.C)


def geometry(tensor, grid=None):
    if grid is None:
        grid = SphereGrid.for_band(tensor.band_limit)
    return ShearGeometry(tensor, grid)


# ---------------------------------------------------------------------------
# operations

def tensor_components(tensor, grid):
    """Orthonormal-frame components (T_tt, T_tp); T_pp = -T_tt."""
    c = ShearGeometry(tensor, grid).C
    e_t, e_p = grid.e_theta, grid.e_phi
    tt = np.einsum("i...,ij...,j...->...", e_t, c, e_t)
    tp = np.einsum("i...,ij...,j...->...", e_t, c, e_p)
    return tt, tp


def coordinate_components(tensor, grid):
    """Coordinate components (C_tt, C_tp, C_pp) in (theta, phi)."""
    tt, tp = tensor_components(tensor, grid)
    s = np.sin(grid.theta)[:, None]
    return tt, s * tp, -s * s * tt


def frame_to_ambient(theta_theta, theta_phi, grid, phi_phi=None):
    """Ambient components of a tangent 2-tensor given in the orthonormal frame."""
    if phi_phi is None:
        phi_phi = -theta_theta
    e_t, e_p = grid.e_theta, grid.e_phi
    outer = lambda u, v: u[:, None] * v[None, :]
    return (outer(e_t, e_t) * theta_theta + (outer(e_t, e_p) + outer(e_p, e_t)) * theta_phi
            + outer(e_p, e_p) * phi_phi)


def div_tensor(tensor):
    """grad^B C_AB in closed form: potentials 1/2 (Lap + 2) c and 1/2 (Lap + 2) cb."""
    return CovectorField(0.5 * helmholtz_plus_two(tensor.electric),
                         0.5 * helmholtz_plus_two(tensor.magnetic))


def double_divergence(tensor):
    """grad^A grad^B C_AB = 1/2 Lap (Lap + 2) c."""
    return 0.5 * laplacian(helmholtz_plus_two(tensor.electric))


def contract(first, second, grid=None):
    """Pointwise S_AB T^AB, re-projected on the grid's full band."""
    if grid is None:
        grid = SphereGrid.for_band(max(first.band_limit, second.band_limit))
    s = ShearGeometry(first, grid).C
    t = s if second is first else ShearGeometry(second, grid).C
    return ScalarField(grid.analyze(double_dot(s, t)))


def decompose_shear(components, grid, band=None, tol=1e-8):
    """Recover potentials (c, cb) from orthonormal-frame grid components.

    ``components`` is either a pair ``(T_tt, T_tp)`` or a full (2, 2, ...)
    array ``[[T_tt, T_tp], [T_pt, T_pp]]``.  The divergence of the tensor is
    Helmholtz-decomposed and the closed form of :func:`div_tensor` inverted.

    Returns ``(tensor, residual)`` where ``residual`` is the L-infinity
    mismatch between the input and the recovered tensor's components.
    Raises ValueError when the input is not symmetric and traceless to
    ``tol`` relative to its size.
    """
    comps = np.asarray(components, dtype=float)
    if comps.shape[:2] == (2, 2):
        tt, tp, pt, pp = comps[0, 0], comps[0, 1], comps[1, 0], comps[1, 1]
    elif comps.shape[0] == 2:
        tt, tp = comps
        pt, pp = tp, -tt
    else:
        raise ValueError("expected (T_tt, T_tp) or a (2, 2, ...) component array")
    scale = max(float(np.max(np.abs(comps))), 1e-300)
    if np.max(np.abs(tp - pt)) > tol * scale:
        raise ValueError("tensor is not symmetric")
    if np.max(np.abs(tt + pp)) > tol * scale:
        raise ValueError("tensor is not traceless")
    band = grid.band_limit if band is None else int(band)
    amb = frame_to_ambient(tt, 0.5 * (tp + pt), grid, pp)
    g, h = grid.analyze_vector(tensor_divergence(amb, grid), band)

    def invert(pot):
        f = ScalarField(pot).degree_part(2)
        return f.map_degrees(lambda l: np.where(l >= 2, 2.0 / (2.0 - l * (l + 1.0) + (l < 2)), 0.0))

    tensor = TracelessTensor(invert(g), invert(h))
    rtt, rtp = tensor_components(tensor, grid)
    residual = float(max(np.max(np.abs(rtt - tt)), np.max(np.abs(rtp - tp))))
    return tensor, residual


def r2_values(geom):
    """R2 as grid values, evaluated term by term from its defining expression."""
    g = geom.grid
    C, dC = geom.C, geom.dC
    cc = geom.CC
    # grad_A C_BD grad^B C^AD
    cross = np.einsum("abd...,bad...->...", dC, dC)
    lap_cc = g.synthesize(-_eig(g) * g.analyze(cc))
    # C^AB grad^D C_BD + C^BD grad_B C_D^A
    vec = apply(C, geom.div_C) + np.einsum("bd...,bda...->a...", C, dC)
    full = np.einsum("abd...,abd...->...", dC, dC)
    return 0.5 * cc + 0.5 * cross + 0.25 * lap_cc - vector_divergence(vec, g) - 0.25 * full


@functools.lru_cache(maxsize=None)
def _eig_cached(max_band):
    from .spectral import degrees
    ell = degrees(max_band).astype(float)
    return ell * (ell + 1.0)


def _eig(grid):
    return _eig_cached(grid.max_band)


def lap_values(values, grid):
    """Laplacian of grid values (band-limited to the grid's capacity)."""
    return grid.synthesize(-_eig(grid) * grid.analyze(values))


def r2_scalar(tensor, grid=None):
    """R2 scalar curvature coefficient of the shear, as a ScalarField."""
    geom = geometry(tensor, grid)
    return ScalarField(geom.grid.analyze(r2_values(geom)))


def magical_identity(tensor, grid=None):
    """Pointwise residual of 1/2 R2 + 1/4 div(C . div C) + 1/16 Lap(C:C).

    Returns ``(residual, scale)``: the L-infinity norm of the expression and
    the largest L-infinity norm among its three terms and |C|^2.
    """
    geom = geometry(tensor, grid)
    g = geom.grid
    terms = [0.5 * r2_values(geom),
             0.25 * vector_divergence(apply(geom.C, geom.div_C), g),
             lap_values(geom.CC, g) / 16.0]
    total = terms[0] + terms[1] + terms[2]
    scale = max([float(np.max(np.abs(t))) for t in terms] + [float(np.max(np.abs(geom.CC)))])
    return float(np.max(np.abs(total))), scale


def _relative(lhs, rhs, scale):
    diff = float(np.max(np.abs(lhs - rhs)))
    denom = max(float(np.max(np.abs(lhs))), float(np.max(np.abs(rhs))), scale)
    if denom == 0.0:
        return 0.0 if diff == 0.0 else np.inf
    return diff / denom


def interchange_residuals(tensor, grid=None):
    """Relative L-infinity residuals of the derivative-interchange identities.

    Keys ``one`` .. ``five`` and ``combined``.  Each entry is
    max|LHS - RHS| / max(max|LHS|, max|RHS|, max|C|) with 0/0 read as 0.
    """
    geom = geometry(tensor, grid)
    g = geom.grid
    P, eps = g.metric, g.area_form
    scale = float(np.max(np.abs(geom.C)))
    out = {}

    dF = geom.dF
    lhs = dF - np.swapaxes(dF, 0, 1)
    dv = geom.div_F
    rhs = dv[None, :, None] * P[:, None, :] - dv[:, None, None] * P[None, :, :]
    out["one"] = _relative(lhs, rhs, scale)

    dFb = geom.dFbar
    lhs = dFb - np.swapaxes(dFb, 0, 1)
    rough = np.einsum("eed...->d...", geom.third_cbar)
    gcb = geom.grad_cbar
    # eps_DA grad_B cb arranged as [A, B, D]
    eps_da = np.swapaxes(eps, 0, 1)
    rhs = (-0.5 * eps[:, :, None] * rough[None, None]
           + 0.5 * eps_da[:, None, :] * gcb[None, :, None]
           - 0.5 * eps_da[None, :, :] * gcb[:, None, None])
    out["two"] = _relative(lhs, rhs, scale)

    d2 = geom.d2C
    lhs = (np.einsum("dabd...->ab...", d2) + np.einsum("dbad...->ab...", d2)
           - np.einsum("eeab...->ab...", d2))
    rhs = P * geom.ddC + 2.0 * geom.C
    out["three"] = _relative(lhs, rhs, scale)

    lhs = np.einsum("ab...,abd...->d...", eps, dF)
    rhs = rotate(geom.div_F, g)
    out["four"] = _relative(lhs, rhs, scale)

    lhs = np.einsum("ab...,abd...->d...", eps, dFb)
    half = 0.5 * helmholtz_plus_two(tensor.magnetic)
    rhs = -gradient_values(half, g)
    out["five"] = _relative(lhs, rhs, scale)

    lhs = np.einsum("ab...,abd...->d...", eps, geom.dC)
    rhs = rotate(geom.div_C, g)
    out["combined"] = _relative(lhs, rhs, scale)
    return out
