"""Bondi energy-momentum, center of mass and angular momentum at null infinity."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .data import ChargeSet
from .errors import FrameError
from .spectral import (EIGEN_NORM, EIGEN_ORDER, CovectorField, ScalarField, SphereGrid,
                       helmholtz_plus_two, laplacian, skew_gradient)
from .tensors import ShearGeometry, apply, div_tensor, double_divergence, double_dot, dot

FOUR_PI = 4.0 * math.pi
DEFAULT_FRAME_TOL = 1e-10


def eigen_coefficient(f, i):
    """int f X^i for i = 1, 2, 3."""
    return EIGEN_NORM * f.coeff(1, EIGEN_ORDER[i - 1])


def rotation_fields(band):
    """Rotation Killing fields Y_{2,3}, Y_{3,1}, Y_{1,2} as covector fields.

    Y_{i,j} = X^i grad X^j - X^j grad X^i = eps grad X^k for cyclic (i, j, k),
    i.e. curl potential +X^k.  The field for k = 3 is d/d(phi).
    """
    zero = ScalarField.zeros(max(band, 1))
    return tuple(CovectorField(zero, ScalarField.eigenfunction(k, band)) for k in (1, 2, 3))


def rotation_values(grid):
    """Ambient values of the three rotation fields: e_k x n."""
    basis = np.eye(3)[:, :, None, None]
    return np.stack([np.cross(basis[k], grid.normal, axis=0) for k in range(3)])


def bondi_energy(data):
    """e = (1/4 pi) int m."""
    return float(data.m.coeffs[0] / math.sqrt(FOUR_PI))


def bondi_linear_momentum(data):
    """p^i = (1/4 pi) int m X^i."""
    return tuple(float(eigen_coefficient(data.m, i) / FOUR_PI) for i in (1, 2, 3))


@dataclass(frozen=True)
class FrameReport:
    """Outcome of the center-of-mass frame check."""

    passed: bool
    energy: float
    linear_momentum: tuple
    tolerance: float
    reason: str

    def as_dict(self):
        return {"passed": self.passed, "energy": self.energy,
                "linear_momentum": list(self.linear_momentum),
                "tolerance": self.tolerance, "reason": self.reason}


def check_com_frame(data, tol=DEFAULT_FRAME_TOL):
    """Pass iff |p| <= tol (1 + e) and e > tol."""
    e = bondi_energy(data)
    p = bondi_linear_momentum(data)
    pnorm = math.sqrt(sum(x * x for x in p))
    if pnorm > tol * (1.0 + abs(e)):
        names = ", ".join(f"p{i + 1}={p[i]:.6g}" for i in range(3) if abs(p[i]) > tol * (1.0 + abs(e)) / 3)
        reason = f"nonzero linear momentum ({names or f'|p|={pnorm:.6g}'})"
        return FrameReport(False, e, p, tol, reason)
    if not e > tol:
        return FrameReport(False, e, p, tol, f"non-positive energy e={e:.6g}")
    return FrameReport(True, e, p, tol, "ok")


def _require_frame(data, tol):
    report = check_com_frame(data, tol)
    if not report.passed:
        raise FrameError(report.reason)
    return report


@dataclass(frozen=True, eq=False)
class EmbeddingLevelZero:
    """Leading corrections of the optimal isometric embedding.

    ``M`` solves (Lap + 2) M = 2m with zero l = 1 part (plus ``l1_shift``
    times X^i when requested), ``X0 = M - 1/4 (Lap + 2) c`` and ``Xi`` are
    the three spatial corrections.  ``first_order_residual`` is the
    L-infinity norm of Lap (Lap + 2) X0 - Lap(2m) + 1/2 (Lap + 2) div div C,
    each term evaluated separately, divided by max(1, largest term norm).
    """

    M: ScalarField
    X0: ScalarField
    Xi: tuple
    first_order_residual: float


def solve_embedding(data, tol=DEFAULT_FRAME_TOL, l1_shift=None, grid=None):
    """Solve for M, X0 and X^i; raises FrameError outside the com frame."""
    _require_frame(data, tol)
    band = data.band_limit
    grid = SphereGrid.for_band(band) if grid is None else grid
    ell_one = (2.0 * data.m).degree_part(1, 1)
    source = 2.0 * data.m - ell_one
    ell = np.arange(band + 1)
    divisor = np.repeat(2.0 - ell * (ell + 1.0), 2 * ell + 1)
    M = ScalarField(np.where(divisor == 0.0, 0.0, source.coeffs / np.where(divisor == 0.0, 1.0, divisor)))
    if l1_shift is not None:
        for i, f in enumerate(l1_shift, start=1):
            M = M + float(f) * ScalarField.eigenfunction(i, band)
    c, cbar = data.shear.electric, data.shear.magnetic
    X0 = M - 0.25 * helmholtz_plus_two(c)

    potential = CovectorField(c, cbar).values(grid)
    lap_c = laplacian(c).values(grid)
    Xi = tuple(ScalarField(grid.analyze(0.5 * potential[i] - 0.25 * lap_c * grid.normal[i], band + 1))
               for i in range(3))

    ddc = double_divergence(data.shear)
    terms = [laplacian(helmholtz_plus_two(X0)).values(grid),
             -laplacian(2.0 * data.m).values(grid),
             0.5 * helmholtz_plus_two(ddc).values(grid)]
    scale = max(1.0, *(float(np.max(np.abs(t))) for t in terms))
    residual = float(np.max(np.abs(terms[0] + terms[1] + terms[2]))) / scale
    return EmbeddingLevelZero(M, X0, Xi, residual)


def _context(data, tol, grid):
    report = _require_frame(data, tol)
    grid = SphereGrid.for_band(data.band_limit) if grid is None else grid
    return report.energy, grid


def center_of_mass(data, tol=DEFAULT_FRAME_TOL, grid=None):
    """Center of mass at null infinity of com-frame data with positive energy."""
    e, grid = _context(data, tol, grid)
    m, c, cbar = data.m, data.shear.electric, data.shear.magnetic
    n = grid.normal
    m_v, c_v = m.values(grid), c.values(grid)
    grad_m = m.gradient_values(grid)
    grad_cb = cbar.gradient_values(grid)
    grad_p2cb = helmholtz_plus_two(cbar).gradient_values(grid)
    div = div_tensor(data.shear)
    div_f = div.grad_potential.gradient_values(grid)
    div_fb = CovectorField(ScalarField.zeros(data.band_limit), div.curl_potential).values(grid)
    geom = ShearGeometry(data.shear, grid)

    spectral = np.array([2.0 * eigen_coefficient(data.N.grad_potential, i) for i in (1, 2, 3)])
    pointwise = (-c_v * grad_m
                 + 3.0 * n * c_v * m_v
                 + 2.0 * np.cross(grad_cb, n, axis=0) * m_v
                 - n * dot(grad_p2cb, grad_p2cb) / 16.0
                 - 0.5 * n * dot(div_f, div_fb)
                 - 0.25 * n * double_dot(geom.F, geom.Fbar))
    total = spectral + grid.integrate(pointwise)
    return tuple(float(x) for x in total / (8.0 * math.pi * e))


def center_of_mass_closed(data, tol=DEFAULT_FRAME_TOL, grid=None):
    """Reduced center of mass for closed shear (magnetic potential ignored)."""
    e, grid = _context(data, tol, grid)
    m, c = data.m, data.shear.electric
    c_v, m_v = c.values(grid), m.values(grid)
    spectral = np.array([2.0 * eigen_coefficient(data.N.grad_potential, i) for i in (1, 2, 3)])
    pointwise = -c_v * m.gradient_values(grid) + 3.0 * grid.normal * c_v * m_v
    return tuple(float(x) for x in (spectral + grid.integrate(pointwise)) / (8.0 * math.pi * e))


def center_of_mass_static(data, tol=DEFAULT_FRAME_TOL):
    """Reduced center of mass for closed shear and constant mass aspect."""
    report = _require_frame(data, tol)
    spectral = [2.0 * eigen_coefficient(data.N.grad_potential, i) for i in (1, 2, 3)]
    return tuple(float(x / (8.0 * math.pi * report.energy)) for x in spectral)


def _angmom_spectral(data):
    return np.array([2.0 * eigen_coefficient(data.N.curl_potential, k) for k in (1, 2, 3)])


def angular_momentum(data, tol=DEFAULT_FRAME_TOL, grid=None, embedding=None):
    """Angular momentum at null infinity of com-frame data with positive energy."""
    _, grid = _context(data, tol, grid)
    if embedding is None:
        embedding = solve_embedding(data, tol, grid=grid)
    c, cbar = data.shear.electric, data.shear.magnetic
    rot = rotation_values(grid)
    div = div_tensor(data.shear)
    zero = ScalarField.zeros(data.band_limit)
    div_f = CovectorField(div.grad_potential, zero).values(grid)
    div_fb = CovectorField(zero, div.curl_potential).values(grid)
    geom = ShearGeometry(data.shear, grid)
    skew_cb = skew_gradient(cbar).values(grid)
    w = (-c.values(grid) * data.m.gradient_values(grid)
         + 0.25 * laplacian(embedding.X0).values(grid) * skew_cb
         - 0.25 * apply(geom.F, div_fb)
         - 0.25 * apply(geom.Fbar, div_f))
    total = _angmom_spectral(data) + grid.integrate(np.einsum("ki...,i...->k...", rot, w))
    return tuple(float(x) for x in total / (8.0 * math.pi))


def angular_momentum_closed(data, tol=DEFAULT_FRAME_TOL, grid=None):
    """Reduced angular momentum for closed shear."""
    _, grid = _context(data, tol, grid)
    w = -data.shear.electric.values(grid) * data.m.gradient_values(grid)
    rot = rotation_values(grid)
    total = _angmom_spectral(data) + grid.integrate(np.einsum("ki...,i...->k...", rot, w))
    return tuple(float(x) for x in total / (8.0 * math.pi))


def angular_momentum_static(data, tol=DEFAULT_FRAME_TOL):
    """Reduced angular momentum for closed shear and constant mass aspect."""
    _require_frame(data, tol)
    return tuple(float(x) for x in _angmom_spectral(data) / (8.0 * math.pi))


def charges(data, tol=DEFAULT_FRAME_TOL, grid=None):
    """All charges; C and J are left as None when the frame check fails."""
    report = check_com_frame(data, tol)
    diagnostics = {"frame": report.as_dict()}
    if not report.passed:
        diagnostics["withheld"] = f"center of mass and angular momentum not computed: {report.reason}"
        return ChargeSet(report.energy, report.linear_momentum, None, None, diagnostics)
    grid = SphereGrid.for_band(data.band_limit) if grid is None else grid
    emb = solve_embedding(data, tol, grid=grid)
    com = center_of_mass(data, tol, grid)
    J = angular_momentum(data, tol, grid, emb)
    shift = abs(report.energy)
    shifted = solve_embedding(data, tol, l1_shift=(shift, shift, shift), grid=grid)
    J_shift = angular_momentum(data, tol, grid, shifted)
    diagnostics["first_order_residual"] = emb.first_order_residual
    diagnostics["kernel_l1_content"] = float(np.linalg.norm((2.0 * data.m).degree_part(1, 1).coeffs))
    diagnostics["angmom_l1_shift"] = [shift, shift, shift]
    diagnostics["angmom_l1_shift_sensitivity"] = float(max(abs(a - b) for a, b in zip(J, J_shift)))
    return ChargeSet(report.energy, report.linear_momentum, com, J, diagnostics)
