"""Direct evaluation of the unreduced limit integrals.

Everything here is computed from pointwise expansion coefficients of the
mean curvature norms and the connection current, without the integration
by parts that produces the closed forms in :mod:`bondi_charges.charges`.
Agreement between the two modules checks the reduction end to end.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .charges import _require_frame, rotation_values, solve_embedding
from .spectral import CovectorField, SphereGrid, divergence, helmholtz_plus_two, laplacian
from .tensors import (ShearGeometry, apply, covariant_derivative, dot, double_divergence, double_dot,
                      hessian_values, lap_values, r2_values, rotate, vector_divergence)


@dataclass(frozen=True, eq=False)
class ExpansionCoefficients:
    """Grid values of the expansion coefficients used by the limit integrals.

    ``H_m3`` and ``H0_m3_weak`` are the r^-3 coefficients of the physical
    and reference mean curvature norms; the latter has its X^(j,-1) term
    replaced by the trace of the second-order metric defect, which leaves
    every integral against X^i unchanged.  ``j1`` holds the r^-1
    connection current in its unsubstituted form, built from Helmholtz
    potentials.  ``j1_values`` is the same expression assembled pointwise
    from grid derivatives of the shear (``j1_scalar`` and ``j1_ddc`` are its
    scalar part and div div C), and ``j1_reduced`` is the pointwise closed
    form -1/2 div Fb.
    """

    grid: SphereGrid
    H_m3: np.ndarray
    H0_m3_weak: np.ndarray
    deltasigma_trace: np.ndarray
    j1: CovectorField
    j1_values: np.ndarray
    j1_reduced: np.ndarray
    j1_scalar: np.ndarray
    j1_ddc: np.ndarray

    @property
    def j1_form_difference(self):
        """max |j1 - (-1/2 div Fb)| over the grid."""
        return float(np.max(np.abs(self.j1.values(self.grid) - self.j1_reduced)))

    @property
    def j1_divergence(self):
        """max |div j1| over the grid, from the potentials."""
        return float(np.max(np.abs(divergence(self.j1).values(self.grid))))

    @property
    def j1_pointwise_divergence(self):
        """Pointwise div of ``j1_values`` relative to its largest term.

        The grid route differentiates the shear up to six times, so its
        rounding error grows like L^6; it is reported against the size of
        the terms that cancel.
        """
        g = self.grid
        terms = [vector_divergence(g.synthesize_gradient(g.analyze(self.j1_scalar)), g),
                 -0.5 * self.j1_ddc]
        scale = max(float(np.max(np.abs(t))) for t in terms)
        total = float(np.max(np.abs(vector_divergence(self.j1_values, g))))
        return 0.0 if scale == 0.0 else total / scale


class _Workspace:
    """Pointwise ingredients shared by the limit integrands."""

    def __init__(self, data, emb, grid):
        self.data, self.emb, self.grid = data, emb, grid
        g = grid
        self.geom = geom = ShearGeometry(data.shear, g)
        self.m = data.m.values(g)
        self.grad_m = data.m.gradient_values(g)
        self.lap_m = laplacian(data.m).values(g)
        self.N = data.N.values(g)
        self.div_N = vector_divergence(self.N, g)
        self.c = data.shear.electric.values(g)
        self.lap_c = laplacian(data.shear.electric).values(g)
        self.p2c = helmholtz_plus_two(data.shear.electric).values(g)
        self.grad_cb = data.shear.magnetic.gradient_values(g)
        self.skew_cb = rotate(self.grad_cb, g)
        self.grad_lap_cb = laplacian(data.shear.magnetic).gradient_values(g)
        self.grad_p2cb = helmholtz_plus_two(data.shear.magnetic).gradient_values(g)
        self.X0 = emb.X0.values(g)
        self.grad_X0 = emb.X0.gradient_values(g)
        self.lap_X0 = laplacian(emb.X0).values(g)
        self.hess_X0 = hessian_values(emb.X0, g)
        self.Xi = np.stack([x.values(g) for x in emb.Xi])
        self.grad_Xi = np.stack([x.gradient_values(g) for x in emb.Xi])
        self.n = g.normal
        self.rot = rotation_values(g)

    def pair_eigen(self, scalar):
        """int X^i f for i = 1, 2, 3."""
        return self.grid.integrate(self.n * scalar)

    def pair_rotation(self, vec):
        """int Y_k . V for k = 1, 2, 3."""
        return self.grid.integrate(np.einsum("ki...,i...->k...", self.rot, vec))


def _workspace(data, emb, tol, grid):
    report = _require_frame(data, tol)
    grid = SphereGrid.for_band(data.band_limit) if grid is None else grid
    if emb is None:
        emb = solve_embedding(data, tol, grid=grid)
    return report.energy, _Workspace(data, emb, grid)


def _coefficients(ws):
    g, geom, u = ws.grid, ws.geom, ws.data.u
    C, div_C, ddC, CC = geom.C, geom.div_C, geom.ddC, geom.CC
    lap_CC = lap_values(CC, g)
    d_div_C = covariant_derivative(div_C, g)
    H = (CC / 8.0 - lap_CC / 32.0
         + 0.75 * (4.0 / 3.0 * ws.div_N + 4.0 * u / 3.0 * ws.lap_m - lap_CC / 8.0)
         - 0.25 * double_dot(C, d_div_C)
         - 0.5 * vector_divergence(apply(C, div_C), g)
         - 0.5 * r2_values(geom)
         - ws.m ** 2 - ddC ** 2 / 16.0 + 0.5 * ws.m * ddC)

    trace = 0.5 * CC - np.einsum("ji...,ji...->...", ws.grad_Xi, ws.grad_Xi) + dot(ws.grad_X0, ws.grad_X0)
    H0 = (-0.25 * ws.lap_X0 ** 2 + trace
          - 0.5 * vector_divergence(apply(C, geom.div_F), g)
          - 0.5 * dot(div_C, geom.div_Fbar)
          - 0.5 * double_dot(C, geom.Fbar)
          + dot(ws.grad_lap_cb, ws.grad_lap_cb) / 16.0
          + 0.25 * dot(div_C, div_C))

    scalar = ws.m - 0.25 * ddC - 0.5 * (ws.lap_X0 + 2.0 * ws.X0)
    j1_values = g.synthesize_gradient(g.analyze(scalar)) - 0.5 * div_C

    d, emb = ws.data, ws.emb
    pot = (d.m - 0.25 * double_divergence(d.shear) - 0.5 * helmholtz_plus_two(emb.X0)
           - 0.25 * helmholtz_plus_two(d.shear.electric))
    j1 = CovectorField(pot, -0.25 * helmholtz_plus_two(d.shear.magnetic))
    return ExpansionCoefficients(g, H, H0, trace, j1, j1_values, -0.5 * geom.div_Fbar,
                                 scalar, ddC)


def compute_coefficients(data, emb=None, tol=1e-10, grid=None):
    """Expansion coefficients of com-frame data (raises FrameError otherwise)."""
    _, ws = _workspace(data, emb, tol, grid)
    return _coefficients(ws)


def _com(e, ws, coeffs):
    integrand = (ws.n * (coeffs.H0_m3_weak - coeffs.H_m3) + 2.0 * ws.m * ws.Xi
                 - 2.0 * coeffs.j1_values * ws.X0)
    return tuple(float(x) for x in ws.grid.integrate(integrand) / (8.0 * math.pi * e))


def _angmom_integrand(ws):
    geom = ws.geom
    C = geom.C
    return (-ws.N + 2.0 * ws.m * ws.grad_X0
            + 0.25 * apply(C, geom.div_C)
            + 0.5 * apply(C, ws.grad_X0)
            + 0.5 * apply(ws.hess_X0, geom.div_F)
            + 0.5 * apply(ws.hess_X0, ws.skew_cb)
            + 0.5 * apply(geom.Fbar, geom.div_Fbar)
            - 0.5 * rotate(apply(geom.hess_cbar, geom.div_Fbar), ws.grid))


def com_via_limit(data, emb=None, tol=1e-10, grid=None):
    """Center of mass from the unreduced limit integral."""
    e, ws = _workspace(data, emb, tol, grid)
    return _com(e, ws, _coefficients(ws))


def angmom_via_limit(data, emb=None, tol=1e-10, grid=None):
    """Angular momentum from the unreduced limit integral."""
    _, ws = _workspace(data, emb, tol, grid)
    return tuple(float(x) for x in -ws.pair_rotation(_angmom_integrand(ws)) / (8.0 * math.pi))


def _entry(lhs, rhs, data_scale):
    lhs, rhs = np.asarray(lhs, float), np.asarray(rhs, float)
    diff = np.abs(lhs - rhs)
    scale = max(float(np.max(np.abs(lhs))), float(np.max(np.abs(rhs))), data_scale)
    relative = 0.0 if scale == 0.0 else float(np.max(diff)) / scale
    return {"lhs": lhs.tolist(), "rhs": rhs.tolist(), "abs": diff.tolist(),
            "scale": scale, "relative": relative}


def lemma_residuals(data, emb=None, tol=1e-10, grid=None):
    """Both sides of each reduction step, integrated separately.

    Returns a map from lemma name to ``{"lhs", "rhs", "abs", "scale",
    "relative"}``; ``lhs``/``rhs``/``abs`` hold one value per component and
    ``relative`` is max(abs) / max(|lhs|, |rhs|, data scale) with data scale
    (max|m| + max|C| + max|N|)^2.
    """
    _, ws = _workspace(data, emb, tol, grid)
    coeffs = _coefficients(ws)
    g, geom = ws.grid, ws.geom
    C, F, Fb = geom.C, geom.F, geom.Fbar
    div_F, div_Fb, div_C = geom.div_F, geom.div_Fbar, geom.div_C
    ddC, CC = geom.ddC, geom.CC
    m = ws.m
    data_scale = (float(np.max(np.abs(m))) + float(np.max(np.abs(C)))
                  + float(np.max(np.abs(ws.N)))) ** 2
    hess_cb = geom.hess_cbar
    out = {}

    lhs = ws.pair_eigen(coeffs.deltasigma_trace - 0.25 * ws.lap_X0 ** 2)
    rhs = ws.pair_eigen(0.25 * CC + 0.25 * double_dot(Fb, Fb) - 0.25 * double_dot(hess_cb, hess_cb)
                        - 0.5 * dot(div_F, ws.skew_cb) - 0.25 * dot(ws.grad_cb, ws.grad_cb)
                        - ddC ** 2 / 16.0 - m ** 2 + 0.5 * m * ws.p2c + 0.5 * m * ddC)
    out["x_minus_one"] = _entry(lhs, rhs, data_scale)

    magic = (0.5 * r2_values(geom) + 0.25 * vector_divergence(apply(C, div_C), g)
             + lap_values(CC, g) / 16.0)
    out["magical_identity"] = _entry(ws.pair_eigen(magic), np.zeros(3), data_scale)

    lhs = ws.pair_eigen(-0.25 * double_dot(Fb, Fb) - 0.25 * double_dot(hess_cb, hess_cb)
                        - 0.25 * dot(ws.grad_cb, ws.grad_cb) - 0.5 * dot(div_Fb, div_Fb)
                        + 0.5 * vector_divergence(apply(Fb, div_Fb), g)
                        + dot(ws.grad_lap_cb, ws.grad_lap_cb) / 16.0)
    rhs = ws.pair_eigen(-dot(ws.grad_p2cb, ws.grad_p2cb) / 16.0)
    out["fbar_fbar"] = _entry(lhs, rhs, data_scale)

    lhs = ws.pair_eigen(-0.5 * dot(div_F, ws.skew_cb) - 0.5 * dot(div_F, div_Fb)
                        + 0.5 * vector_divergence(apply(F, div_Fb), g)
                        - 0.5 * double_dot(F, Fb))
    rhs = ws.pair_eigen(-0.25 * double_dot(F, Fb) - dot(div_F, div_Fb))
    out["f_fbar"] = _entry(lhs, rhs, data_scale)

    lhs = g.integrate(2.0 * m * ws.Xi - 2.0 * coeffs.j1_values * ws.X0)
    rhs = g.integrate(ws.n * (0.5 * dot(div_F, div_Fb) + 2.0 * ws.c * m - 0.5 * ws.lap_c * m)
                      - ws.c * ws.grad_m + 2.0 * m * ws.skew_cb)
    out["last_two_terms"] = _entry(lhs, rhs, data_scale)

    lhs = ws.pair_rotation(-2.0 * m * ws.grad_X0 - 0.5 * apply(C, ws.grad_X0)
                           - 0.5 * apply(ws.hess_X0, div_F) - 0.5 * apply(ws.hess_X0, ws.skew_cb))
    rhs = ws.pair_rotation(-ws.c * ws.grad_m + 0.25 * ws.lap_X0 * ws.skew_cb)
    out["ang_x0"] = _entry(lhs, rhs, data_scale)

    lhs = ws.pair_rotation(-0.25 * apply(C, div_C) - 0.5 * apply(Fb, div_Fb)
                           + 0.5 * rotate(apply(hess_cb, div_Fb), g))
    rhs = ws.pair_rotation(-0.25 * apply(F, div_Fb) - 0.25 * apply(Fb, div_F))
    out["ang_shear_alone"] = _entry(lhs, rhs, data_scale)

    out["top_order"] = _entry(ws.pair_rotation(div_Fb), np.zeros(3), data_scale)
    return out
