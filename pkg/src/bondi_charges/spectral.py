"""Spectral calculus on the round unit sphere.

Scalars are expanded in real orthonormal spherical harmonics

    Y_{l,0}  = Lam_l^0(cos t)
    Y_{l,m}  = sqrt(2) Lam_l^m(cos t) cos(m p)      (m > 0)
    Y_{l,-m} = sqrt(2) Lam_l^m(cos t) sin(m p)

with ``Lam`` the normalized associated Legendre functions *without* the
Condon-Shortley phase, so that the coordinate functions of the embedded
sphere are

    X^1 = sqrt(4 pi / 3) Y_{1,1},  X^2 = sqrt(4 pi / 3) Y_{1,-1},
    X^3 = sqrt(4 pi / 3) Y_{1,0}.

Coefficient vectors are flat, entry ``(l, mu)`` at index ``l*l + l + mu``.

Pointwise work happens on a Gauss-Legendre x uniform grid.  Tangent vectors
and tensors are held by their Cartesian components in the ambient R^3
(arrays with leading axes of length 3), which keeps every quantity smooth
through the poles.  The area form is oriented so that eps(e_theta, e_phi) = +1
in the orthonormal frame.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass

import numpy as np

from .errors import KernelObstruction

EIGEN_NORM = np.sqrt(4.0 * np.pi / 3.0)
# order mu of the l=1 harmonic proportional to X^1, X^2, X^3
EIGEN_ORDER = (1, -1, 0)


def n_coeffs(band):
    return (band + 1) ** 2


def lm_index(l, mu):
    if not 0 <= abs(mu) <= l:
        raise IndexError(f"invalid harmonic index ({l}, {mu})")
    return l * l + l + mu


def band_of_size(size):
    band = int(round(np.sqrt(size))) - 1
    if band < 0 or n_coeffs(band) != size:
        raise ValueError(f"coefficient vector of length {size} is not (L+1)^2")
    return band


@functools.lru_cache(maxsize=None)
def degrees(band):
    """Degree ``l`` of every flat coefficient index up to ``band``."""
    ell = np.concatenate([np.full(2 * l + 1, l) for l in range(band + 1)])
    ell.setflags(write=False)
    return ell


@functools.lru_cache(maxsize=None)
def _packing(band):
    # flat index -> (l, m) slots of the cos / sin coefficient matrices
    cos_l, cos_m, cos_i, sin_l, sin_m, sin_i = [], [], [], [], [], []
    for l in range(band + 1):
        for m in range(l + 1):
            cos_l.append(l)
            cos_m.append(m)
            cos_i.append(l * l + l + m)
            if m > 0:
                sin_l.append(l)
                sin_m.append(m)
                sin_i.append(l * l + l - m)
    return tuple(np.array(a, dtype=np.intp) for a in (cos_l, cos_m, cos_i, sin_l, sin_m, sin_i))


def _pack(coeffs, band):
    cos_l, cos_m, cos_i, sin_l, sin_m, sin_i = _packing(band)
    lead = coeffs.shape[:-1]
    ccos = np.zeros(lead + (band + 1, band + 1))
    csin = np.zeros(lead + (band + 1, band + 1))
    ccos[..., cos_l, cos_m] = coeffs[..., cos_i]
    csin[..., sin_l, sin_m] = coeffs[..., sin_i]
    return ccos, csin


def _unpack(acos, asin, band):
    cos_l, cos_m, cos_i, sin_l, sin_m, sin_i = _packing(band)
    out = np.zeros(acos.shape[:-2] + (n_coeffs(band),))
    out[..., cos_i] = acos[..., cos_l, cos_m]
    out[..., sin_i] = asin[..., sin_l, sin_m]
    return out


def legendre_tables(band, theta):
    """Normalized Legendre functions at colatitudes ``theta``.

    Returns ``(lam, dlam, lam_sin)``, each shaped ``(band+1, band+1, n)`` and
    indexed ``[l, m, j]``: the function, its theta-derivative, and the
    function divided by sin(theta).  The sqrt(2) of the m > 0 real harmonics
    is folded in.  Entries with m > l are zero.  ``lam_sin`` requires
    0 < theta < pi; it is left zero for m = 0 where it is never needed.
    """
    theta = np.asarray(theta, dtype=float)
    x = np.cos(theta)
    s = np.sin(theta)
    n = theta.size
    lam = np.zeros((band + 1, band + 2, n))
    lam[0, 0] = 1.0 / np.sqrt(4.0 * np.pi)
    for m in range(1, band + 1):
        lam[m, m] = np.sqrt((2 * m + 1) / (2.0 * m)) * s * lam[m - 1, m - 1]
    for m in range(band):
        lam[m + 1, m] = np.sqrt(2 * m + 3.0) * x * lam[m, m]
    for l in range(2, band + 1):
        m = np.arange(l - 1)
        a = np.sqrt((4.0 * l * l - 1.0) / (l * l - m * m))
        b = np.sqrt(((l - 1.0) ** 2 - m * m) / (4.0 * (l - 1.0) ** 2 - 1.0))
        lam[l, : l - 1] = a[:, None] * (x * lam[l - 1, : l - 1] - b[:, None] * lam[l - 2, : l - 1])

    dlam = np.zeros((band + 1, band + 1, n))
    ell = np.arange(band + 1)[:, None]
    dlam[:, 0] = -np.sqrt(ell * (ell + 1.0)) * lam[:, 1]
    for m in range(1, band + 1):
        up = np.sqrt(np.clip((ell + m) * (ell - m + 1.0), 0, None))
        down = np.sqrt(np.clip((ell - m) * (ell + m + 1.0), 0, None))
        dlam[:, m] = 0.5 * (up * lam[:, m - 1] - down * lam[:, m + 1])
    lam = lam[:, : band + 1]
    dlam[np.triu_indices(band + 1, 1)] = 0.0

    lam_sin = np.zeros_like(lam)
    if band >= 1:
        lam_sin[:, 1:] = lam[:, 1:] / s
    scale = np.full(band + 1, np.sqrt(2.0))
    scale[0] = 1.0
    scale = scale[None, :, None]
    return lam * scale, dlam * scale, lam_sin * scale


class SphereGrid:
    """Gauss-Legendre (colatitude) x uniform (longitude) quadrature grid.

    ``band_limit`` is the nominal resolution L of the data.  The default
    oversampling (2L+8 colatitudes, 4L+16 longitudes) integrates products of
    two fields of band up to ``max_band = 2L+7`` exactly, which covers every
    quadratic expression in band-L data including several derivatives.
    """

    def __init__(self, band_limit, n_theta=None, n_phi=None):
        L = int(band_limit)
        if L < 0:
            raise ValueError("band limit must be non-negative")
        n_theta = 2 * L + 8 if n_theta is None else int(n_theta)
        n_phi = 4 * L + 16 if n_phi is None else int(n_phi)
        if n_theta < 2 * L + 8 or n_phi < 4 * L + 16:
            raise ValueError(f"grid {n_theta}x{n_phi} too coarse for band limit {L}")
        self.band_limit = L
        self.n_theta = n_theta
        self.n_phi = n_phi
        self.shape = (n_theta, n_phi)
        self.max_band = min(n_theta - 1, (n_phi - 1) // 2)

        x, w = np.polynomial.legendre.leggauss(n_theta)
        order = np.argsort(-x)
        self.theta = np.arccos(x[order])
        self.weights = w[order]
        self.phi = 2.0 * np.pi * np.arange(n_phi) / n_phi
        self.area = self.weights[:, None] * (2.0 * np.pi / n_phi)

        m = np.arange(self.max_band + 1)[:, None]
        self._cos = np.cos(m * self.phi)
        self._sin = np.sin(m * self.phi)

        t, p = np.meshgrid(self.theta, self.phi, indexing="ij")
        st, ct, sp, cp = np.sin(t), np.cos(t), np.sin(p), np.cos(p)
        self.normal = np.stack([st * cp, st * sp, ct])
        self.e_theta = np.stack([ct * cp, ct * sp, -st])
        self.e_phi = np.stack([-sp, cp, np.zeros_like(t)])
        self.metric = np.eye(3)[:, :, None, None] - self.normal[:, None] * self.normal[None, :]
        levi = np.zeros((3, 3, 3))
        levi[0, 1, 2] = levi[1, 2, 0] = levi[2, 0, 1] = 1.0
        levi[0, 2, 1] = levi[2, 1, 0] = levi[1, 0, 2] = -1.0
        # eps_ij = levi_ijk n_k: area form of the sphere in ambient components
        self.area_form = np.einsum("ijk,k...->ij...", levi, self.normal)
        for arr in (self.theta, self.weights, self.phi, self.area, self.normal,
                    self.e_theta, self.e_phi, self.metric, self.area_form):
            arr.setflags(write=False)

    @classmethod
    @functools.lru_cache(maxsize=16)
    def for_band(cls, band_limit):
        """Shared default grid for band-``band_limit`` data."""
        return cls(band_limit)

    def __repr__(self):
        return f"SphereGrid(band_limit={self.band_limit}, n_theta={self.n_theta}, n_phi={self.n_phi})"

    @functools.cached_property
    def _tables(self):
        return legendre_tables(self.max_band, self.theta)

    def _check_band(self, band):
        if band > self.max_band:
            raise ValueError(f"band {band} exceeds grid resolution (max {self.max_band})")

    def integrate(self, values):
        """Quadrature over the sphere of the last two axes."""
        return np.einsum("...jk,jk->...", values, np.broadcast_to(self.area, self.shape))

    def synthesize(self, coeffs):
        coeffs = np.asarray(coeffs, dtype=float)
        band = band_of_size(coeffs.shape[-1])
        self._check_band(band)
        lam = self._tables[0][: band + 1, : band + 1]
        ccos, csin = _pack(coeffs, band)
        a = np.einsum("...lm,lmj->...mj", ccos, lam)
        b = np.einsum("...lm,lmj->...mj", csin, lam)
        return (np.einsum("...mj,mk->...jk", a, self._cos[: band + 1])
                + np.einsum("...mj,mk->...jk", b, self._sin[: band + 1]))

    def synthesize_gradient(self, coeffs):
        """Ambient components (leading axis 3) of the surface gradient."""
        coeffs = np.asarray(coeffs, dtype=float)
        band = band_of_size(coeffs.shape[-1])
        self._check_band(band)
        _, dlam, lam_sin = (t[: band + 1, : band + 1] for t in self._tables)
        cos, sin = self._cos[: band + 1], self._sin[: band + 1]
        m = np.arange(band + 1)[:, None]
        ccos, csin = _pack(coeffs, band)
        d_theta = (np.einsum("...mj,mk->...jk", np.einsum("...lm,lmj->...mj", ccos, dlam), cos)
                   + np.einsum("...mj,mk->...jk", np.einsum("...lm,lmj->...mj", csin, dlam), sin))
        sa = m * np.einsum("...lm,lmj->...mj", ccos, lam_sin)
        sb = m * np.einsum("...lm,lmj->...mj", csin, lam_sin)
        d_phi = np.einsum("...mj,mk->...jk", sb, cos) - np.einsum("...mj,mk->...jk", sa, sin)
        lead = (slice(None),) + (None,) * (coeffs.ndim - 1)
        return self.e_theta[lead] * d_theta[None] + self.e_phi[lead] * d_phi[None]

    def analyze(self, values, band=None):
        """L2 projection of grid values onto degrees <= ``band`` (default max_band)."""
        values = np.asarray(values, dtype=float)
        if values.shape[-2:] != self.shape:
            raise ValueError(f"array shape {values.shape} does not match grid {self.shape}")
        band = self.max_band if band is None else int(band)
        self._check_band(band)
        lam = self._tables[0][: band + 1, : band + 1]
        dphi = 2.0 * np.pi / self.n_phi
        fc = dphi * np.einsum("...jk,mk->...mj", values, self._cos[: band + 1])
        fs = dphi * np.einsum("...jk,mk->...mj", values, self._sin[: band + 1])
        acos = np.einsum("...mj,lmj,j->...lm", fc, lam, self.weights)
        asin = np.einsum("...mj,lmj,j->...lm", fs, lam, self.weights)
        return _unpack(acos, asin, band)

    def analyze_vector(self, vector, band=None):
        """Helmholtz potentials (g, h) of an ambient tangent field V = grad g + eps grad h."""
        vector = np.asarray(vector, dtype=float)
        if vector.shape[0] != 3 or vector.shape[-2:] != self.shape:
            raise ValueError(f"vector shape {vector.shape} does not match grid {self.shape}")
        band = self.band_limit if band is None else int(band)
        self._check_band(band)
        rotated = np.cross(self.normal, vector, axis=0)
        g = self._gradient_pairing(vector, band)
        h = self._gradient_pairing(rotated, band)
        ell = degrees(band)
        div = np.where(ell > 0, ell * (ell + 1.0), 1.0)
        g = np.where(ell > 0, g / div, 0.0)
        h = np.where(ell > 0, h / div, 0.0)
        return g, h

    def _gradient_pairing(self, vector, band):
        # integral of V . grad(Y_lm) for every (l, m)
        _, dlam, lam_sin = (t[: band + 1, : band + 1] for t in self._tables)
        m = np.arange(band + 1)[:, None]
        vt = np.einsum("i...,i...->...", vector, self.e_theta)
        vp = np.einsum("i...,i...->...", vector, self.e_phi)
        dphi = 2.0 * np.pi / self.n_phi
        cos, sin = self._cos[: band + 1], self._sin[: band + 1]
        vtc = dphi * np.einsum("...jk,mk->...mj", vt, cos)
        vts = dphi * np.einsum("...jk,mk->...mj", vt, sin)
        vpc = dphi * np.einsum("...jk,mk->...mj", vp, cos)
        vps = dphi * np.einsum("...jk,mk->...mj", vp, sin)
        w = self.weights
        acos = (np.einsum("...mj,lmj,j->...lm", vtc, dlam, w)
                - np.einsum("...mj,lmj,j->...lm", m * vps, lam_sin, w))
        asin = (np.einsum("...mj,lmj,j->...lm", vts, dlam, w)
                + np.einsum("...mj,lmj,j->...lm", m * vpc, lam_sin, w))
        return _unpack(acos, asin, band)

    def gradient_values(self, values):
        """Surface gradient of band-limited grid values, leading ambient axis."""
        return self.synthesize_gradient(self.analyze(values))


@dataclass(frozen=True, eq=False)
class ScalarField:
    """Real function on the sphere held as harmonic coefficients."""

    coeffs: np.ndarray

    def __post_init__(self):
        arr = np.array(self.coeffs, dtype=float)
        if arr.ndim != 1:
            raise ValueError("coefficients must be a flat vector")
        band_of_size(arr.size)
        if not np.all(np.isfinite(arr)):
            raise ValueError("coefficients must be finite")
        arr.setflags(write=False)
        object.__setattr__(self, "coeffs", arr)

    @property
    def band_limit(self):
        return band_of_size(self.coeffs.size)

    @classmethod
    def zeros(cls, band):
        return cls(np.zeros(n_coeffs(band)))

    @classmethod
    def constant(cls, value, band):
        coeffs = np.zeros(n_coeffs(band))
        coeffs[0] = value * np.sqrt(4.0 * np.pi)
        return cls(coeffs)

    @classmethod
    def from_entries(cls, entries, band):
        coeffs = np.zeros(n_coeffs(band))
        for l, mu, value in entries:
            coeffs[lm_index(l, mu)] = value
        return cls(coeffs)

    @classmethod
    def eigenfunction(cls, i, band):
        """Coordinate function X^i (i = 1, 2, 3) of the unit sphere."""
        return cls.from_entries([(1, EIGEN_ORDER[i - 1], EIGEN_NORM)], max(band, 1))

    def coeff(self, l, mu):
        if l > self.band_limit:
            return 0.0
        return float(self.coeffs[lm_index(l, mu)])

    def with_band(self, band):
        out = np.zeros(n_coeffs(band))
        k = min(out.size, self.coeffs.size)
        out[:k] = self.coeffs[:k]
        return ScalarField(out)

    def degree_part(self, lmin=0, lmax=None):
        """The part of the field with lmin <= l <= lmax."""
        ell = degrees(self.band_limit)
        lmax = self.band_limit if lmax is None else lmax
        return ScalarField(np.where((ell >= lmin) & (ell <= lmax), self.coeffs, 0.0))

    def map_degrees(self, func):
        """Multiply entry (l, mu) by ``func(l)``."""
        return ScalarField(self.coeffs * func(degrees(self.band_limit).astype(float)))

    def values(self, grid):
        return grid.synthesize(self.coeffs)

    def gradient_values(self, grid):
        return grid.synthesize_gradient(self.coeffs)

    def _binary(self, other, op):
        if isinstance(other, ScalarField):
            band = max(self.band_limit, other.band_limit)
            return ScalarField(op(self.with_band(band).coeffs, other.with_band(band).coeffs))
        return NotImplemented

    def __add__(self, other):
        return self._binary(other, np.add)

    def __sub__(self, other):
        return self._binary(other, np.subtract)

    def __neg__(self):
        return ScalarField(-self.coeffs)

    def __mul__(self, scalar):
        if isinstance(scalar, ScalarField):
            return NotImplemented
        return ScalarField(float(scalar) * self.coeffs)

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        return ScalarField(self.coeffs / float(scalar))

    def __repr__(self):
        return f"ScalarField(band_limit={self.band_limit})"


@dataclass(frozen=True, eq=False)
class CovectorField:
    """Tangent 1-form V = grad(g) + eps grad(h), held by its potentials.

    ``(eps grad h)_A = eps_AB grad^B h`` with eps(e_theta, e_phi) = +1.  The
    l = 0 entries of both potentials carry no information and are dropped.
    """

    grad_potential: ScalarField
    curl_potential: ScalarField

    def __post_init__(self):
        band = max(self.grad_potential.band_limit, self.curl_potential.band_limit)
        object.__setattr__(self, "grad_potential", self.grad_potential.with_band(band).degree_part(1))
        object.__setattr__(self, "curl_potential", self.curl_potential.with_band(band).degree_part(1))

    @property
    def band_limit(self):
        return self.grad_potential.band_limit

    @classmethod
    def zeros(cls, band):
        return cls(ScalarField.zeros(band), ScalarField.zeros(band))

    @classmethod
    def from_values(cls, grid, vector, band=None):
        """Helmholtz-decompose ambient tangent components on ``grid``."""
        g, h = grid.analyze_vector(vector, band)
        return cls(ScalarField(g), ScalarField(h))

    def values(self, grid):
        """Ambient components on ``grid`` (leading axis of length 3)."""
        grad = self.grad_potential.gradient_values(grid)
        curl = self.curl_potential.gradient_values(grid)
        return grad + np.cross(curl, grid.normal, axis=0)

    def frame_components(self, grid):
        """Orthonormal-frame components (V_theta, V_phi)."""
        v = self.values(grid)
        return (np.einsum("i...,i...->...", v, grid.e_theta),
                np.einsum("i...,i...->...", v, grid.e_phi))

    def __add__(self, other):
        return CovectorField(self.grad_potential + other.grad_potential,
                             self.curl_potential + other.curl_potential)

    def __mul__(self, scalar):
        return CovectorField(self.grad_potential * scalar, self.curl_potential * scalar)

    __rmul__ = __mul__


def analyze(values, grid, band=None):
    """Project grid values onto harmonics of degree <= ``band``."""
    return ScalarField(grid.analyze(values, band))


def synthesize(field, grid):
    coeffs = field.coeffs if isinstance(field, ScalarField) else np.asarray(field)
    return grid.synthesize(coeffs)


def integrate(field):
    return float(np.sqrt(4.0 * np.pi) * field.coeffs[0])


def inner(f, g):
    """L2 inner product of two scalar fields (Parseval)."""
    band = min(f.band_limit, g.band_limit)
    n = n_coeffs(band)
    return float(np.dot(f.coeffs[:n], g.coeffs[:n]))


def laplacian(f):
    return f.map_degrees(lambda l: -l * (l + 1.0))


def helmholtz_plus_two(f):
    """Apply (Laplacian + 2)."""
    return f.map_degrees(lambda l: 2.0 - l * (l + 1.0))


def gradient(f):
    return CovectorField(f, ScalarField.zeros(f.band_limit))


def skew_gradient(f):
    """eps grad f, the divergence-free field with curl potential f."""
    return CovectorField(ScalarField.zeros(f.band_limit), f)


def divergence(v):
    return laplacian(v.grad_potential)


def curl(v):
    """eps^{AB} grad_B V_A, equal to the Laplacian of the curl potential."""
    return laplacian(v.curl_potential)


def _default_tol(f, tol):
    if tol is not None:
        return tol
    grid = SphereGrid.for_band(f.band_limit)
    return 1e-10 * (1.0 + float(np.max(np.abs(f.values(grid)))))


def invert_helmholtz_plus_two(f, tol=None):
    """Solve (Laplacian + 2) M = f with the l = 1 part of M set to zero.

    Raises KernelObstruction if the l = 1 content of ``f`` exceeds ``tol``
    (default 1e-10 * (1 + max|f|)); below it the l = 1 part is discarded.
    """
    tol = _default_tol(f, tol)
    l1 = np.linalg.norm(f.degree_part(1, 1).coeffs)
    if l1 > tol:
        raise KernelObstruction(f"l=1 content {l1:.3e} exceeds tolerance {tol:.3e}")
    ell = degrees(f.band_limit)
    div = 2.0 - ell * (ell + 1.0)
    return ScalarField(np.where(ell == 1, 0.0, f.coeffs / np.where(ell == 1, 1.0, div)))


def invert_laplacian(f, tol=None):
    """Mean-free solution of Laplacian(u) = f."""
    tol = _default_tol(f, tol)
    mean = abs(f.coeffs[0]) / np.sqrt(4.0 * np.pi)
    if mean > tol:
        raise KernelObstruction(f"mean {mean:.3e} exceeds tolerance {tol:.3e}")
    ell = degrees(f.band_limit)
    return ScalarField(np.where(ell == 0, 0.0, f.coeffs / np.where(ell == 0, 1.0, -ell * (ell + 1.0))))


def evaluate(field, theta, phi):
    """Point values of a scalar field at arbitrary (theta, phi) in the open sphere."""
    theta, phi = np.broadcast_arrays(np.asarray(theta, float), np.asarray(phi, float))
    shape = theta.shape
    band = field.band_limit
    lam, _, _ = legendre_tables(band, theta.ravel())
    ccos, csin = _pack(field.coeffs, band)
    a = np.einsum("lm,lmj->mj", ccos, lam)
    b = np.einsum("lm,lmj->mj", csin, lam)
    m = np.arange(band + 1)[:, None]
    p = phi.ravel()[None, :]
    return np.sum(a * np.cos(m * p) + b * np.sin(m * p), axis=0).reshape(shape)
