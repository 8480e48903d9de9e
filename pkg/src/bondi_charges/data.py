"""Radiative data on one cut: generators and JSON file I/O."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DataFormatError
from .spectral import (CovectorField, ScalarField, degrees, lm_index, n_coeffs)
from .tensors import TracelessTensor

FORMAT_VERSION = 1


@dataclass(frozen=True, eq=False)
class BondiData:
    """Mass aspect, angular momentum aspect, shear and retarded time of a cut."""

    m: ScalarField
    N: CovectorField
    shear: TracelessTensor
    u: float = 0.0

    def __post_init__(self):
        bands = {self.m.band_limit, self.N.band_limit, self.shear.band_limit}
        if len(bands) != 1:
            raise ValueError(f"fields have different band limits {sorted(bands)}")
        if not math.isfinite(self.u):
            raise ValueError("u must be finite")
        object.__setattr__(self, "u", float(self.u))

    @property
    def band_limit(self):
        return self.m.band_limit

    @classmethod
    def from_potentials(cls, m, grad=None, curl=None, c=None, cbar=None, u=0.0, strict=False):
        """Assemble data from scalar fields, padding everything to one band."""
        parts = [f for f in (m, grad, curl, c, cbar) if f is not None]
        band = max(f.band_limit for f in parts)
        fill = lambda f: ScalarField.zeros(band) if f is None else f.with_band(band)
        shear = TracelessTensor.from_potentials(fill(c), fill(cbar), strict=strict)
        return cls(fill(m), CovectorField(fill(grad), fill(curl)), shear, u)

    def replace(self, **changes):
        kw = dict(m=self.m, N=self.N, shear=self.shear, u=self.u)
        kw.update(changes)
        return BondiData(**kw)


@dataclass(frozen=True)
class ChargeSet:
    """Energy, linear momentum, center of mass and angular momentum."""

    energy: float
    linear_momentum: tuple
    center_of_mass: tuple | None = None
    angular_momentum: tuple | None = None
    diagnostics: dict = field(default_factory=dict)

    def as_dict(self):
        return {
            "energy": self.energy,
            "linear_momentum": list(self.linear_momentum),
            "center_of_mass": None if self.center_of_mass is None else list(self.center_of_mass),
            "angular_momentum": None if self.angular_momentum is None else list(self.angular_momentum),
            "diagnostics": self.diagnostics,
        }


def sin_theta_coefficients(band):
    """Exact harmonic coefficients of sin(theta) up to ``band``.

    Only m = 0 entries are nonzero.  Each is 2 pi times the integral of
    sin(t)^2 Lam_l(cos t) over [0, pi].  The integrand is a trigonometric
    polynomial of degree l + 2, so the trapezoid rule over a full period is
    exact once it has more than l + 2 points.
    """
    n = 2 * band + 8
    t = 2.0 * np.pi * np.arange(n) / n
    weight = np.sin(t) ** 2
    out = np.zeros(n_coeffs(band))
    for l in range(band + 1):
        leg = np.polynomial.legendre.Legendre.basis(l)(np.cos(t))
        norm = math.sqrt((2 * l + 1) / (4.0 * math.pi))
        # the integrand is even about t = pi, so [0, pi] carries half the period
        out[lm_index(l, 0)] = 2.0 * math.pi * norm * math.pi * np.mean(weight * leg)
    return out


def kerr_data(mass, spin, band):
    """Cut of the Kerr solution in Bondi coordinates, band-limited to ``band``.

    m = M, c = -2 a sin(theta), cb = 0, and N = grad g + eps grad h with
    g = 3 M a sin(theta) and h = -3 M a cos(theta), which reproduces
    N_theta = 3 M a cos(theta), N_phi = -3 M a sin^2(theta).
    """
    mass, spin = float(mass), float(spin)
    if not (math.isfinite(mass) and math.isfinite(spin)):
        raise ValueError("mass and spin must be finite")
    if band < 8:
        raise ValueError("Kerr data needs a band limit of at least 8")
    sin_t = ScalarField(sin_theta_coefficients(band))
    m = ScalarField.constant(mass, band)
    c = (-2.0 * spin) * sin_t
    grad = (3.0 * mass * spin) * sin_t.degree_part(1)
    curl = (-3.0 * mass * spin) * ScalarField.eigenfunction(3, band)
    return BondiData.from_potentials(m, grad, curl, c)


def random_data(seed, band, amplitude=1.0, com_frame=True, magnetic=True):
    """Deterministic pseudo-random data with spectra decaying like l^-3.

    With ``com_frame`` the l = 1 part of m is removed and its mean is made
    positive, so the data has zero linear momentum and positive energy.
    """
    rng = np.random.default_rng(seed)
    ell = degrees(band).astype(float)
    decay = amplitude * np.maximum(ell, 1.0) ** -3

    def draw():
        return ScalarField(rng.standard_normal(n_coeffs(band)) * decay)

    m, grad, curl, c, cbar = draw(), draw(), draw(), draw(), draw()
    if not magnetic:
        cbar = ScalarField.zeros(band)
    if com_frame:
        coeffs = np.where(ell == 1, 0.0, m.coeffs)
        coeffs[0] = abs(coeffs[0]) + amplitude * math.sqrt(4.0 * math.pi)
        m = ScalarField(coeffs)
    return BondiData.from_potentials(m, grad, curl, c, cbar)


# ---------------------------------------------------------------------------
# file I/O

_TOP_KEYS = {"version", "bandlimit", "u", "mass_aspect", "angmom_aspect", "shear"}
_SUB_KEYS = {"angmom_aspect": ("grad", "curl"), "shear": ("electric", "magnetic")}


def _entries(field_):
    band = field_.band_limit
    out = []
    for l in range(band + 1):
        for mu in range(-l, l + 1):
            out.append([l, mu, float(field_.coeffs[lm_index(l, mu)])])
    return out


def data_to_document(data):
    return {
        "version": FORMAT_VERSION,
        "bandlimit": data.band_limit,
        "u": data.u,
        "mass_aspect": _entries(data.m),
        "angmom_aspect": {"grad": _entries(data.N.grad_potential),
                          "curl": _entries(data.N.curl_potential)},
        "shear": {"electric": _entries(data.shear.electric),
                  "magnetic": _entries(data.shear.magnetic)},
    }


def write_data(data, path):
    """Write ``data`` as a JSON document (shortest round-trip float repr)."""
    text = json.dumps(data_to_document(data), indent=1, sort_keys=True)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text + "\n")


def _parse_entries(raw, band, name):
    if not isinstance(raw, list):
        raise DataFormatError(f"'{name}' must be a list of [l, mu, value]", name)
    coeffs = np.zeros(n_coeffs(band))
    seen = set()
    for item in raw:
        if not (isinstance(item, list) and len(item) == 3):
            raise DataFormatError(f"'{name}' entry {item!r} is not [l, mu, value]", name)
        l, mu, value = item
        if not (isinstance(l, int) and isinstance(mu, int)) or isinstance(l, bool) or isinstance(mu, bool):
            raise DataFormatError(f"'{name}' entry {item!r} has non-integer indices", name)
        if not isinstance(value, (int, float)) or isinstance(value, bool) or not math.isfinite(value):
            raise DataFormatError(f"'{name}' entry {item!r} has a non-finite value", name)
        if l < 0 or abs(mu) > l:
            raise DataFormatError(f"'{name}' entry {item!r} has an invalid (l, mu)", name)
        if l > band:
            raise DataFormatError(f"'{name}' entry {item!r} exceeds bandlimit {band}", name)
        if (l, mu) in seen:
            raise DataFormatError(f"'{name}' entry ({l}, {mu}) is repeated", name)
        seen.add((l, mu))
        coeffs[lm_index(l, mu)] = float(value)
    return ScalarField(coeffs)


def _require(doc, key, where):
    if key not in doc:
        raise DataFormatError(f"missing field '{where}{key}'", where + key)
    return doc[key]


def document_to_data(doc, strict=False):
    """Validate a parsed JSON document and build BondiData."""
    if not isinstance(doc, dict):
        raise DataFormatError("document must be a JSON object")
    unknown = sorted(set(doc) - _TOP_KEYS)
    if unknown:
        raise DataFormatError(f"unknown field '{unknown[0]}'", unknown[0])
    version = _require(doc, "version", "")
    if version != FORMAT_VERSION:
        raise DataFormatError(f"unsupported version {version!r}", "version")
    band = _require(doc, "bandlimit", "")
    if not isinstance(band, int) or isinstance(band, bool) or band < 0:
        raise DataFormatError("'bandlimit' must be a non-negative integer", "bandlimit")
    u = _require(doc, "u", "")
    if not isinstance(u, (int, float)) or isinstance(u, bool) or not math.isfinite(u):
        raise DataFormatError("'u' must be a finite number", "u")
    m = _parse_entries(_require(doc, "mass_aspect", ""), band, "mass_aspect")
    parts = {}
    for key, subkeys in _SUB_KEYS.items():
        sub = _require(doc, key, "")
        if not isinstance(sub, dict):
            raise DataFormatError(f"'{key}' must be an object", key)
        extra = sorted(set(sub) - set(subkeys))
        if extra:
            raise DataFormatError(f"unknown field '{key}.{extra[0]}'", f"{key}.{extra[0]}")
        for s in subkeys:
            parts[s] = _parse_entries(_require(sub, s, key + "."), band, f"{key}.{s}")
    try:
        return BondiData.from_potentials(m, parts["grad"], parts["curl"], parts["electric"],
                                         parts["magnetic"], u=float(u), strict=strict)
    except ValueError as exc:
        raise DataFormatError(str(exc), "shear") from exc


def read_data(path, strict=False):
    """Read a data document; raises DataFormatError (or OSError) on failure."""
    with open(path, encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise DataFormatError(f"invalid JSON: {exc}") from exc
    return document_to_data(doc, strict=strict)
