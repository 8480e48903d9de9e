import numpy as np
import pytest
from hypothesis import settings

from bondi_charges.spectral import ScalarField, degrees, n_coeffs

settings.register_profile("default", deadline=None, max_examples=25)
settings.load_profile("default")


def random_field(rng, band, lmin=0, decay=2.0):
    """Random scalar field with coefficients decaying like l^-decay."""
    ell = degrees(band).astype(float)
    coeffs = rng.standard_normal(n_coeffs(band)) * np.maximum(ell, 1.0) ** -decay
    return ScalarField(np.where(ell >= lmin, coeffs, 0.0))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def _orders(band):
    from bondi_charges.spectral import degrees
    ell = degrees(band)
    mu = np.arange(ell.size) - ell * ell - ell
    return ell, mu


def reflect_field(f, pseudo=False):
    """f(pi - theta, phi); pseudo-scalars also change sign."""
    ell, mu = _orders(f.band_limit)
    sign = (-1.0) ** (ell + np.abs(mu))
    return ScalarField(f.coeffs * (-sign if pseudo else sign))


def rotate_field(f, alpha):
    """f(theta, phi - alpha): the field carried along a rotation by alpha about z."""
    ell, mu = _orders(f.band_limit)
    out = f.coeffs.copy()
    for i in np.nonzero(mu > 0)[0]:
        j = i - 2 * mu[i]
        a, b = f.coeffs[i], f.coeffs[j]
        ca, sa = np.cos(mu[i] * alpha), np.sin(mu[i] * alpha)
        out[i], out[j] = a * ca - b * sa, a * sa + b * ca
    return ScalarField(out)


def transform_data(data, op):
    """Apply a field map to every potential; ``op(f, pseudo)``."""
    from bondi_charges.data import BondiData
    return BondiData.from_potentials(op(data.m, False), op(data.N.grad_potential, False),
                                     op(data.N.curl_potential, True), op(data.shear.electric, False),
                                     op(data.shear.magnetic, True), u=data.u)


def z_rotation(alpha):
    c, s = np.cos(alpha), np.sin(alpha)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


ACCEPTANCE_LINES = []


@pytest.fixture
def acceptance():
    """Record one PASS/FAIL line for an acceptance criterion and return the verdict."""
    def record(number, title, ok, detail):
        line = f"criterion {number} {'PASS' if ok else 'FAIL'}: {title} | {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        return ok
    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
