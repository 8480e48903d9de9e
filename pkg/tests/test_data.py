import json
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from numpy.testing import assert_allclose

from bondi_charges.charges import bondi_energy, bondi_linear_momentum, charges
from bondi_charges.data import (BondiData, data_to_document, document_to_data, kerr_data,
                                random_data, read_data, sin_theta_coefficients, write_data)
from bondi_charges.errors import DataFormatError
from bondi_charges.spectral import ScalarField, SphereGrid, curl, divergence, evaluate, lm_index

seeds = st.integers(0, 2**32 - 1)


def test_sin_theta_coefficients_match_dense_quadrature():
    band = 12
    x, w = np.polynomial.legendre.leggauss(400)
    t = 0.5 * np.pi * (x + 1)
    coeffs = sin_theta_coefficients(band)
    for l in range(band + 1):
        leg = np.polynomial.legendre.Legendre.basis(l)(np.cos(t))
        norm = math.sqrt((2 * l + 1) / (4 * np.pi))
        oracle = 2 * np.pi * norm * 0.5 * np.pi * np.sum(w * np.sin(t) ** 2 * leg)
        assert_allclose(coeffs[lm_index(l, 0)], oracle, atol=1e-14)
    assert_allclose(coeffs[0], np.pi ** 1.5 / 2, rtol=1e-14)
    # sin(theta) is even under theta -> pi - theta: odd degrees vanish
    assert_allclose(coeffs[[lm_index(l, 0) for l in range(1, band + 1, 2)]], 0.0, atol=1e-15)


def test_kerr_example_values():
    data = kerr_data(2.0, 0.5, 16)
    assert_allclose(bondi_energy(data), 2.0, rtol=1e-14)
    assert_allclose(bondi_linear_momentum(data), 0.0, atol=1e-15)
    assert data.shear.is_closed


def test_kerr_nonrotating_has_only_mass():
    data = kerr_data(1.5, 0.0, 12)
    assert not np.any(data.shear.electric.coeffs)
    assert not np.any(data.N.grad_potential.coeffs)
    assert not np.any(data.N.curl_potential.coeffs)


def test_kerr_rejects_bad_input():
    with pytest.raises(ValueError):
        kerr_data(1.0, 0.5, 4)
    with pytest.raises(ValueError):
        kerr_data(float("nan"), 0.5, 16)


def test_kerr_angmom_aspect_components_converge():
    # N_phi comes from the exact l = 1 curl potential; N_theta is the gradient
    # of sin(theta), which has a conical point at each pole, so it converges
    # algebraically and only away from the poles
    M, a = 2.0, 0.5
    errors = []
    for band in (16, 32, 64, 128):
        grid = SphereGrid.for_band(band)
        nt, np_ = kerr_data(M, a, band).N.frame_components(grid)
        s, c = np.sin(grid.theta)[:, None], np.cos(grid.theta)[:, None]
        assert_allclose(np_, -3 * M * a * s * np.ones(grid.n_phi), atol=1e-13)
        interior = (grid.theta > 0.5) & (grid.theta < np.pi - 0.5)
        errors.append(np.max(np.abs(nt - 3 * M * a * c)[interior]))
    rates = -np.diff(np.log(errors)) / np.log(2)
    assert np.all(rates > 1.0), rates
    assert errors[-1] < 5e-3


def test_kerr_curl_closed_form():
    M, a, band = 2.0, 0.5, 16
    grid = SphereGrid.for_band(band)
    N = kerr_data(M, a, band).N
    assert_allclose(curl(N).values(grid), 6 * M * a * grid.normal[2], atol=1e-13)


def test_kerr_divergence_converges_to_closed_form():
    # div N = 3Ma (1/sin(theta) - 2 sin(theta)), approached away from the poles
    M, a = 1.0, 1.0
    t = np.array([0.7, 1.2, np.pi / 2, 2.5])
    exact = 3 * M * a * (1 / np.sin(t) - 2 * np.sin(t))
    errors = [np.max(np.abs(evaluate(divergence(kerr_data(M, a, band).N), t, 0.0) - exact))
              for band in (16, 32, 64, 128)]
    # 1/sin(theta) is not square integrable: convergence is slow
    assert errors[0] > errors[1] > errors[2] > errors[3]
    assert errors[-1] < 0.5 * errors[0]


def test_random_data_deterministic():
    a, b = random_data(3, 8), random_data(3, 8)
    for f, g in ((a.m, b.m), (a.shear.electric, b.shear.electric), (a.N.curl_potential, b.N.curl_potential)):
        assert np.array_equal(f.coeffs, g.coeffs)
    assert not np.array_equal(random_data(4, 8).m.coeffs, a.m.coeffs)


@given(seeds, st.integers(2, 12))
def test_random_data_in_com_frame(seed, band):
    data = random_data(seed, band)
    assert bondi_energy(data) > 0.9
    assert bondi_linear_momentum(data) == (0.0, 0.0, 0.0)
    assert not np.any(data.shear.electric.degree_part(0, 1).coeffs)


def test_random_data_options():
    data = random_data(1, 6, com_frame=False, magnetic=False)
    assert data.shear.is_closed
    assert np.any(data.m.degree_part(1, 1).coeffs)


def test_band_mismatch_rejected():
    with pytest.raises(ValueError):
        BondiData.from_potentials(ScalarField.zeros(4)).replace(m=ScalarField.zeros(5))


def test_file_roundtrip_bit_exact(tmp_path):
    data = random_data(11, 9).replace(u=-3.25)
    path = tmp_path / "data.json"
    write_data(data, path)
    back = read_data(path)
    assert back.u == -3.25
    pairs = [(data.m, back.m), (data.N.grad_potential, back.N.grad_potential),
             (data.N.curl_potential, back.N.curl_potential),
             (data.shear.electric, back.shear.electric), (data.shear.magnetic, back.shear.magnetic)]
    for f, g in pairs:
        assert np.array_equal(f.coeffs, g.coeffs)


def test_kerr_file_roundtrip_preserves_charges(tmp_path):
    data = kerr_data(2.0, 0.5, 16)
    path = tmp_path / "kerr.json"
    write_data(data, path)
    first, second = charges(data), charges(read_data(path))
    assert first.as_dict() == second.as_dict()


def _document():
    return data_to_document(random_data(0, 4))


def test_missing_field_named():
    doc = _document()
    del doc["mass_aspect"]
    with pytest.raises(DataFormatError) as info:
        document_to_data(doc)
    assert info.value.field == "mass_aspect"
    assert "mass_aspect" in str(info.value)
    doc = _document()
    del doc["shear"]["magnetic"]
    with pytest.raises(DataFormatError) as info:
        document_to_data(doc)
    assert info.value.field == "shear.magnetic"


@pytest.mark.parametrize("mutate, field", [
    (lambda d: d.update(extra=1), "extra"),
    (lambda d: d.update(version=2), "version"),
    (lambda d: d.update(bandlimit=-1), "bandlimit"),
    (lambda d: d.update(u="now"), "u"),
    (lambda d: d["mass_aspect"].append([9, 0, 1.0]), "mass_aspect"),
    (lambda d: d["mass_aspect"].append([0, 0, 1.0]), "mass_aspect"),
    (lambda d: d["mass_aspect"].append([2, 3, 1.0]), "mass_aspect"),
    (lambda d: d["shear"]["electric"].append([3, 1, "x"]), "shear.electric"),
    (lambda d: d["angmom_aspect"].update(twist=[]), "angmom_aspect.twist"),
])
def test_invalid_documents_rejected(mutate, field):
    doc = _document()
    mutate(doc)
    with pytest.raises(DataFormatError) as info:
        document_to_data(doc)
    assert info.value.field == field


def test_sparse_entries_default_to_zero():
    doc = _document()
    doc["shear"]["magnetic"] = []
    assert document_to_data(doc).shear.is_closed


def test_strict_mode_rejects_low_shear():
    doc = _document()
    for entry in doc["shear"]["electric"]:
        if entry[:2] == [1, 0]:
            entry[2] = 0.5
    assert not np.any(document_to_data(doc).shear.electric.degree_part(0, 1).coeffs)
    with pytest.raises(DataFormatError) as info:
        document_to_data(doc, strict=True)
    assert info.value.field == "shear"


def test_invalid_json(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("{not json")
    with pytest.raises(DataFormatError):
        read_data(path)
    with pytest.raises(OSError):
        read_data(tmp_path / "missing.json")


def test_document_is_plain_json():
    text = json.dumps(_document())
    assert json.loads(text)["bandlimit"] == 4
