"""Seeded verification suites shared by the CLI and the acceptance tests."""

from __future__ import annotations

import numpy as np

from .charges import angular_momentum, center_of_mass, solve_embedding
from .data import random_data
from .limits import angmom_via_limit, com_via_limit, compute_coefficients, lemma_residuals
from .spectral import SphereGrid
from .tensors import interchange_residuals, magical_identity

SUITES = ("identities", "lemmas", "limits")
DEFAULT_TOLERANCE = {"identities": 1e-9, "lemmas": 1e-9, "limits": 1e-8}
# u-independence and the first-order equations are checked at this level
# whatever the suite tolerance
OIEE_TOLERANCE = 1e-10


def relative_difference(a, b):
    """max|a - b| / max(max|a|, max|b|), with 0/0 read as 0."""
    a, b = np.asarray(a, float), np.asarray(b, float)
    diff = float(np.max(np.abs(a - b)))
    scale = max(float(np.max(np.abs(a))), float(np.max(np.abs(b))))
    if scale == 0.0:
        return 0.0 if diff == 0.0 else float("inf")
    return diff / scale


def identities_case(seed, band):
    """Relative residuals of the tensor identities for one random shear."""
    data = random_data(seed, band)
    grid = SphereGrid.for_band(band)
    out = {f"interchange_{k}": v for k, v in interchange_residuals(data.shear, grid).items()}
    residual, scale = magical_identity(data.shear, grid)
    out["magical_identity"] = residual / scale if scale else 0.0
    return out


def lemmas_case(seed, band):
    """Relative residuals of each reduction lemma for one random data set."""
    data = random_data(seed, band)
    return {k: v["relative"] for k, v in lemma_residuals(data).items()}


def limits_case(seed, band):
    """Closed forms against the unreduced limits, plus u-independence and OIEE checks.

    Keys ending in ``_abs`` are absolute and are held to
    :data:`OIEE_TOLERANCE`; the others are relative.
    """
    data = random_data(seed, band)
    emb = solve_embedding(data)
    com, J = center_of_mass(data), angular_momentum(data, embedding=emb)
    com_lim, J_lim = com_via_limit(data, emb), angmom_via_limit(data, emb)
    moved = data.replace(u=7.0)
    com_u, J_u = com_via_limit(moved, emb), angmom_via_limit(moved, emb)
    coeffs = compute_coefficients(data, emb)
    return {
        "center_of_mass": relative_difference(com, com_lim),
        "angular_momentum": relative_difference(J, J_lim),
        "u_independence_abs": float(max(np.max(np.abs(np.subtract(com_lim, com_u))),
                                        np.max(np.abs(np.subtract(J_lim, J_u))))),
        "j1_divergence_abs": coeffs.j1_divergence,
        "first_order": emb.first_order_residual,
    }


_CASES = {"identities": identities_case, "lemmas": lemmas_case, "limits": limits_case}


def case_threshold(suite, key, tolerance):
    if suite == "limits" and (key.endswith("_abs") or key == "first_order"):
        return min(tolerance, OIEE_TOLERANCE)
    return tolerance


def run_suite(suite, seeds, band, tolerance=None):
    """Run ``suite`` over seeds 0 .. seeds-1 and collect a JSON-ready table."""
    if suite not in _CASES:
        raise ValueError(f"unknown suite {suite!r}; choose from {', '.join(SUITES)}")
    tolerance = DEFAULT_TOLERANCE[suite] if tolerance is None else float(tolerance)
    rows = []
    worst = 0.0
    passed = True
    for seed in range(int(seeds)):
        residuals = _CASES[suite](seed, band)
        ok = all(v <= case_threshold(suite, k, tolerance) for k, v in residuals.items())
        passed &= ok
        worst = max(worst, max(residuals.values()))
        rows.append({"seed": seed, "residuals": residuals, "passed": ok})
    return {"suite": suite, "bandlimit": band, "seeds": int(seeds), "tolerance": tolerance,
            "oiee_tolerance": OIEE_TOLERANCE if suite == "limits" else None,
            "max_residual": worst, "passed": passed, "results": rows}
