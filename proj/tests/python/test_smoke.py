import math
from pathlib import Path

import numpy as np
import pytest

import floqspec

DATA = Path(__file__).resolve().parent.parent / "data"


def test_rwa_pipeline_matches_closed_form():
    omegas = [0.0, 0.5, 2.0]
    table = floqspec.dpo_spectral_covariance(3.0, 0.5, omegas, mode="rwa")
    for w, v1, v2 in zip(omegas, table["V1"], table["V2"]):
        e1, e2 = floqspec.rwa_closed_form(0.5, w)
        assert v1 == pytest.approx(e1, rel=1e-8)
        assert v2 == pytest.approx(e2, rel=1e-8)


def test_vacuum_and_symmetry():
    table = floqspec.dpo_spectral_covariance(3.0, 0.0, np.linspace(-9, 9, 11), threads=2)
    assert table["V"].shape == (11, 2, 2)
    assert np.allclose(table["V"], np.eye(2), atol=1e-8)
    full = floqspec.dpo_spectral_covariance(3.0, 0.5, [-2.0, 2.0])
    assert np.allclose(full["V"][0], full["V"][1], atol=1e-12)
    assert np.all(full["detV"] >= 1 - 1e-6)


def test_thresholds():
    assert floqspec.find_instability(3.0) == pytest.approx(1.053817, abs=2e-6)
    opt = floqspec.find_optimal_squeezing(2.0)
    assert 9.0 <= opt["V2_dB"] <= 11.0
    assert opt["sigma_opt"] < opt["sigma_ins"]


def test_errors_map_to_exceptions():
    with pytest.raises(floqspec.ConfigError):
        floqspec.rwa_closed_form(1.2, 0.0)
    with pytest.raises(floqspec.UnstableSystemError):
        floqspec.dpo_spectral_covariance(3.0, 1.5, [0.0])
    assert issubclass(floqspec.ConfigError, floqspec.FloqspecError)


def test_python_defined_system_matches_ornstein_uhlenbeck():
    g, period = 0.7, 1.3
    system = floqspec.PeriodicLinearSystem(
        1, 1, period, lambda t: np.array([[-g]], dtype=complex), lambda t: np.array([[1.0]], dtype=complex),
        np.array([[1.0]], dtype=complex))
    mu = floqspec.decompose(system)["exponents"]
    assert mu[0] == pytest.approx(-g)
    x = floqspec.correlation(system, [(2.1, 0.3)])[0]
    assert x[0, 0] == pytest.approx(math.exp(-g * 1.8) / (2 * g), rel=1e-9)
    s = floqspec.fluctuation_spectrum(system, [0.0, 1.5])
    assert s[1][0, 0] == pytest.approx(1.0 / (g * g + 1.5 ** 2), rel=1e-9)


def test_sampled_system_file():
    system = floqspec.PeriodicLinearSystem.load(str(DATA / "dpo_q3_s05.csv"))
    reference = floqspec.decompose(floqspec.PeriodicLinearSystem.dpo(3.0, 0.5))["exponents"]
    assert np.allclose(floqspec.decompose(system)["exponents"], reference, atol=1e-6)
    with pytest.raises(floqspec.ConfigError):
        floqspec.PeriodicLinearSystem.load(str(DATA / "missing.csv"))
