"""Smoke tests for the python module: each main operation runs and returns
sane values on a small double-well setup."""

import math

import pytest

import gpelab


@pytest.fixture(scope="module")
def dw():
    spec = gpelab.make_double_well(1.0, 1.0)
    grid = gpelab.make_grid(8.0, 1024)
    spectral = gpelab.eigensolve(spec, grid, 0.2, 16, method="fourier")
    basis = gpelab.single_well_basis(spec, grid, 0.2, gpelab.default_threshold(spec))
    return spec, grid, spectral, basis


def test_potential_and_barrier(dw):
    spec, grid, _, _ = dw
    assert spec.value(0.0) == pytest.approx(2.0)
    assert spec.value(1.0) == pytest.approx(1.0)
    assert gpelab.agmon_distance(spec, 1) == pytest.approx(4.0 / 3.0, rel=1e-8)
    report = gpelab.validate_hypothesis1(spec, grid)
    assert report.pass_


def test_spectrum_structure(dw):
    _, _, spectral, _ = dw
    lam = spectral.eigenvalues
    assert all(a < b for a, b in zip(lam, lam[1:]))
    # quasi-degenerate doublet below a solid gap
    assert lam[1] - lam[0] < 0.05 * (lam[2] - lam[1])
    split = gpelab.splitting(spectral, 2)
    assert split.omega > 0.0


def test_harmonic_oracle():
    grid = gpelab.make_grid(8.0, 1024)
    v = [1.0 + x * x for x in grid.x]
    sd = gpelab.eigensolve_samples(v, grid, 0.1, 3, method="fourier")
    for k, lam in enumerate(sd.eigenvalues):
        assert lam == pytest.approx(1.0 + 0.1 * (2 * k + 1), rel=1e-9)


def test_reduced_model_and_beat(dw):
    _, _, spectral, basis = dw
    model = gpelab.extract_coefficients(spectral, basis, 0.0, 2)
    assert abs(model.lambda_[0]) == pytest.approx(1.0, abs=5e-3)

    lin = gpelab.DnlsModel.normalized(2, 0.0, 2)
    traj = gpelab.dnls_integrate(lin, [1.0 + 0.0j, 0.0j], 6.0, 1e-3, 10)
    assert traj.max_invariant_drift <= 1e-10
    for tau, state in zip(traj.tau, traj.states):
        assert abs(abs(state[0]) ** 2 - math.cos(tau) ** 2) < 1e-6


def test_classification_and_bifurcation():
    pole = [1.0 + 0.0j, 0.0j]
    assert gpelab.classify_trajectory(gpelab.DnlsModel.normalized(2, 0.0, 2), pole, 50.0) == "beating"
    assert (
        gpelab.classify_trajectory(gpelab.DnlsModel.normalized(2, 10.0, 2), pole, 50.0)
        == "self-trapped"
    )
    an = gpelab.double_well_analysis(3.0)
    assert an.bifurcated
    assert an.homoclinic_level == pytest.approx(0.5)
    assert not gpelab.double_well_analysis(1.0).bifurcated


def test_field_run_conserves_mass(dw):
    _, grid, spectral, basis = dw
    cfg = gpelab.GpeRunConfig()
    cfg.hbar = 0.2
    cfg.eps = 0.0
    cfg.sigma = 2
    split = gpelab.splitting(spectral, 2)
    period = math.pi * 0.2 / split.omega
    cfg.dt = period / 500.0
    cfg.t_end = period / 5.0
    cfg.modes = 16
    cfg.record_stride = 25
    r = 1.0 / math.sqrt(2.0)
    psi0 = gpelab.field_from_eigenmodes(spectral, [r + 0.0j, r + 0.0j])
    traj = gpelab.gpe_integrate(spectral, basis, cfg, psi0)
    for obs in traj.obs:
        assert abs(obs.mass - 1.0) <= 1e-10
    assert abs(sum(traj.obs[0].populations) - 1.0) < 1e-3  # up to the out-of-frame mass


def test_fits():
    fit = gpelab.fit_loglog([1.0, 2.0, 4.0, 8.0], [7.0 * x**-1.5 for x in [1.0, 2.0, 4.0, 8.0]])
    assert fit.slope == pytest.approx(-1.5, abs=1e-12)


def test_subcommand_roundtrip(tmp_path):
    config = (
        '{"potential": {"family": "double_well", "params": [1.0, 1.0]},'
        ' "physics": {"hbar": 0.2}, "output": {"dir": "%s"}}' % tmp_path
    )
    assert gpelab.run_subcommand("spectrum", config) == 0
    assert (tmp_path / "summary.json").exists()
