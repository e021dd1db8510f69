import numpy as np
import pytest

from netlogit import (
    CovariateSpec,
    Explicit,
    FromFile,
    GaussianAR,
    GaussianIdentity,
    ThetaSpec,
    UniformShell,
    gen_covariates,
    gen_theta,
)
from netlogit.covgen import load_covariates, save_covariates


def test_ar_empirical_covariance_matches_target():
    rho, d, n = 0.2, 8, 100_000
    z = gen_covariates(CovariateSpec(d=d, kind=GaussianAR(rho)), n, seed=0)
    emp = z.T @ z / n
    target = rho ** np.abs(np.subtract.outer(np.arange(d), np.arange(d)))
    assert np.abs(emp - target).max() < 0.02


def test_ar_adjacent_column_correlation():
    z = gen_covariates(CovariateSpec(d=2, kind=GaussianAR(0.2)), 100_000, seed=1)
    corr = np.corrcoef(z[:, 0], z[:, 1])[0, 1]
    assert abs(corr - 0.2) < 0.015


def test_identity_kind_matches_rho_zero():
    n = 100_000
    z = gen_covariates(CovariateSpec(d=5, kind=GaussianIdentity()), n, seed=2)
    emp = z.T @ z / n
    off = emp[~np.eye(5, dtype=bool)]
    assert np.abs(off).max() <= 4 / np.sqrt(n)
    assert np.abs(np.diag(emp) - 1).max() < 0.02


def test_covariates_deterministic_per_seed():
    spec = CovariateSpec(d=3, kind=GaussianAR(0.5))
    a = gen_covariates(spec, 100, seed=7)
    b = gen_covariates(spec, 100, seed=7)
    c = gen_covariates(spec, 100, seed=8)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)


def test_covariate_spec_validation():
    with pytest.raises(ValueError):
        GaussianAR(rho=1.0)
    with pytest.raises(ValueError):
        CovariateSpec(d=0, kind=GaussianIdentity())
    with pytest.raises(ValueError):
        gen_covariates(CovariateSpec(d=2, kind=GaussianIdentity()), 0)


def test_covariates_file_roundtrip(tmp_path):
    z = gen_covariates(CovariateSpec(d=4, kind=GaussianAR(0.3)), 20, seed=3)
    path = tmp_path / "z.csv"
    save_covariates(path, z)
    loaded = load_covariates(path)
    assert np.allclose(loaded, z, atol=0, rtol=0)
    spec = CovariateSpec(d=4, kind=FromFile(path=str(path)))
    assert np.array_equal(gen_covariates(spec, 20, seed=0), z)
    with pytest.raises(ValueError):
        gen_covariates(CovariateSpec(d=5, kind=FromFile(path=str(path))), 20)


def test_theta_sparsity_exact():
    theta = gen_theta(ThetaSpec(d=100, s=5), seed=0)
    assert np.count_nonzero(theta) == 5
    assert np.count_nonzero(theta[5:]) == 0
    mags = np.abs(theta[:5])
    assert np.all((0.5 <= mags) & (mags <= 1.0))


def test_theta_zero_sparsity():
    assert not gen_theta(ThetaSpec(d=10, s=0), seed=1).any()


def test_theta_full_support():
    theta = gen_theta(ThetaSpec(d=6, s=6), seed=2)
    mags = np.abs(theta)
    assert np.all((0.5 <= mags) & (mags <= 1.0))


def test_theta_signs_are_balanced():
    # over many draws roughly half the signal entries are negative
    negs = 0
    total = 0
    for seed in range(200):
        theta = gen_theta(ThetaSpec(d=10, s=10), seed=seed)
        negs += int((theta < 0).sum())
        total += 10
    assert abs(negs / total - 0.5) < 0.05


def test_theta_explicit_signal():
    theta = gen_theta(ThetaSpec(d=5, s=2, signal=Explicit(values=[0.7, -0.9])))
    assert theta.tolist() == [0.7, -0.9, 0.0, 0.0, 0.0]
    with pytest.raises(ValueError):
        gen_theta(ThetaSpec(d=5, s=3, signal=Explicit(values=[1.0])))


def test_theta_spec_validation():
    with pytest.raises(ValueError):
        ThetaSpec(d=5, s=6)
    with pytest.raises(ValueError):
        UniformShell(lo=0.0, hi=1.0)
    with pytest.raises(ValueError):
        UniformShell(lo=0.9, hi=0.5)
