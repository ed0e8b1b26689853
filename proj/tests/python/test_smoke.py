import json

import numpy as np
import pytest

import plp


def test_convolution_matches_forward_model():
    t = plp.uniform_instants(8, 1.0)
    rng = np.random.default_rng(0)
    k = rng.normal(size=8)
    r = rng.normal(size=8)
    a = plp.convolution_matrix(k, 1.0, t)
    assert np.allclose(a @ r, plp.forward_convolve(k, 1.0, t, r), rtol=1e-12, atol=1e-12)
    assert np.all(np.triu(a, 1) == 0)


def test_gamma_kernel_is_singular():
    t = plp.uniform_instants(10)
    values, k0 = plp.gamma_aif(3.0, 1 / 1.5, t)
    assert k0 == 0.0
    a = plp.convolution_matrix(values, k0, t)
    with pytest.raises(plp.SingularInput):
        plp.inverse(a, "exact")
    b, rank = plp.inverse(a, "tsvd", fraction=0.2)
    assert 1 <= rank < 10
    assert np.isfinite(b).all()


def test_weights_reproduce_residue_parameters():
    t = plp.uniform_instants(12)
    values, k0 = plp.gamma_aif(0.0, 0.2, t)
    a = plp.convolution_matrix(values, k0, t)
    b, _ = plp.inverse(a, "tikhonov", alpha=1e-3, constraint="difference")
    wv, wf = plp.deconvolution_weights(b, t)
    c = np.random.default_rng(1).normal(size=12)
    vb, fb, _ = plp.perfusion_params(b @ c, t)
    assert wv @ c == pytest.approx(vb, rel=1e-10)
    assert wf @ c == pytest.approx(fb, rel=1e-10)


def test_axel_orthogonality():
    wv, wt = plp.axel_weights(plp.uniform_instants(14))
    assert abs(plp.centered_correlation(wv, wt)) <= 1e-12


def test_pca_and_schedule():
    data, truth = plp.phantom(n=60, classes=[(30, 1.0, 4.0), (20, 0.4, 6.0)], noise=0.01, seed=3)
    assert data.shape == (50, 60)
    assert len(truth) == 50
    fit = plp.fit_pca(data)
    assert np.linalg.norm(fit["weights"]) == pytest.approx(1.0)
    assert 0.0 < fit["energy_ratio"] <= 1.0
    assert plp.fpc_map(data).shape == (50,)
    report = json.loads(plp.schedule("fpc", data, ["subsample:4", "truncate:14"]))
    assert len(report["strategies"]) == 2
    assert report["strategies"][0]["correlation"] >= 0.95


def test_surfaces():
    r = plp.cutoff_surface([0.0, 3.0], [0.1, 0.5], n=30)
    assert len(r) == 4
    cond = plp.condition_surface([3.0], [0.5], n=30)
    assert cond[0] == -np.inf


def test_bad_arguments():
    with pytest.raises(ValueError):
        plp.uniform_instants(1)
    with pytest.raises(ValueError):
        plp.schedule("nope", np.ones((3, 5)), ["truncate:3"])
