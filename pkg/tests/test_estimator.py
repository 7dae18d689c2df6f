"""scikit-learn style FFTTransformer."""

import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError
from sklearn.pipeline import make_pipeline

from adaptfft import FFTTransformer
from adaptfft.oracle import naive_dft


def data(rows=3, n=12, seed=0):
    rng = np.random.default_rng(seed)
    return rng.standard_normal((rows, n)) + 1j * rng.standard_normal((rows, n))


def test_transform_rows():
    X = data()
    Y = FFTTransformer().fit_transform(X)
    np.testing.assert_allclose(Y, [naive_dft(r) for r in X], atol=1e-13)


def test_inverse_round_trip_and_unnormalized():
    X = data(n=16)
    t = FFTTransformer().fit(X)
    np.testing.assert_allclose(t.inverse_transform(t.transform(X)), X, atol=1e-14)
    raw = FFTTransformer(normalize_inverse=False).fit(X)
    np.testing.assert_allclose(raw.inverse_transform(raw.transform(X)), 16 * X, atol=1e-12)


def test_real_and_one_dimensional_input():
    t = FFTTransformer().fit(np.arange(8.0))
    assert t.n_features_in_ == 8
    np.testing.assert_allclose(t.transform(np.arange(8.0))[0], naive_dft(np.arange(8.0)), atol=1e-13)


def test_batch_size_may_change_after_fit():
    t = FFTTransformer().fit(data(rows=2))
    assert t.transform(data(rows=5)).shape == (5, 12)


def test_wisdom_reuse():
    X = data(n=32)
    a = FFTTransformer(mode="measure").fit(X)
    b = FFTTransformer(mode="wisdom-only", wisdom=a.export_wisdom()).fit(X)
    assert b.planner_.stats.timings == 0
    np.testing.assert_allclose(b.transform(X), a.transform(X), atol=1e-13)


def test_params_and_clone():
    t = FFTTransformer(mode="measure", twiddle="twotable")
    assert clone(t).get_params()["twiddle"] == "twotable"
    assert make_pipeline(FFTTransformer()).fit_transform(data()).shape == (3, 12)


def test_errors():
    with pytest.raises(NotFittedError):
        FFTTransformer().transform(data())
    with pytest.raises(ValueError):
        FFTTransformer(mode="fast").fit(data())
    with pytest.raises(ValueError):
        FFTTransformer(mode="wisdom-only").fit(data())
    with pytest.raises(ValueError):
        FFTTransformer(twiddle="cordic").fit(data())
    t = FFTTransformer().fit(data())
    with pytest.raises(ValueError):
        t.transform(data(n=10))
    with pytest.raises(ValueError):
        t.transform(np.full((1, 12), np.nan))
    with pytest.raises(TypeError):
        t.transform(np.array([["a"] * 12]))
    with pytest.raises(ValueError):
        t.transform(np.zeros((2, 2, 12)))
