import numpy as np
import pytest

from sparsegp.data import (Dataset, load_csv, synth_fixed_function_dataset,
                           synth_prior_dataset, write_csv)
from sparsegp.errors import DimensionMismatch, EmptyFile, ParseError
from sparsegp.kernels import GaussianKernel


def test_dataset_shapes_and_properties():
    data = Dataset(np.array([1.0, 2.0, 3.0]), np.array([0.1, 0.2, 0.3]))
    assert data.inputs.shape == (3, 1)
    assert data.n == 3 and data.d == 1


def test_dataset_rejects_mismatched_lengths():
    with pytest.raises(DimensionMismatch):
        Dataset(np.zeros((3, 1)), np.zeros(2))


def test_dataset_rejects_nan():
    with pytest.raises(ValueError):
        Dataset(np.array([[np.nan]]), np.array([1.0]))
    with pytest.raises(ValueError):
        Dataset(np.array([[1.0]]), np.array([np.inf]))


def test_synth_prior_is_seeded_and_scales_with_kernel():
    kernel = GaussianKernel(lengthscale=1.0)
    X = np.linspace(-3, 3, 20)
    a = synth_prior_dataset(kernel, X, noise_var=0.1, seed=5)
    b = synth_prior_dataset(kernel, X, noise_var=0.1, seed=5)
    c = synth_prior_dataset(kernel, X, noise_var=0.1, seed=6)
    assert np.array_equal(a.targets, b.targets)
    assert not np.array_equal(a.targets, c.targets)
    assert a.provenance.startswith("synthetic")


def test_synth_prior_marginal_statistics():
    # each y_i is N(0, k(x,x) + s2) = N(0, 1.1); check the pooled variance
    kernel = GaussianKernel(lengthscale=1.0)
    X = np.linspace(-200, 200, 400)  # far apart, essentially independent
    data = synth_prior_dataset(kernel, X, noise_var=0.1, seed=0)
    var = np.var(data.targets)
    assert var == pytest.approx(1.1, rel=0.2)


def test_synth_fixed_function_noiseless():
    data = synth_fixed_function_dataset(lambda x: float(x[0]) ** 2,
                                        np.array([1.0, 2.0, 3.0]),
                                        noise_var=0.0, seed=0)
    assert np.allclose(data.targets, [1.0, 4.0, 9.0])


def test_synth_fixed_function_noise_statistics():
    rng_free = synth_fixed_function_dataset(lambda x: 0.0, np.zeros(5000),
                                            noise_var=0.25, seed=1)
    assert np.std(rng_free.targets) == pytest.approx(0.5, rel=0.1)
    assert np.mean(rng_free.targets) == pytest.approx(0.0, abs=0.05)


def test_csv_round_trip(tmp_path):
    rng = np.random.default_rng(2)
    data = Dataset(rng.uniform(-3, 3, size=(10, 2)), rng.standard_normal(10))
    path = tmp_path / "data.csv"
    write_csv(path, data)
    loaded = load_csv(path)
    assert np.array_equal(loaded.inputs, data.inputs)
    assert np.array_equal(loaded.targets, data.targets)
    assert loaded.d == 2


def test_load_csv_missing_file_header(tmp_path):
    path = tmp_path / "empty.csv"
    path.write_text("")
    with pytest.raises(EmptyFile):
        load_csv(path)


def test_load_csv_header_only(tmp_path):
    path = tmp_path / "header.csv"
    path.write_text("x1,y\n")
    with pytest.raises(EmptyFile):
        load_csv(path)


def test_load_csv_bad_header(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("a,b\n1,2\n")
    with pytest.raises(ParseError) as exc:
        load_csv(path)
    assert exc.value.line == 1


def test_load_csv_bad_row_reports_line(tmp_path):
    path = tmp_path / "row.csv"
    path.write_text("x1,y\n1.0,2.0\n3.0,oops\n")
    with pytest.raises(ParseError) as exc:
        load_csv(path)
    assert exc.value.line == 3


def test_load_csv_wrong_field_count(tmp_path):
    path = tmp_path / "fields.csv"
    path.write_text("x1,x2,y\n1.0,2.0,3.0\n1.0,2.0\n")
    with pytest.raises(ParseError) as exc:
        load_csv(path)
    assert exc.value.line == 3
