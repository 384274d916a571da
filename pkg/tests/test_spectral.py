import json
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cantornet.errors import ConvergenceError, ParameterError
from cantornet.spectral import (
    WeightMatrix,
    gen_weight_matrix,
    load_weights,
    perron_eigenpair,
    read_raw_weights,
    validate_weights,
)


def eig2_closed_form(A):
    """Dominant eigenpair of a positive 2x2 matrix from the characteristic polynomial."""
    (a, b), (c, d) = A
    tr, det = a + d, a * d - b * c
    rho = tr / 2 + math.sqrt(tr * tr / 4 - det)
    # (a - rho) v1 + b v2 = 0
    v1, v2 = b, rho - a
    s = v1 + v2
    return rho, np.array([v1 / s, v2 / s])


class TestValidate:
    def test_pass(self):
        r = validate_weights([[0.5, 0.375], [0.375, 0.5]], "row")
        assert r.passed and r.violations == []

    def test_boundary_sum_fails(self):
        r = validate_weights([[0.5, 0.25], [0.25, 0.5]], "row")
        assert r.status == "fail"
        assert [(v.kind, v.index) for v in r.violations] == [
            ("sum_out_of_range", (0,)),
            ("sum_out_of_range", (1,)),
        ]

    def test_non_positive_entry(self):
        r = validate_weights([[0.9, 0.0], [0.1, 0.8]], "row")
        assert r.status == "fail"
        assert ("non_positive", (0, 1)) in [(v.kind, v.index) for v in r.violations]

    def test_column_mode(self):
        W = [[0.5, 0.45], [0.3, 0.4]]  # rows 0.95/0.7, columns 0.8/0.85
        assert not validate_weights(W, "row").passed
        assert validate_weights(W, "column").passed

    def test_reports_every_violation(self):
        r = validate_weights([[-1.0, 0.0, 2.0], [0.1, 0.1, 0.1], [0.3, 0.3, 0.3]])
        kinds = sorted((v.kind, v.index) for v in r.violations)
        assert kinds == [
            ("non_positive", (0, 0)),
            ("non_positive", (0, 1)),
            ("sum_out_of_range", (0,)),
            ("sum_out_of_range", (1,)),
        ]

    @pytest.mark.parametrize("bad", [[[0.8, 0.1]], [[0.8, np.nan], [0.1, 0.8]], [[np.inf]], [], [[[0.8]]]])
    def test_structural(self, bad):
        assert validate_weights(bad).status == "structural_error"

    def test_constructor_raises(self):
        with pytest.raises(ParameterError):
            WeightMatrix([[0.5, 0.25], [0.25, 0.5]])


class TestPerron:
    def test_equal_row_sums(self):
        p = perron_eigenpair(WeightMatrix([[0.5, 0.375], [0.375, 0.5]]))
        assert p.rho == pytest.approx(0.875, abs=1e-15)
        np.testing.assert_allclose(p.v, [0.5, 0.5], atol=1e-15)

    def test_one_by_one(self):
        p = perron_eigenpair([[0.8]])
        assert p.rho == 0.8 and p.v.tolist() == [1.0]

    def test_two_by_two_oracle(self):
        A = [[0.7, 0.1], [0.3, 0.6]]
        rho, v = eig2_closed_form(A)
        assert rho == pytest.approx(0.830278, abs=1e-6)
        np.testing.assert_allclose(v, [0.43425, 0.56575], atol=1e-5)
        p = perron_eigenpair(A)
        assert abs(p.rho - rho) <= 1e-12
        np.testing.assert_allclose(p.v, v, atol=1e-12)

    def test_agrees_with_closed_form_on_random_matrices(self):
        for seed in range(100):
            W = gen_weight_matrix(2, seed, 0.76 + 0.23 * (seed % 10) / 9)
            rho, v = eig2_closed_form(W.entries)
            p = perron_eigenpair(W)
            assert abs(p.rho - rho) <= 1e-10
            assert np.max(np.abs(p.v - v)) <= 1e-10

    def test_convergence_failure_carries_best(self):
        W = gen_weight_matrix(6, 1, 0.9)
        with pytest.raises(ConvergenceError) as info:
            perron_eigenpair(W, tol=1e-300, max_iter=5)
        assert info.value.residual > 0 and info.value.best is not None

    @settings(max_examples=60, deadline=None)
    @given(
        n=st.integers(1, 24),
        seed=st.integers(0, 2**31),
        target=st.floats(0.7501, 0.9999),
        mode=st.sampled_from(["row", "column"]),
    )
    def test_properties(self, n, seed, target, mode):
        W = gen_weight_matrix(n, seed, target, mode)
        p = perron_eigenpair(W)
        A = W.entries
        sums = A.sum(axis=1 if mode == "row" else 0)
        assert sums.min() - 1e-12 <= p.rho <= sums.max() + 1e-12
        assert 0.75 < p.rho < 1.0
        assert np.all(p.v > 0) and abs(p.v.sum() - 1.0) <= 1e-12
        assert np.max(np.abs(A @ p.v - p.rho * p.v)) <= 1e-12
        assert p.residual <= 1e-12


class TestGenerate:
    def test_single_entry(self):
        assert gen_weight_matrix(1, 123, 0.8).entries.tolist() == [[0.8]]

    def test_row_sums_and_determinism(self):
        a = gen_weight_matrix(3, 42, 0.9)
        b = gen_weight_matrix(3, 42, 0.9)
        assert np.max(np.abs(a.entries.sum(axis=1) - 0.9)) <= 1e-12
        assert a.entries.tobytes() == b.entries.tobytes()
        assert np.all(a.entries > 0)

    def test_near_lower_bound_validates(self):
        assert validate_weights(gen_weight_matrix(2, 7, 0.76).entries).passed

    def test_column_mode(self):
        W = gen_weight_matrix(5, 3, 0.8, "column")
        assert np.max(np.abs(W.entries.sum(axis=0) - 0.8)) <= 1e-12
        assert validate_weights(W.entries, "column").passed

    @pytest.mark.parametrize("target", [0.75, 0.7, 1.0, 1.2])
    def test_target_out_of_range(self, target):
        with pytest.raises(ParameterError):
            gen_weight_matrix(3, 0, target)


class TestSerialization:
    def test_csv_round_trip(self, tmp_path):
        W = gen_weight_matrix(5, 11, 0.93)
        path = tmp_path / "w.csv"
        path.write_text(W.to_csv())
        assert load_weights(path) == W

    def test_json_round_trip(self, tmp_path):
        W = gen_weight_matrix(4, 2, 0.81, "column")
        path = tmp_path / "w.json"
        path.write_text(W.to_json())
        payload = json.loads(path.read_text())
        assert payload["n"] == 4 and payload["mode"] == "column"
        assert load_weights(path) == W

    def test_raw_reader_keeps_invalid(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("0.5,0.25\n0.25,0.5\n")
        A, mode = read_raw_weights(path)
        assert A.shape == (2, 2) and mode is None
