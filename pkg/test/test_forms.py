#!/usr/bin/env python3
import io
import json
import os
import tempfile
import contextlib

from fractions import Fraction

import pytest

from hypothesis import given, settings, strategies as st

from helpers import run_tests, half_integral_matrices, vectors

from siegel_bounds.forms import (HalfIntegralMatrix, JacobiDatum, discriminant, discriminant_split, quadratic_value,
                                 completing_square, min_submatrix_det, reduction_ratio)
from siegel_bounds.log import LogFormatter
from siegel_bounds.utils import WorkLimitError


I2 = HalfIntegralMatrix.identity(2)


def test_matrix_validation():
    for twice_m in ([[1]], [[2, 1], [0, 2]], [[2, 3], [3, 2]], [[2, 0, 0], [0, 2]], [], [['a']], [[0]]):
        with pytest.raises(ValueError):
            HalfIntegralMatrix(twice_m)

    m = HalfIntegralMatrix([[2, 1], [1, 2]])
    assert m.g == 2
    assert m.det2m == 3
    assert not m.is_diagonal
    assert HalfIntegralMatrix.diagonal([1, 2]).twice_m == [[2, 0], [0, 4]]
    assert HalfIntegralMatrix.diagonal([1, 2]).diagonal_entries == [1, 2]


def test_matrix_json():
    m = HalfIntegralMatrix.from_json('{"g": 2, "twice_m": [[2, 1], [1, 2]]}')
    assert m == HalfIntegralMatrix([[2, 1], [1, 2]])
    assert HalfIntegralMatrix.from_json(m.to_json()) == m
    assert HalfIntegralMatrix.from_json(m.to_dict()) == m

    with tempfile.TemporaryDirectory() as tmp:
        path = os.path.join(tmp, 'm.json')
        with open(path, 'w') as file:
            json.dump(m.to_dict(), file)
        assert HalfIntegralMatrix.from_json(path) == m

    for bad in ('{"g": 2, "twice_m": [[2, 1], [1, 2]', '{"g": 3, "twice_m": [[2]]}', '[[2]]', '{"twice_m": [[3]]}'):
        with pytest.raises(ValueError):
            HalfIntegralMatrix.from_json(bad)


def test_inverse():
    m = HalfIntegralMatrix([[2, 1], [1, 4]])
    inv = m.inverse_twice()

    for i in range(2):
        for j in range(2):
            assert sum(m.twice_m[i][k] * inv[k][j] for k in range(2)) == (1 if i == j else 0)

    assert m.bilinear_inverse([1, 0], [1, 0]) == Fraction(2 * 4, 7)


def test_discriminant_examples():
    one = HalfIntegralMatrix([[2]])

    assert discriminant(JacobiDatum(1, [0], one)) == 4
    assert discriminant(JacobiDatum(1, [0, 0], I2)) == 8
    assert discriminant(JacobiDatum(1, [1], one)) == 3

    assert discriminant_split(JacobiDatum(1, [0], one)) == 4
    assert discriminant_split(JacobiDatum(1, [0, 0], I2)) == 8
    assert discriminant_split(JacobiDatum(1, [1], one)) == 3

    with pytest.raises(ValueError):
        JacobiDatum(1, [2], one)

    with pytest.raises(ValueError):
        JacobiDatum(0, [0], one)

    with pytest.raises(ValueError):
        JacobiDatum(1, [0, 0], one)

    assert JacobiDatum(1, [2], one, check=False).D == 0


@settings(max_examples=1000, deadline=None)
@given(half_integral_matrices(max_g=4, max_entry=10), st.integers(-20, 20), st.data())
def test_discriminant_split(m, n, data):
    r = data.draw(vectors(m.g, -20, 20))
    datum = JacobiDatum(n, r, m, check=False)
    assert discriminant(datum) == discriminant_split(datum)


@settings(max_examples=200, deadline=None)
@given(half_integral_matrices(max_g=3), st.integers(1, 20), st.data())
def test_completing_square(m, n, data):
    r = data.draw(vectors(m.g, -2, 2))
    v = data.draw(vectors(m.g, -3, 3))
    datum = JacobiDatum(n, r, m, check=False)

    if datum.D <= 0:
        return

    shifted = completing_square(datum, v)
    assert shifted.D == datum.D


def test_quadratic_value():
    assert quadratic_value(I2, [0, 0]) == 0
    assert quadratic_value(HalfIntegralMatrix([[2]]), [3]) == 9
    assert quadratic_value(HalfIntegralMatrix([[2, 1], [1, 2]]), [1, 1]) == 3

    with pytest.raises(ValueError):
        quadratic_value(I2, [1])


@settings(max_examples=200, deadline=None)
@given(half_integral_matrices(max_g=4), st.data())
def test_quadratic_value_positive(m, data):
    v = data.draw(vectors(m.g, -5, 5))
    if any(v):
        assert quadratic_value(m, v) > 0


def test_block_matrix():
    T = HalfIntegralMatrix([[2, 1, 0], [1, 2, 1], [0, 1, 4]])
    datum = JacobiDatum.from_matrix(T)

    assert datum.n == 1
    assert datum.r == [1, 0]
    assert datum.m == HalfIntegralMatrix([[2, 1], [1, 4]])
    assert datum.block_matrix() == T.twice_m
    assert datum.D == T.det2m


def test_min_submatrix_det():
    assert min_submatrix_det(I2, 2) == 1
    assert min_submatrix_det(HalfIntegralMatrix.diagonal([1, 2]), 2) == 1
    assert min_submatrix_det(HalfIntegralMatrix.diagonal([2, 2]), 1) == 2
    assert min_submatrix_det(HalfIntegralMatrix.identity(3), 1) == 1

    with pytest.raises(ValueError):
        min_submatrix_det(HalfIntegralMatrix([[2]]), 2)

    with pytest.raises(ValueError):
        min_submatrix_det(I2, 0)


def test_min_submatrix_det_warning():
    stderr = io.StringIO()

    with contextlib.redirect_stderr(stderr):
        LogFormatter.config(level='warning', colors=None)
        value = min_submatrix_det(HalfIntegralMatrix([[6, 5], [5, 6]]), 1)

    LogFormatter.config(level='warning')

    assert 'WARNING' in stderr.getvalue()
    assert f"m_1(T) = {value} is from a bounded search" in stderr.getvalue()


def test_min_submatrix_det_invariance():
    T = HalfIntegralMatrix([[2, 1], [1, 2]])
    U = [[1, 1], [0, 1]]

    assert T.transform(U).twice_m == [[2, 3], [3, 6]]
    assert min_submatrix_det(T, 2) == min_submatrix_det(T.transform(U), 2) == 1


def test_min_submatrix_det_monotone():
    T = HalfIntegralMatrix([[6, 5], [5, 6]])
    values = [min_submatrix_det(T, b) for b in (1, 2, 3)]
    assert all(x >= y for x, y in zip(values, values[1:]))


def test_min_submatrix_det_work_limit():
    with pytest.raises(WorkLimitError):
        min_submatrix_det(HalfIntegralMatrix.identity(4), 3)


def test_reduction_ratio():
    assert abs(reduction_ratio(I2, 2) - 0.5) < 1e-15
    assert abs(reduction_ratio(HalfIntegralMatrix.identity(3), 2) - 0.25) < 1e-15

    T = HalfIntegralMatrix([[2, 1], [1, 4]])
    assert abs(reduction_ratio(T, 2) - reduction_ratio(T.scaled(4), 2)) < 1e-12


if __name__ == '__main__':
    import sys
    run_tests(sys.modules[__name__], 'forms')
