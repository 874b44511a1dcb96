#!/usr/bin/env python3
import math

import pytest

from helpers import run_tests

from siegel_bounds.forms import HalfIntegralMatrix, JacobiDatum
from siegel_bounds.poincare import (PoincareParams, delta_term, series_term, tail_estimate, poincare_coefficient,
                                    poincare_coefficient_pm, diagonal_coefficient, petersson_lambda)
from siegel_bounds.utils import RangeError, temporary_options


ONE = HalfIntegralMatrix([[2]])
TWO = HalfIntegralMatrix([[4]])


def test_delta_examples():
    assert delta_term(ONE, 1, [1], 1, [-1]) == 1
    assert delta_term(ONE, 1, [0], 1, [1]) == 0
    assert delta_term(ONE, 1, [0], 2, [2]) == 1
    assert delta_term(ONE, 1, [0], 1, [0]) == 1

    assert delta_term(TWO, 1, [1], 2, [3]) == 0
    assert delta_term(TWO, 1, [1], 4, [5]) == 1

    I2 = HalfIntegralMatrix.identity(2)
    assert delta_term(I2, 1, [0, 0], 2, [2, 0]) == 1
    assert delta_term(I2, 1, [0, 0], 1, [0, 0]) == 1
    assert delta_term(I2, 2, [1, 0], 2, [-1, 0]) == 1
    assert delta_term(I2, 2, [1, 0], 2, [0, 1]) == 0


def test_params():
    p = PoincareParams.create(12, [[2]], 1, [0])
    assert p.n2 == 1 and p.r2 == [0]
    assert p.order == 10.5
    assert abs(p.argument - 4 * math.pi) < 1e-12
    assert p.to_dict() == {'k': 12, 'm': {'g': 1, 'twice_m': [[2]]}, 'n': 1, 'r': [0], 'n2': 1, 'r2': [0], 'D': 4, 'D2': 4}

    q = PoincareParams.create(12, ONE, 1, [0], 1, [1]).flipped()
    assert q.r2 == [-1] and q.datum2.D == 3

    with pytest.raises(ValueError):
        PoincareParams.create(0, ONE, 1, [0])

    with pytest.raises(ValueError):
        PoincareParams.create(12, ONE, 1, [0], tol=0)


def test_validity_range():
    with pytest.raises(RangeError):
        PoincareParams.create(2, ONE, 1, [0])

    with pytest.raises(RangeError):
        PoincareParams.create(3, HalfIntegralMatrix.identity(3), 1, [0, 0, 0])

    p = PoincareParams.create(2, ONE, 1, [0], permissive=True)
    assert 'outside-validity-range' in p.notes
    assert 'divergent-tail' in p.notes
    assert tail_estimate(p, 10) is None

    with temporary_options(permissive=True):
        assert 'outside-validity-range' in PoincareParams.create(2, ONE, 1, [0]).notes

    assert PoincareParams.create(3, ONE, 1, [0]).notes == []


def test_delta_only():
    p = PoincareParams.create(12, ONE, 1, [0])
    value = poincare_coefficient(p, 0)
    assert value.value == 1
    assert 'heuristic-tail' in value.notes

    assert diagonal_coefficient(12, JacobiDatum(1, [0], ONE), 0).value == 2
    assert diagonal_coefficient(12, JacobiDatum(1, [1], ONE), 0).value == 2
    assert poincare_coefficient(PoincareParams.create(12, ONE, 1, [0], 1, [1]), 0).value == 0

    with pytest.raises(ValueError):
        poincare_coefficient(p, -1)


def test_tail_estimate():
    p = PoincareParams.create(12, ONE, 1, [0])
    tails = [tail_estimate(p, c) for c in (0, 10, 50, 100)]
    assert all(x > y for x, y in zip(tails, tails[1:]))
    assert tails[-1] < 1e-12


def test_series_term():
    p = PoincareParams.create(12, ONE, 1, [0])
    assert abs(series_term(p, 2).value) < 1e-12
    assert abs(series_term(p, 1).value) > 0


def test_convergence():
    p = PoincareParams.create(12, ONE, 1, [0])
    v50 = poincare_coefficient(p, 50)
    v100 = poincare_coefficient(p, 100)

    assert abs(v100.value - v50.value) < 1e-8
    assert 'heuristic-tail' in v100.notes

    adaptive = poincare_coefficient(p)
    assert 'not-converged' not in adaptive.notes
    assert abs(adaptive.value - v100.value) < 1e-9


def test_truncation_error():
    for k in (12, 10):
        for m, data in ((ONE, ((1, 0), (1, 1), (3, 1), (12, 0))),
                        (TWO, ((1, 0), (1, 2), (2, 1), (6, 0)))):
            for n, r in data:
                p = PoincareParams.create(k, m, n, [r])
                v100 = poincare_coefficient(p, 100)
                v200 = poincare_coefficient(p, 200)

                assert abs(v200.value - v100.value) <= v100.abs_error, f"k={k} m={m.twice_m} n={n} r={r}"

                pm = diagonal_coefficient(k, p.datum, 100)
                assert pm.value.imag == 0
                assert math.isfinite(pm.value.real)


def test_one_dimensional_cusp_spaces():
    # J_{10,1} and J_{12,1} are spanned by single cusp forms with
    # q(z - 2 + 1/z) and q(z + 10 + 1/z) as leading terms
    for k, ratio in ((10, -0.5), (12, 0.1)):
        center = poincare_coefficient_pm(PoincareParams.create(k, ONE, 1, [0], 1, [0]), 100)
        side = poincare_coefficient_pm(PoincareParams.create(k, ONE, 1, [0], 1, [1]), 100)
        assert abs(side.value / center.value - ratio) < 1e-6, f"k={k}"


def test_threads_deterministic():
    p = PoincareParams.create(8, HalfIntegralMatrix([[2, 1], [1, 2]]), 1, [1, 0])
    single = poincare_coefficient(p, 40)

    with temporary_options(threads=3):
        threaded = poincare_coefficient(p, 40)

    assert single.value == threaded.value


def reference_lambda(k, g, det2m, D):
    x = k - g / 2 - 1
    return (2 ** (-g / 2) * math.gamma(x) * (2 * math.pi) ** (-x)
            * det2m ** (k - (g + 3) / 2) * D ** (-x))


def test_petersson_lambda():
    for k, g, det2m, D in ((12, 1, 2, 4), (10, 1, 4, 7), (8, 2, 3, 5), (6, 3, 8, 12)):
        assert math.isclose(petersson_lambda(k, g, det2m, D), reference_lambda(k, g, det2m, D), rel_tol=1e-10)

    # D -> 4D scales by 4^-(k - g/2 - 1)
    ratio = petersson_lambda(10, 1, 2, 12) / petersson_lambda(10, 1, 2, 3)
    assert math.isclose(ratio, 4 ** -8.5, rel_tol=1e-10)

    values = [petersson_lambda(12, 1, 2, D) for D in range(1, 20)]
    assert all(x > y for x, y in zip(values, values[1:]))

    with pytest.raises(RangeError):
        petersson_lambda(2, 2, 3, 3)

    with pytest.raises(ValueError):
        petersson_lambda(12, 1, 2, 0)


if __name__ == '__main__':
    import sys
    run_tests(sys.modules[__name__], 'poincare')
