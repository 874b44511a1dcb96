#!/usr/bin/env python3
import os
import sys

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from hypothesis import strategies as st

from siegel_bounds import HalfIntegralMatrix


def _try_matrix(twice_m):
    try:
        return HalfIntegralMatrix(twice_m)
    except ValueError:
        return None


@st.composite
def half_integral_matrices(draw, min_g=1, max_g=3, max_entry=3, diagonal=False):
    """
    Positive definite half-integral matrices, drawn as 2m with an even diagonal
    """
    g = draw(st.integers(min_g, max_g))
    twice = [[0] * g for _ in range(g)]

    for i in range(g):
        twice[i][i] = 2 * draw(st.integers(1, max_entry))
        for j in range(i):
            if not diagonal:
                twice[i][j] = twice[j][i] = draw(st.integers(-1, 1))

    matrix = _try_matrix(twice)

    if matrix is None:
        return HalfIntegralMatrix.diagonal([x // 2 for x in (twice[i][i] for i in range(g))])

    return matrix


def vectors(g, lo=-3, hi=3):
    return st.lists(st.integers(lo, hi), min_size=g, max_size=g)


def run_tests(module, name):
    """
    Run the test_* functions of a module as a script (hypothesis tests included)
    """
    print(f"testing {name}...")

    for key, func in list(vars(module).items()):
        if key.startswith('test_') and callable(func):
            print(f"  {key}")
            func()

    print(f"{name} OK\n")
