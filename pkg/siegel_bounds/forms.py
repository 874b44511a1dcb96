#!/usr/bin/env python3
import os
import json
import logging
import itertools

from fractions import Fraction

import numpy as np
import sympy

from .gauss import check_work
from .utils import log_debug


class HalfIntegralMatrix:
    """
    Positive definite symmetric half-integral g x g matrix m, stored as the
    integral matrix 2m (symmetric with an even diagonal).

    Parameters:
      twice_m (list[list[int]]) -- the matrix 2m, row-major
    """
    def __init__(self, twice_m):
        try:
            twice_m = [[int(x) for x in row] for row in twice_m]
        except (TypeError, ValueError) as error:
            raise ValueError(f"twice_m should be a list of integer rows ({error})")

        g = len(twice_m)

        if g < 1:
            raise ValueError("twice_m must be at least 1x1")

        for i, row in enumerate(twice_m):
            if len(row) != g:
                raise ValueError(f"twice_m must be square (row {i} has {len(row)} entries, expected {g})")

        for i in range(g):
            if twice_m[i][i] % 2 != 0:
                raise ValueError(f"the diagonal of twice_m must be even (entry [{i}][{i}] = {twice_m[i][i]})")
            for j in range(i):
                if twice_m[i][j] != twice_m[j][i]:
                    raise ValueError(f"twice_m must be symmetric (entries [{i}][{j}] and [{j}][{i}] differ)")

        matrix = sympy.Matrix(twice_m)

        for i in range(1, g + 1):
            minor = int(matrix[:i, :i].det(method='bareiss'))
            if minor <= 0:
                raise ValueError(f"twice_m must be positive definite (leading {i}x{i} minor is {minor})")

        self.twice_m = twice_m
        self.g = g
        self.det2m = minor
        self._adjugate = None

    @staticmethod
    def from_json(data):
        """
        Load from the JSON matrix format {"g": int, "twice_m": [[int,...],...]}

        Parameters:
          data (str|dict) -- a dict, a JSON string, or the path to a .json file
        """
        if isinstance(data, str):
            if os.path.isfile(data):
                with open(data) as file:
                    data = file.read()
            try:
                data = json.loads(data)
            except json.JSONDecodeError as error:
                raise ValueError(f"malformed matrix JSON ({error})")

        if not isinstance(data, dict) or 'twice_m' not in data:
            raise ValueError('matrix JSON should be like {"g": 2, "twice_m": [[2,1],[1,2]]}')

        matrix = HalfIntegralMatrix(data['twice_m'])

        if 'g' in data and int(data['g']) != matrix.g:
            raise ValueError(f"matrix JSON has g={data['g']} but twice_m is {matrix.g}x{matrix.g}")

        return matrix

    @staticmethod
    def identity(g):
        return HalfIntegralMatrix([[2 if i == j else 0 for j in range(g)] for i in range(g)])

    @staticmethod
    def diagonal(entries):
        """
        The diagonal matrix m = diag(entries), so 2m = diag(2*entries)
        """
        g = len(entries)
        return HalfIntegralMatrix([[2 * entries[i] if i == j else 0 for j in range(g)] for i in range(g)])

    def to_dict(self):
        return {'g': self.g, 'twice_m': [list(row) for row in self.twice_m]}

    def to_json(self):
        return json.dumps(self.to_dict())

    @property
    def is_diagonal(self):
        return all(self.twice_m[i][j] == 0 for i in range(self.g) for j in range(self.g) if i != j)

    @property
    def diagonal_entries(self):
        """
        The diagonal entries m_j of m (integers)
        """
        return [self.twice_m[j][j] // 2 for j in range(self.g)]

    def adjugate_twice(self):
        """
        The integer adjugate of 2m, so that (2m)^-1 = adjugate / det(2m)
        """
        if self._adjugate is None:
            adj = sympy.Matrix(self.twice_m).adjugate()
            self._adjugate = [[int(adj[i, j]) for j in range(self.g)] for i in range(self.g)]
        return self._adjugate

    def inverse_twice(self):
        """
        (2m)^-1 as a matrix of exact Fractions
        """
        adj = self.adjugate_twice()
        return [[Fraction(adj[i][j], self.det2m) for j in range(self.g)] for i in range(self.g)]

    def bilinear_inverse(self, r, s):
        """
        The exact rational r^T m^-1 s = 2 * r^T (2m)^-1 s
        """
        r = self._check_vector(r)
        s = self._check_vector(s)
        adj = self.adjugate_twice()
        total = sum(r[i] * adj[i][j] * s[j] for i in range(self.g) for j in range(self.g))
        return Fraction(2 * total, self.det2m)

    def transform(self, U):
        """
        Returns m[U] = U^T m U for an integer g x g matrix U
        """
        U = sympy.Matrix(U)

        if U.shape != (self.g, self.g):
            raise ValueError(f"U must be {self.g}x{self.g} (was {U.shape[0]}x{U.shape[1]})")

        T = U.T * sympy.Matrix(self.twice_m) * U
        return HalfIntegralMatrix(T.tolist())

    def scaled(self, t):
        """
        Returns t*m for a positive integer t
        """
        if t < 1:
            raise ValueError(f"scale factor must be a positive integer (was {t})")
        return HalfIntegralMatrix([[t * x for x in row] for row in self.twice_m])

    def _check_vector(self, v):
        v = [int(x) for x in v]
        if len(v) != self.g:
            raise ValueError(f"expected a vector of length {self.g} (was {len(v)})")
        return v

    def __eq__(self, other):
        return isinstance(other, HalfIntegralMatrix) and self.twice_m == other.twice_m

    def __hash__(self):
        return hash(tuple(tuple(row) for row in self.twice_m))

    def __repr__(self):
        return f"HalfIntegralMatrix({self.twice_m})"


class JacobiDatum:
    """
    A Fourier index (n, r) together with the index matrix m, and its discriminant
    D = det([[2n, r^T], [r, 2m]])

    Parameters:
      n (int) -- positive integer
      r (list[int]) -- integer vector of length g
      m (HalfIntegralMatrix) -- the index
      check (bool) -- if true (the default), raise ValueError unless D > 0
    """
    def __init__(self, n, r, m, check=True):
        if not isinstance(m, HalfIntegralMatrix):
            m = HalfIntegralMatrix(m)

        self.n = int(n)
        self.r = m._check_vector(r)
        self.m = m
        self.D = discriminant(self)

        if check:
            if self.n < 1:
                raise ValueError(f"n must be a positive integer (was {self.n})")
            if self.D <= 0:
                raise ValueError(f"discriminant must be positive (D={self.D} for n={self.n}, r={self.r})")

    @property
    def g(self):
        return self.m.g

    @staticmethod
    def from_matrix(T):
        """
        Split a (g+1) x (g+1) half-integral T = [[n, r^T/2], [r/2, m]] into its datum
        """
        if not isinstance(T, HalfIntegralMatrix):
            T = HalfIntegralMatrix(T)

        if T.g < 2:
            raise ValueError("T must be at least 2x2 to split off an index")

        twice = T.twice_m
        return JacobiDatum(twice[0][0] // 2, twice[0][1:], HalfIntegralMatrix([row[1:] for row in twice[1:]]))

    def block_matrix(self):
        """
        The integer matrix [[2n, r^T], [r, 2m]]
        """
        rows = [[2 * self.n] + list(self.r)]

        for i in range(self.g):
            rows.append([self.r[i]] + list(self.m.twice_m[i]))

        return rows

    def to_dict(self):
        return {'n': self.n, 'r': list(self.r), 'm': self.m.to_dict(), 'D': self.D}

    def __repr__(self):
        return f"JacobiDatum(n={self.n}, r={self.r}, twice_m={self.m.twice_m}, D={self.D})"


def discriminant(datum):
    """
    The exact integer determinant D of the block matrix [[2n, r^T], [r, 2m]].
    The value isn't checked for positivity here.
    """
    return int(sympy.Matrix(datum.block_matrix()).det(method='bareiss'))


def discriminant_split(datum):
    """
    D computed as 1/2 * det(2m) * (4n - m^-1[r]) in exact rational arithmetic,
    which must agree with discriminant(datum).
    """
    m = datum.m
    return Fraction(m.det2m, 2) * (4 * datum.n - m.bilinear_inverse(datum.r, datum.r))


def quadratic_value(m, v):
    """
    m[v] = v^T m v as an exact Fraction (computed as v^T (2m) v / 2)
    """
    v = m._check_vector(v)
    twice = sum(v[i] * m.twice_m[i][j] * v[j] for i in range(m.g) for j in range(m.g))
    return Fraction(twice, 2)


def completing_square(datum, v):
    """
    Returns the datum (n + m[v] + r^T v, r + 2mv, m), which has the same discriminant.
    """
    m = datum.m
    v = m._check_vector(v)

    n = Fraction(datum.n) + quadratic_value(m, v) + sum(ri * vi for ri, vi in zip(datum.r, v))
    r = [datum.r[i] + sum(m.twice_m[i][j] * v[j] for j in range(m.g)) for i in range(m.g)]

    return JacobiDatum(int(n), r, m)


def _batched_det(M):
    """
    Exact determinants of a stack of small integer matrices, shape (N, s, s) with s <= 3
    """
    s = M.shape[-1]

    if s == 1:
        return M[:, 0, 0]
    elif s == 2:
        return M[:, 0, 0] * M[:, 1, 1] - M[:, 0, 1] * M[:, 1, 0]
    elif s == 3:
        return (M[:, 0, 0] * (M[:, 1, 1] * M[:, 2, 2] - M[:, 1, 2] * M[:, 2, 1])
              - M[:, 0, 1] * (M[:, 1, 0] * M[:, 2, 2] - M[:, 1, 2] * M[:, 2, 0])
              + M[:, 0, 2] * (M[:, 1, 0] * M[:, 2, 1] - M[:, 1, 1] * M[:, 2, 0]))

    raise ValueError(f"batched determinants are only implemented up to 3x3 (was {s}x{s})")


def _completion_cofactors(V):
    """
    For a g x (g-1) integer matrix V, the integer vector c with det([V | w]) = c . w
    """
    g = V.shape[0]
    cof = []

    for i in range(g):
        minor = np.delete(V, i, axis=0)[np.newaxis]
        cof.append((-1) ** (i + g - 1) * int(_batched_det(minor)[0]))

    return np.array(cof, dtype=np.int64)


def min_submatrix_det(T, search_bound):
    """
    m_{g-1}(T): the minimum determinant of the leading (g-1)-rowed block of T[U] over
    unimodular U whose entries lie in [-search_bound, search_bound].

    The leading block of T[U] only depends on the first g-1 columns V of U, so
    the columns V are enumerated, sorted by det(V^T T V), and the first one
    that completes to a unimodular U inside the box gives the minimum.

    Parameters:
      T (HalfIntegralMatrix) -- g x g with 2 <= g <= 4
      search_bound (int) -- the entry bound b >= 1

    Returns:
      Fraction -- the bounded-search value of m_{g-1}(T), which is an upper
                  bound of the true minimum and nonincreasing in search_bound
    """
    g = T.g
    b = int(search_bound)

    if g < 2:
        raise ValueError(f"min_submatrix_det() needs g >= 2 (was {g})")

    if g > 4:
        raise ValueError(f"min_submatrix_det() supports g <= 4 (was {g})")

    if b < 1:
        raise ValueError(f"search_bound must be a positive integer (was {b})")

    s = g - 1
    values = np.arange(-b, b + 1, dtype=np.int64)
    check_work(len(values) ** (g * s) + len(values) ** g)

    V = np.array(list(itertools.product(values, repeat=g * s)), dtype=np.int64).reshape(-1, g, s)
    twice = np.array(T.twice_m, dtype=np.int64)

    # leading block of (2T)[U] is V^T (2T) V
    blocks = np.einsum('nia,ij,njb->nab', V, twice, V)
    dets = _batched_det(blocks)

    order = np.argsort(dets, kind='stable')
    order = order[dets[order] > 0]

    W = np.array(list(itertools.product(values, repeat=g)), dtype=np.int64)
    checked = 0

    for idx in order:
        checked += 1
        completions = W @ _completion_cofactors(V[idx])

        if np.any(np.abs(completions) == 1):
            log_debug(f"-- min_submatrix_det:  found after {checked} candidates, V={V[idx].tolist()}")
            value = Fraction(int(dets[idx]), 2 ** s)
            logging.warning(f"m_{s}(T) = {value} is from a bounded search over entries in [-{b},{b}], so it is an upper bound of the minimum")
            return value

    raise ValueError(f"no unimodular matrix with entries in [-{b},{b}] was found")


def reduction_ratio(T, search_bound):
    """
    m_{g-1}(T) / D^(1-1/g) with D = det(2T), which is invariant under T -> t*T.
    The m_{g-1} value comes from the bounded search of min_submatrix_det().
    """
    value = min_submatrix_det(T, search_bound)
    D = T.det2m
    g = T.g

    logging.debug(f"reduction_ratio:  m_{g-1}(T)={value}  D={D}  (bounded search with b={search_bound})")
    return float(value) / D ** (1.0 - 1.0 / g)
