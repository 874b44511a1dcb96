#!/usr/bin/env python3
"""
Generalized quadratic Gauss sums  G(a,b;c) = sum_{n mod c} e_c(a*n^2 + b*n)

Closed forms at prime powers, with a = p^alpha * a', b = p^alpha * b', mu = nu - alpha:

  a = 0 mod p^nu    G = p^nu if p^nu | b, else 0
  p^alpha !| b      G = 0
  p odd             G = p^alpha * eps(p^mu) * (a'/p^mu) * p^(mu/2) * e_{p^mu}(-b'^2 * (4a')^-1)
  p = 2, mu = 1     G = 2^nu if b' is odd, else 0
  p = 2, mu >= 2    G = 0 if b' is odd, otherwise with b' = 2b''
                    G = 2^alpha * (2/a')^mu * (1 + i^a') * 2^(mu/2) * e_{2^mu}(-b''^2 * a'^-1)

The odd-p phase is the same as e_{p^(nu+alpha)}(-b^2 * (4a/p^alpha)^-1) with the inverse
taken mod p^(nu+alpha).  Composite moduli are assembled from the prime powers with
G(a,b;c1*c2) = G(a*c2,b;c1) * G(a*c1,b;c2) for coprime c1, c2.
"""
import sys
import math
import cmath

import numpy as np

from .arith import factorize, mod_inverse, ord_p, jacobi_symbol, epsilon_factor, kronecker_two, check_modulus
from .utils import get_option, WorkLimitError


EPSILON = sys.float_info.epsilon

# rounding bound (in units of EPSILON) for one e(k/c) term folded into a sum
TERM_ERROR = 8

# the enumerations are binned in chunks of this many terms
CHUNK_SIZE = 2**20


class ExpSumValue:
    """
    A complex value together with a guaranteed bound on its absolute error.

    Parameters:
      value (complex) -- the computed value
      abs_error (float) -- bound on |computed - exact|
      notes (list[str]) -- flags attached by the evaluator (e.g. 'heuristic-tail')
    """
    def __init__(self, value, abs_error=0.0, notes=None):
        self.value = complex(value)
        self.abs_error = float(abs_error)
        self.notes = list(notes) if notes else []

        if not (self.abs_error >= 0 and math.isfinite(self.abs_error)):
            raise ValueError(f"abs_error must be finite and nonnegative (was {abs_error})")

    @staticmethod
    def exact(value):
        """
        A value that is known exactly (like 0 or an integer count).
        """
        return ExpSumValue(value, 0.0)

    @property
    def real(self):
        return self.value.real

    @property
    def imag(self):
        return self.value.imag

    def __abs__(self):
        return abs(self.value)

    def conjugate(self):
        return ExpSumValue(self.value.conjugate(), self.abs_error, self.notes)

    def __add__(self, other):
        other = _as_value(other)
        value = self.value + other.value
        return ExpSumValue(value, self.abs_error + other.abs_error + EPSILON * abs(value), _merge_notes(self, other))

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-_as_value(other))

    def __neg__(self):
        return ExpSumValue(-self.value, self.abs_error, self.notes)

    def __mul__(self, other):
        other = _as_value(other)
        value = self.value * other.value

        abs_error = (abs(self.value) * other.abs_error + abs(other.value) * self.abs_error
                     + self.abs_error * other.abs_error + 2 * EPSILON * abs(value))

        return ExpSumValue(value, abs_error, _merge_notes(self, other))

    __rmul__ = __mul__

    def scale(self, factor, rel_error=0.0):
        """
        Multiply by a real or complex factor that carries a relative error.
        """
        value = self.value * factor
        abs_error = abs(factor) * self.abs_error + (rel_error + 2 * EPSILON) * abs(value)
        return ExpSumValue(value, abs_error, self.notes)

    def close(self, other, tol=0.0):
        """
        Returns true if the two values agree within their combined error bounds (plus tol)
        """
        other = _as_value(other)
        return abs(self.value - other.value) <= self.abs_error + other.abs_error + tol

    def to_dict(self):
        """
        Returns {re, im, abs_error} (plus notes when there are any) for JSON output
        """
        d = {'re': self.value.real, 'im': self.value.imag, 'abs_error': self.abs_error}

        if self.notes:
            d['notes'] = list(self.notes)

        return d

    def __repr__(self):
        return f"ExpSumValue({self.value:.12g} +/- {self.abs_error:.3g}{', ' + str(self.notes) if self.notes else ''})"


def _as_value(x):
    if isinstance(x, ExpSumValue):
        return x
    return ExpSumValue.exact(x)


def _merge_notes(x, y):
    notes = list(x.notes)

    for note in y.notes:
        if note not in notes:
            notes.append(note)

    return notes


def root_of_unity(k, c):
    """
    e_c(k) = exp(2*pi*i*k/c) for an integer k, reduced to the nearest residue first
    """
    k = int(k) % c

    if 2 * k > c:
        k -= c

    return cmath.exp(2j * math.pi * k / c)


def root_of_unity_sum(counts, c):
    """
    Fold a histogram of integer phases into sum_k counts[k] * e_c(k)

    Parameters:
      counts (array) -- length-c array of integer multiplicities (negative for subtracted terms)
      c (int) -- the modulus

    Returns:
      ExpSumValue -- with a rounding bound proportional to the number of terms
    """
    counts = np.asarray(counts, dtype=np.int64)

    if len(counts) != c:
        raise ValueError(f"expected {c} phase counts (was {len(counts)})")

    # pair residues k and c-k so every angle lies in [-pi, pi]
    k = np.arange(c, dtype=np.float64)
    k = np.where(2 * k > c, k - c, k)
    angles = 2.0 * np.pi * k / c

    weights = counts.astype(np.float64)
    re = math.fsum(weights * np.cos(angles))
    im = math.fsum(weights * np.sin(angles))

    terms = int(np.abs(counts).sum())
    return ExpSumValue(complex(re, im), TERM_ERROR * EPSILON * terms)


def phase_histogram(phases, c, counts=None):
    """
    Accumulate integer phases (already reduced to [0,c)) into a length-c histogram.
    """
    binned = np.bincount(np.asarray(phases, dtype=np.int64), minlength=c)

    if counts is None:
        return binned.astype(np.int64)

    counts += binned
    return counts


def check_work(work):
    """
    Raise WorkLimitError if an enumeration of this many terms exceeds the configured limit
    """
    limit = get_option('work_limit')

    if work > limit:
        raise WorkLimitError(work, limit)


def gauss_sum_brute(a, b, c):
    """
    Evaluate G(a,b;c) by enumerating n mod c.

    The phases a*n^2 + b*n are reduced mod c as integers and binned, so the
    only floating-point work is the final fold over the c roots of unity.
    """
    c = check_modulus(c)
    check_work(c)

    if c >= 2**31:
        raise ValueError(f"brute-force modulus {c} is too large (squared residues must fit in 64 bits)")

    a %= c
    b %= c
    counts = None

    for start in range(0, c, CHUNK_SIZE):
        n = np.arange(start, min(start + CHUNK_SIZE, c), dtype=np.int64)
        phases = (a * (n * n % c) + b * n) % c
        counts = phase_histogram(phases, c, counts)

    return root_of_unity_sum(counts, c)


def _closed_value(scale, unit, sqrt_q, phase, q):
    """
    Assemble scale * unit * sqrt(q) * e_q(phase) with its rounding bound.
    """
    value = scale * unit * math.sqrt(sqrt_q) * root_of_unity(phase, q)
    return ExpSumValue(value, 6 * EPSILON * abs(value))


def gauss_sum_prime_power(a, b, p, nu):
    """
    Evaluate G(a,b;p^nu) in closed form (see the module docstring for the cases).

    Parameters:
      a, b (int) -- the quadratic and linear coefficients
      p (int) -- a prime
      nu (int) -- exponent >= 1

    Returns:
      ExpSumValue -- exactly 0 in the vanishing cases
    """
    if nu < 1:
        raise ValueError(f"prime power exponent must be >= 1 (was {nu})")

    q = p ** nu
    a %= q
    b %= q

    if a == 0:
        return ExpSumValue.exact(q if b == 0 else 0)

    alpha = ord_p(a, p)
    p_alpha = p ** alpha

    if b % p_alpha != 0:
        return ExpSumValue.exact(0)

    mu = nu - alpha
    pm = p ** mu
    a1 = (a // p_alpha) % pm
    b1 = (b // p_alpha) % pm

    if p != 2:
        unit = epsilon_factor(pm) * jacobi_symbol(a1, pm)
        phase = -b1 * b1 * mod_inverse(4 * a1, pm)
        return _closed_value(p_alpha, unit, pm, phase, pm)

    if mu == 1:
        return ExpSumValue.exact(2 * p_alpha if b1 % 2 == 1 else 0)

    if b1 % 2 == 1:
        return ExpSumValue.exact(0)

    b2 = b1 // 2
    unit = kronecker_two(a1) ** mu * (1+1j if a1 % 4 == 1 else 1-1j)  # (1 + i^a1)
    phase = -b2 * b2 * mod_inverse(a1, pm)

    return _closed_value(p_alpha, unit, pm, phase, pm)


def gauss_sum(a, b, c):
    """
    Evaluate G(a,b;c) for any c >= 1 as the product over the prime powers q || c
    of G(a*c/q, b; q), each in closed form.
    """
    c = check_modulus(c)
    result = ExpSumValue.exact(1)

    for p, nu in factorize(c):
        q = p ** nu
        result = result * gauss_sum_prime_power(a * (c // q), b, p, nu)

        if result.value == 0 and result.abs_error == 0:
            break

    return result
