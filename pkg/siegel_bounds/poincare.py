#!/usr/bin/env python3
"""
Fourier coefficients of the Jacobi Poincare series P_{k,m;(n,r)}

  g(n',r') = delta_m(n,r,n',r') + 2 pi i^k det(2m)^(-1/2) (D'/D)^(k/2 - g/4 - 1/2)
             * sum_{c >= 1} e_{2c}(r^T m^-1 r') H_{m,c}(n,r,n',r') J_{k-g/2-1}(2 pi sqrt(D D') / (det(2m) c)) c^(-g/2-1)

for weights k > g/2 + 2.  The c-series is truncated at c_max, and the reported
abs_error adds a tail estimate to the accumulated rounding (flagged 'heuristic-tail').
"""
import math
import logging

from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction

from .arith import divisors
from .bessel import bessel_j, bessel_small_bound
from .forms import HalfIntegralMatrix, JacobiDatum
from .gauss import ExpSumValue, root_of_unity, EPSILON
from .kloosterman import KloostermanParams, kloosterman
from .utils import get_option, RangeError, ConsistencyError


# relative accuracy assumed for one Bessel evaluation
BESSEL_REL_ERROR = 1e-13

# safety factor applied to the tail estimate
TAIL_SAFETY = 4

# adaptive truncation starts here and doubles up to max_c
ADAPTIVE_START = 16


class PoincareParams:
    """
    The arguments (k, m, n, r, n', r') of a Poincare series coefficient.

    Parameters:
      k (int) -- the weight
      datum (JacobiDatum) -- (n, r, m) of the series
      n2 (int), r2 (list[int]) -- the coefficient index (n', r')
      tol (float) -- convergence tolerance for adaptive truncation
      permissive (bool) -- allow k <= g/2 + 2 with a warning (defaults to the 'permissive' option)
    """
    def __init__(self, k, datum, n2, r2, tol=1e-10, permissive=None):
        self.k = int(k)
        self.datum = datum
        self.datum2 = JacobiDatum(n2, r2, datum.m)
        self.tol = float(tol)
        self.notes = []

        if self.k < 1:
            raise ValueError(f"weight must be a positive integer (was {k})")

        if not (self.tol > 0):
            raise ValueError(f"tol must be positive (was {tol})")

        if permissive is None:
            permissive = get_option('permissive')

        g = datum.g

        if not self.k > Fraction(g, 2) + 2:
            if not permissive:
                raise RangeError(f"the coefficient formula needs k > g/2 + 2 (k={self.k}, g={g}), use --permissive to evaluate anyway")
            logging.warning(f"k={self.k} is outside the validity range k > g/2 + 2 (g={g})")
            self.notes.append('outside-validity-range')

        if self.k <= Fraction(g, 2) + Fraction(3, 2):
            logging.warning(f"the c-series tail doesn't decay for k <= g/2 + 3/2 (k={self.k}, g={g})")
            self.notes.append('divergent-tail')

    @staticmethod
    def create(k, m, n, r, n2=None, r2=None, **kwargs):
        """
        Build the params from plain values, with (n2,r2) defaulting to (n,r)
        """
        if not isinstance(m, HalfIntegralMatrix):
            m = HalfIntegralMatrix(m)

        datum = JacobiDatum(n, r, m)

        return PoincareParams(k, datum,
                              n if n2 is None else n2,
                              r if r2 is None else r2, **kwargs)

    def flipped(self):
        """
        The same params at (n', -r')
        """
        return PoincareParams(self.k, self.datum, self.n2, [-x for x in self.r2], tol=self.tol, permissive=True)

    @property
    def m(self):
        return self.datum.m

    @property
    def g(self):
        return self.datum.g

    @property
    def n2(self):
        return self.datum2.n

    @property
    def r2(self):
        return self.datum2.r

    @property
    def order(self):
        """
        The Bessel order k - g/2 - 1 (exact)
        """
        return self.k - Fraction(self.g, 2) - 1

    @property
    def argument(self):
        """
        A = 2 pi sqrt(D D') / det(2m), so the c-th Bessel argument is A/c
        """
        return 2 * math.pi * math.sqrt(self.datum.D * self.datum2.D) / self.m.det2m

    def to_dict(self):
        return {'k': self.k, 'm': self.m.to_dict(), 'n': self.datum.n, 'r': list(self.datum.r),
                'n2': self.n2, 'r2': list(self.r2), 'D': self.datum.D, 'D2': self.datum2.D}


def delta_term(m, n, r, n2, r2):
    """
    1 if D' = D and r' - r lies in 2m Z^g, else 0.
    Membership is decided exactly: (2m) x = r' - r has x = adj(2m)(r' - r) / det(2m).
    """
    if not isinstance(m, HalfIntegralMatrix):
        m = HalfIntegralMatrix(m)

    D = JacobiDatum(n, r, m, check=False).D
    D2 = JacobiDatum(n2, r2, m, check=False).D

    if D != D2:
        return 0

    adj = m.adjugate_twice()
    diff = [int(b) - int(a) for a, b in zip(r, r2)]

    for i in range(m.g):
        if sum(adj[i][j] * diff[j] for j in range(m.g)) % m.det2m != 0:
            return 0

    return 1


def _prefactor(p):
    """
    2 pi i^k det(2m)^(-1/2) (D'/D)^(k/2 - g/4 - 1/2), with i^k exact and the power in log space
    """
    unit = (1, 1j, -1, -1j)[p.k % 4]
    exponent = Fraction(p.k, 2) - Fraction(p.g, 4) - Fraction(1, 2)
    log_ratio = math.log(p.datum2.D) - math.log(p.datum.D)
    magnitude = 2 * math.pi / math.sqrt(p.m.det2m) * math.exp(float(exponent) * log_ratio)
    return unit * magnitude


def _phase(q, c):
    """
    e_{2c}(q) = exp(pi i q / c) for an exact rational q = a/b, as the root of unity e_{2bc}(a)
    """
    return root_of_unity(q.numerator, 2 * q.denominator * c)


def series_term(p, c, q=None, method=None):
    """
    The c-th term e_{2c}(r^T m^-1 r') H_{m,c}(n,r,n',r') J_nu(A/c) c^(-g/2-1) (without the prefactor)
    """
    if q is None:
        q = p.m.bilinear_inverse(p.datum.r, p.r2)

    H = kloosterman(KloostermanParams(p.m, c, p.datum.n, p.datum.r, p.n2, p.r2), method)

    if H.value == 0 and H.abs_error == 0:
        return ExpSumValue.exact(0)

    J = bessel_j(p.order, p.argument / c)
    factor = _phase(q, c) * J * c ** (-p.g / 2 - 1)

    return H.scale(factor, BESSEL_REL_ERROR)


def _zeta_tail(s, J):
    """
    An upper bound for sum_{j > J} j^-s with s > 1
    """
    if J < 1:
        return 1 + 1 / (s - 1)
    return J ** (1 - s) / (s - 1)


def tail_estimate(p, c_max):
    """
    Heuristic bound of the series tail past c_max, from |H_{m,c}| <~ (D,c) c^((g+1)/2) det(2m)^(1/2)
    and |J_nu(t)| <= (t/2)^nu / Gamma(nu+1):

      TAIL_SAFETY * |prefactor| * det(2m)^(1/2) * (A/2)^nu / Gamma(nu+1) * sum_{d|D} d^(1-s) * sum_{j > c_max/d} j^-s

    with s = nu + 1/2.  Returns None when s <= 1 (the tail doesn't converge).
    """
    nu = float(p.order)
    s = nu + 0.5

    if s <= 1:
        return None

    total = sum(d ** (1 - s) * _zeta_tail(s, c_max // d) for d in divisors(p.datum.D))
    bessel = bessel_small_bound(nu, p.argument)

    return TAIL_SAFETY * abs(_prefactor(p)) * math.sqrt(p.m.det2m) * bessel * total


def _partial_sum(terms):
    """
    Sum a list of ExpSumValue terms in order, with compensated summation
    """
    re = math.fsum(term.value.real for term in terms)
    im = math.fsum(term.value.imag for term in terms)
    value = complex(re, im)
    abs_error = sum(term.abs_error for term in terms) + EPSILON * len(terms) * abs(value)
    return ExpSumValue(value, abs_error)


def _compute_terms(p, start, stop, method=None):
    """
    Terms for c in [start, stop], computed across the worker threads and returned in c order
    """
    q = p.m.bilinear_inverse(p.datum.r, p.r2)
    cs = range(start, stop + 1)
    threads = get_option('threads')

    if threads <= 1 or len(cs) <= 1:
        return [series_term(p, c, q, method) for c in cs]

    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(lambda c: series_term(p, c, q, method), cs))


def _assemble(p, terms, c_max):
    """
    delta + prefactor * (partial sum), with rounding and tail estimate folded into abs_error
    """
    delta = delta_term(p.m, p.datum.n, p.datum.r, p.n2, p.r2)
    series = _partial_sum(terms).scale(_prefactor(p))
    result = series + ExpSumValue.exact(delta)

    notes = list(p.notes)
    tail = tail_estimate(p, c_max)

    if tail is None:
        if 'divergent-tail' not in notes:
            notes.append('divergent-tail')
        tail = 0.0
    else:
        notes.append('heuristic-tail')

    return ExpSumValue(result.value, result.abs_error + tail, notes)


def poincare_coefficient(p, c_max=None, max_c=1024, method=None):
    """
    Evaluate g_{k,m;(n,r)}(n',r') with the c-series truncated at c_max.

    Parameters:
      p (PoincareParams) -- the arguments
      c_max (int) -- the truncation point (0 gives the delta term alone).  If None,
                     c_max doubles from 16 until two successive partial sums agree
                     within p.tol, or max_c is reached.
      max_c (int) -- cap for the adaptive truncation
      method (str) -- Kloosterman evaluation strategy (see kloosterman.kloosterman)

    Returns:
      ExpSumValue -- with notes 'heuristic-tail', and 'not-converged' if the adaptive
                     truncation hit max_c
    """
    if c_max is not None:
        c_max = int(c_max)
        if c_max < 0:
            raise ValueError(f"c_max must be nonnegative (was {c_max})")
        return _assemble(p, _compute_terms(p, 1, c_max, method), c_max)

    C = min(ADAPTIVE_START, max_c)
    terms = _compute_terms(p, 1, C, method)
    previous = _assemble(p, terms, C)

    while True:
        if C >= max_c:
            logging.warning(f"Poincare series didn't converge to tol={p.tol:g} by c_max={C}")
            previous.notes.append('not-converged')
            return previous

        C_next = min(2 * C, max_c)
        terms += _compute_terms(p, C + 1, C_next, method)
        current = _assemble(p, terms, C_next)
        logging.debug(f"Poincare series c_max={C_next}  value={current.value}  change={abs(current.value - previous.value):.3g}")

        if abs(current.value - previous.value) <= p.tol:
            return current

        C = C_next
        previous = current


def poincare_coefficient_pm(p, c_max=None, **kwargs):
    """
    g^+-(n',r') = g(n',r') + (-1)^k g(n',-r'), which is real.

    Raises ConsistencyError if the imaginary part exceeds the abs_error.
    """
    plus = poincare_coefficient(p, c_max, **kwargs)
    minus = poincare_coefficient(p.flipped(), c_max, **kwargs)

    result = plus + minus if p.k % 2 == 0 else plus - minus
    slack = 8 * EPSILON * (1 + abs(result.value))

    if abs(result.value.imag) > result.abs_error + slack:
        raise ConsistencyError(f"combined coefficient isn't real:  {result}  (params {p.to_dict()})")

    return ExpSumValue(result.value.real, result.abs_error, result.notes)


def diagonal_coefficient(k, datum, c_max=None, **kwargs):
    """
    The coefficient b_{n,r}(P_{k,m;(n,r)}) at (n',r') = (n,r)
    """
    return poincare_coefficient_pm(PoincareParams(k, datum, datum.n, datum.r), c_max, **kwargs)


def petersson_lambda(k, g, det2m, D):
    """
    2^(-g/2) Gamma(k - g/2 - 1) (2 pi)^(-k + g/2 + 1) det(2m)^(k - (g+3)/2) D^(-k + g/2 + 1)
    evaluated in log space.
    """
    x = Fraction(k) - Fraction(g, 2) - 1

    if x <= 0:
        raise RangeError(f"the Gamma argument k - g/2 - 1 must be positive (k={k}, g={g})")

    if det2m < 1 or D < 1:
        raise ValueError(f"det2m and D must be positive integers (were {det2m}, {D})")

    log_value = (-g / 2 * math.log(2) + math.lgamma(float(x))
                 + float(-x) * math.log(2 * math.pi)
                 + float(Fraction(k) - Fraction(g + 3, 2)) * math.log(det2m)
                 + float(-x) * math.log(D))

    return math.exp(log_value)
