#!/usr/bin/env python3
"""
Higher-dimensional Kloosterman sums

  H_{m,c}(n,r,n',r') = sum_{lambda mod c} sum_{d mod c, (d,c)=1} e_c((m[lambda] + r^T lambda + n) * dbar + n'd + r'^T lambda)

Evaluation strategies:

  brute   enumerate lambda and d, bin the integer phases, fold the histogram once
  crt     split c = c1*c2 over coprime factors,
          H_{m,c}(n,r,n',r') = H_{c2 m,c1}(n*c2bar, r, n'*c2bar, r') * H_{c1 m,c2}(n*c1bar, r, n'*c1bar, r')
          with c2bar = c2^-1 mod c1 and c1bar = c1^-1 mod c2
  fast    at odd prime powers q with diagonal m, the lambda-sum factors into Gauss sums,
          H = sum_d e_q(n*dbar + n'd) * prod_j G(m_j*dbar, r_j*dbar + r'_j; q)
"""
import math
import functools
import logging

from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction

import numpy as np

from .arith import (factorize, is_prime, mod_inverse, ord_p, jacobi_symbol, epsilon_factor, units, euler_phi,
                    crt_pair, check_modulus)
from .forms import HalfIntegralMatrix, JacobiDatum
from .gauss import ExpSumValue, root_of_unity_sum, check_work, EPSILON
from .utils import get_option, StrategyUnavailable, KLOOSTERMAN_METHODS


class KloostermanParams:
    """
    All the arguments of H_{m,c}(n, r, n2, r2)

    Parameters:
      m (HalfIntegralMatrix) -- the index
      c (int) -- the modulus >= 1
      n, n2 (int) -- integers
      r, r2 (list[int]) -- integer vectors of length g
    """
    def __init__(self, m, c, n, r, n2, r2):
        if not isinstance(m, HalfIntegralMatrix):
            m = HalfIntegralMatrix(m)

        self.m = m
        self.c = check_modulus(c)
        self.n = int(n)
        self.r = m._check_vector(r)
        self.n2 = int(n2)
        self.r2 = m._check_vector(r2)

    @property
    def g(self):
        return self.m.g

    @staticmethod
    def pm(m, c, n, r, sign):
        """
        The arguments of H^+-_{m,c}(n,r) = H_{m,c}(n, r, n, +-r)
        """
        if sign not in (1, -1):
            raise ValueError(f"sign must be +1 or -1 (was {sign})")
        return KloostermanParams(m, c, n, r, n, [sign * x for x in r])

    def replace(self, **kwargs):
        args = dict(m=self.m, c=self.c, n=self.n, r=self.r, n2=self.n2, r2=self.r2)
        args.update(kwargs)
        return KloostermanParams(**args)

    def to_dict(self):
        return {'m': self.m.to_dict(), 'c': self.c, 'n': self.n, 'r': list(self.r), 'n2': self.n2, 'r2': list(self.r2)}

    def __repr__(self):
        return f"KloostermanParams(twice_m={self.m.twice_m}, c={self.c}, n={self.n}, r={self.r}, n2={self.n2}, r2={self.r2})"


def trivial_bound(g, c):
    """
    |H_{m,c}| <= c^g * phi(c), the number of terms in the sum
    """
    return c ** g * euler_phi(c)


def _lambda_classes(p):
    """
    Group lambda mod c by (m[lambda] + r^T lambda mod c, r2^T lambda mod c).

    Returns:
      (A, B, counts) -- int64 arrays over the distinct classes
    """
    c, g = p.c, p.g
    twice = p.m.twice_m

    grid = np.stack(np.meshgrid(*[np.arange(c, dtype=np.int64)] * g, indexing='ij'), axis=-1).reshape(-1, g)

    Q = np.zeros(len(grid), dtype=np.int64)

    for i in range(g):
        Q += (twice[i][i] // 2) % c * (grid[:, i] * grid[:, i] % c)
        for j in range(i + 1, g):
            Q += twice[i][j] % c * (grid[:, i] * grid[:, j] % c)
        Q %= c

    A = (Q + grid @ np.array([x % c for x in p.r], dtype=np.int64)) % c
    B = (grid @ np.array([x % c for x in p.r2], dtype=np.int64)) % c

    keys, counts = np.unique(A * c + B, return_counts=True)
    return keys // c, keys % c, counts.astype(np.int64)


def _brute_histogram(p, A, B, counts, ds):
    """
    Phase histogram over the units in ds, for the lambda classes (A, B, counts)
    """
    c = p.c
    hist = np.zeros(c, dtype=np.int64)
    base = (A + p.n % c) % c
    n2 = p.n2 % c

    for d in ds:
        dbar = mod_inverse(d, c)
        phases = (base * dbar + n2 * d % c + B) % c
        hist += np.bincount(phases, weights=counts, minlength=c).astype(np.int64)

    return hist


def kloosterman_brute(p):
    """
    Evaluate H_{m,c}(n,r,n2,r2) by direct enumeration of lambda mod c and the units d mod c.

    Raises WorkLimitError when c^g * phi(c) is above the configured work limit.
    The units are split across `threads` workers; the integer histograms are
    summed before the single floating-point fold, so the result is identical
    for any thread count.
    """
    c = p.c

    if c >= 2**31:
        raise ValueError(f"brute-force modulus {c} is too large")

    check_work(trivial_bound(p.g, c))

    A, B, counts = _lambda_classes(p)
    ds = units(c)

    threads = max(1, min(get_option('threads'), len(ds)))

    if threads == 1:
        hist = _brute_histogram(p, A, B, counts, ds)
    else:
        chunks = [ds[i::threads] for i in range(threads)]
        with ThreadPoolExecutor(max_workers=threads) as pool:
            hists = list(pool.map(lambda chunk: _brute_histogram(p, A, B, counts, chunk), chunks))
        hist = sum(hists)

    return root_of_unity_sum(hist, c)


@functools.lru_cache(maxsize=32)
def _legendre_table(p):
    """
    (x/p) for every residue x mod an odd prime p, as an int64 array
    """
    table = -np.ones(p, dtype=np.int64)
    table[0] = 0
    table[np.unique(np.arange(1, p, dtype=np.int64) ** 2 % p)] = 1
    table.flags.writeable = False
    return table


def kloosterman_diag_prime_power(m, p, nu, n, r, n2, r2):
    """
    Evaluate H_{m,p^nu}(n,r,n2,r2) for diagonal m and odd p, where the sum over
    lambda factors into one Gauss sum per coordinate:

      H = sum_{d unit} e_q(n*dbar + n2*d) * prod_j G(m_j*dbar, r_j*dbar + r2_j; q)

    Since ord_p(m_j*dbar) = ord_p(m_j), the closed form of every G(m_j*dbar, .; q)
    splits into a constant factor, a vanishing mask, the sign (d/p)^mu and an
    integer phase.  The whole (coordinate x unit) grid is evaluated at once and
    the signed phases are folded like the brute-force histogram.

    Raises StrategyUnavailable for non-diagonal m or p=2.
    """
    if not isinstance(m, HalfIntegralMatrix):
        m = HalfIntegralMatrix(m)

    if not m.is_diagonal:
        raise StrategyUnavailable("the Gauss-sum factorization needs a diagonal index m")

    if p == 2:
        raise StrategyUnavailable("the Gauss-sum factorization isn't implemented at p=2")

    if nu < 1:
        raise ValueError(f"prime power exponent must be >= 1 (was {nu})")

    if not is_prime(p):
        raise ValueError(f"the fast path needs a prime (was {p})")

    q = check_modulus(p ** nu)

    if q >= 2**31:
        raise ValueError(f"modulus {q} is too large (products of residues must fit in 64 bits)")

    g = m.g
    r = m._check_vector(r)
    r2 = m._check_vector(r2)

    ds = units(q)
    check_work(len(ds) * g)

    # per coordinate:  a_j = m_j = p^alpha * m1 with p^mu = q / p^alpha,
    # and m_j = 0 mod q taken as alpha = nu (G = q if b = 0 else 0)
    p_alpha, p_mu, inverse = [], [], []
    scale = 1.0 + 0j
    odd = 0
    sign = 1

    for mj in m.diagonal_entries:
        mj %= q
        alpha = nu if mj == 0 else ord_p(mj, p)
        pa = p ** alpha
        pm = q // pa
        m1 = (mj // pa) % pm

        p_alpha.append(pa)
        p_mu.append(pm)
        inverse.append(mod_inverse(4 * m1, pm))
        scale *= pa * math.sqrt(pm) * epsilon_factor(pm)

        if (nu - alpha) % 2 == 1:
            odd += 1
            sign *= jacobi_symbol(m1, p)

    PA = np.array(p_alpha, dtype=np.int64)[:, None]
    PM = np.array(p_mu, dtype=np.int64)[:, None]
    INV = np.array(inverse, dtype=np.int64)[:, None]

    d = np.array(ds, dtype=np.int64)
    dbar = np.array([pow(x, -1, q) for x in ds], dtype=np.int64)

    R = np.array([x % q for x in r], dtype=np.int64)[:, None]
    R2 = np.array([x % q for x in r2], dtype=np.int64)[:, None]

    b = (R * dbar + R2) % q
    signs = np.all(b % PA == 0, axis=0).astype(np.int64) * sign

    if odd % 2 == 1:
        signs *= _legendre_table(p)[d % p]

    if not np.any(signs):
        return ExpSumValue.exact(0)

    # e_{p^mu}(-b1^2 * (4*m1*dbar)^-1) with (4*m1*dbar)^-1 = (4*m1)^-1 * d, as a phase mod q
    b1 = (b // PA) % PM
    phases = (PM - b1 * b1 % PM) * INV % PM * (d % PM) % PM * PA
    phases = (n % q * dbar + n2 % q * d % q + phases.sum(axis=0)) % q

    hist = np.bincount(phases, weights=signs, minlength=q).astype(np.int64)
    return root_of_unity_sum(hist, q).scale(scale, 6 * EPSILON * g)


def _prime_power(p, prime, nu, fast):
    """
    Evaluate at c = prime^nu with the fast path when it's allowed and applies.
    """
    if fast and prime != 2 and p.m.is_diagonal:
        return kloosterman_diag_prime_power(p.m, prime, nu, p.n, p.r, p.n2, p.r2)

    return kloosterman_brute(p)


def kloosterman_crt(p, fast=False):
    """
    Evaluate H_{m,c} by splitting c over its prime powers (see the module docstring),
    with brute force at each prime power, or the diagonal fast path there if fast=True.
    """
    factors = factorize(p.c)

    if len(factors) <= 1:
        if p.c == 1:
            return ExpSumValue.exact(1)
        return _prime_power(p, factors[0][0], factors[0][1], fast)

    prime, nu = factors[0]
    c1 = prime ** nu
    c2 = p.c // c1
    c2bar, c1bar = crt_pair(c1, c2)

    left = KloostermanParams(p.m.scaled(c2), c1, p.n * c2bar, p.r, p.n2 * c2bar, p.r2)
    right = KloostermanParams(p.m.scaled(c1), c2, p.n * c1bar, p.r, p.n2 * c1bar, p.r2)

    return _prime_power(left, prime, nu, fast) * kloosterman_crt(right, fast)


def kloosterman(p, method=None):
    """
    Evaluate H_{m,c}(n,r,n2,r2) with the selected strategy.

    Parameters:
      p (KloostermanParams) -- the arguments
      method (str) -- 'brute', 'crt', 'fast' or 'auto' (defaults to the kloosterman_method option)

    'fast' needs a diagonal m and raises StrategyUnavailable otherwise.
    'auto' uses the fast path wherever it applies, and brute force elsewhere.
    """
    method = method or get_option('kloosterman_method')

    if method not in KLOOSTERMAN_METHODS:
        raise ValueError(f"method should be one of {KLOOSTERMAN_METHODS} (was '{method}')")

    if method == 'brute':
        return kloosterman_brute(p)
    elif method == 'crt':
        return kloosterman_crt(p, fast=False)
    elif method == 'fast' and not p.m.is_diagonal:
        raise StrategyUnavailable("the fast Kloosterman path needs a diagonal index m (use --method brute or crt)")

    return kloosterman_crt(p, fast=True)


def kloosterman_pm(m, c, n, r, sign, method=None):
    """
    H^+-_{m,c}(n,r) = H_{m,c}(n, r, n, +-r)
    """
    return kloosterman(KloostermanParams.pm(m, c, n, r, sign), method)


def bound_ratio_lemma32(m, c, n, r, sign, method=None):
    """
    |H^+-_{m,c}(n,r)| / ((D,c) * c^((g+1)/2) * det(2m)^(1/2))
    """
    datum = JacobiDatum(n, r, m)
    value = kloosterman_pm(datum.m, c, n, r, sign, method)

    bound = math.gcd(datum.D, c) * c ** ((datum.g + 1) / 2) * math.sqrt(datum.m.det2m)
    return abs(value) / bound


def bound_ratio_bk(m, c, n, r, sign, epsilon=0, method=None):
    """
    |H^+-_{m,c}(n,r)| / (c^(g+epsilon) * (D,c))
    """
    epsilon = Fraction(epsilon)

    if epsilon < 0:
        raise ValueError(f"epsilon must be nonnegative (was {epsilon})")

    datum = JacobiDatum(n, r, m)
    value = kloosterman_pm(datum.m, c, n, r, sign, method)

    bound = c ** (datum.g + float(epsilon)) * math.gcd(datum.D, c)
    return abs(value) / bound
