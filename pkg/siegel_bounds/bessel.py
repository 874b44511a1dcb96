#!/usr/bin/env python3
import math

from fractions import Fraction

import mpmath


MAX_ARGUMENT = 1e6

# the asymptotic expansion is accepted once its terms fall below this (relative)
HANKEL_TOLERANCE = 1e-17


def _check_args(nu, t):
    if isinstance(nu, Fraction):
        nu = float(nu)

    nu = float(nu)
    t = float(t)

    if not math.isfinite(nu) or nu < 0:
        raise ValueError(f"Bessel order must be a nonnegative real (was {nu})")

    if not (t > 0):
        raise ValueError(f"Bessel argument must be positive (was {t})")

    if t > MAX_ARGUMENT:
        raise ValueError(f"Bessel argument {t} is above the supported maximum of {MAX_ARGUMENT:g}")

    return nu, t


def crossover(nu):
    """
    The argument above which the Hankel expansion is used for order nu.
    Past max(30, 2nu, nu^2) the expansion's terms shrink from the first one on.
    """
    return max(30.0, 2.0 * nu, nu * nu)


def bessel_series(nu, t):
    """
    Ascending power series  J_nu(t) = sum_k (-1)^k (t/2)^(2k+nu) / (k! Gamma(k+nu+1))

    The alternating terms grow to about e^t before they decay, so the working
    precision is raised by that many digits.
    """
    nu, t = _check_args(nu, t)
    digits = 30 + int(t / math.log(10)) + 1

    with mpmath.workdps(digits):
        half = mpmath.mpf(t) / 2
        x2 = half * half
        term = half ** nu / mpmath.gamma(nu + 1)
        total = term
        k = 0

        while True:
            k += 1
            term = -term * x2 / (k * (k + nu))
            total += term

            if k > half and abs(term) < abs(total) * mpmath.mpf(10) ** (-25):
                break
            if term == 0:
                break

        return float(total)


def bessel_hankel(nu, t):
    """
    Hankel asymptotic expansion for large t,

      J_nu(t) = sqrt(2/(pi t)) * (P cos(chi) - Q sin(chi)),  chi = t - nu*pi/2 - pi/4

    where P and Q are the even and odd parts of sum_k (-1)^floor(k/2) a_k(nu) / t^k.
    Returns None if the expansion doesn't reach HANKEL_TOLERANCE before its terms grow.
    """
    nu, t = _check_args(nu, t)

    with mpmath.workdps(30):
        mu = 4 * mpmath.mpf(nu) ** 2
        x = mpmath.mpf(t)
        P = mpmath.mpf(1)
        Q = mpmath.mpf(0)
        a = mpmath.mpf(1)
        last = mpmath.inf
        converged = False

        for k in range(1, 200):
            a = a * (mu - (2 * k - 1) ** 2) / (k * 8 * x)

            if abs(a) > last:
                break

            if k % 2 == 1:
                Q += (-1) ** ((k - 1) // 2) * a
            else:
                P += (-1) ** (k // 2) * a

            last = abs(a)

            if last < HANKEL_TOLERANCE:
                converged = True
                break

        if not converged:
            return None

        chi = x - mpmath.mpf(nu) * mpmath.pi / 2 - mpmath.pi / 4
        return float(mpmath.sqrt(2 / (mpmath.pi * x)) * (P * mpmath.cos(chi) - Q * mpmath.sin(chi)))


def bessel_j(nu, t):
    """
    Bessel function of the first kind J_nu(t) for real order nu >= 0 and 0 < t <= 1e6.

    Parameters:
      nu (float|Fraction) -- the order
      t (float) -- the argument

    Returns:
      float -- the power series for t <= crossover(nu), otherwise the Hankel expansion
    """
    nu, t = _check_args(nu, t)

    if t > crossover(nu):
        value = bessel_hankel(nu, t)
        if value is not None:
            return value

    return bessel_series(nu, t)


def bessel_small_bound(nu, t):
    """
    The bound |J_nu(t)| <= (t/2)^nu / Gamma(nu+1), valid for all t > 0 and nu >= 0
    """
    nu = float(nu)
    return math.exp(nu * math.log(t / 2) - math.lgamma(nu + 1))


def bessel_large_bound(t):
    """
    The bound |J_nu(t)| <= sqrt(2/(pi t)), valid for t >= nu^2
    """
    return math.sqrt(2 / (math.pi * t))
