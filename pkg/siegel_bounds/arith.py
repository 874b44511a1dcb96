#!/usr/bin/env python3
import math

from .utils import get_option, NotInvertibleError, WorkLimitError


# moduli stay in the range that trial division factors in well under a second
MAX_MODULUS = 10**12


class Factorization(list):
    """
    Prime factorization of a positive integer, as a list of (prime, exponent)
    tuples with the primes strictly increasing and every exponent >= 1.
    The factorization of 1 is the empty list.
    """
    def __init__(self, pairs=()):
        super().__init__((int(p), int(e)) for p, e in pairs)

        last = 1

        for p, e in self:
            if p <= last or e < 1:
                raise ValueError(f"invalid factorization {list(self)} (primes must increase and exponents must be >= 1)")
            last = p

    @property
    def primes(self):
        return [p for p, e in self]

    def prime_powers(self):
        """
        Returns the list of p^e factors, in the same order as the primes.
        """
        return [p**e for p, e in self]

    def product(self):
        """
        Reassemble the integer that was factored.
        """
        return math.prod(self.prime_powers())


def factorize(n):
    """
    Factor n >= 1 by trial division.

    Raises WorkLimitError if it takes more trial divisors than the work limit.

    Parameters:
      n (int) -- the positive integer to factor

    Returns:
      Factorization -- the (prime, exponent) pairs, empty for n=1
    """
    n = int(n)

    if n < 1:
        raise ValueError(f"factorize() needs a positive integer (was {n})")

    pairs = []

    for p in (2, 3):
        e = 0
        while n % p == 0:
            n //= p
            e += 1
        if e:
            pairs.append((p, e))

    # candidates of the form 6k +/- 1
    p = 5
    step = 2
    trials = 0
    limit = get_option('work_limit')

    while p * p <= n:
        trials += 1

        if trials > limit:
            raise WorkLimitError(trials, limit)

        e = 0
        while n % p == 0:
            n //= p
            e += 1
        if e:
            pairs.append((p, e))
        p += step
        step = 6 - step

    if n > 1:
        pairs.append((n, 1))

    return Factorization(pairs)


def is_prime(n):
    """
    Returns true if n is a prime number.
    """
    n = int(n)

    if n < 2:
        return False

    f = factorize(n)
    return len(f) == 1 and f[0][1] == 1


def mod_inverse(a, c):
    """
    Return the inverse of a modulo c, canonicalized to [0,c)
    Raises NotInvertibleError if gcd(a,c) != 1
    """
    a = int(a)
    c = int(c)

    if c < 1:
        raise ValueError(f"modulus must be positive (was {c})")

    if c == 1:
        return 0

    if math.gcd(a, c) != 1:
        raise NotInvertibleError(f"{a} is not invertible mod {c} (gcd={math.gcd(a, c)})")

    return pow(a % c, -1, c)


def ord_p(a, p):
    """
    The exponent of the largest power of the prime p dividing a != 0
    """
    a = int(a)

    if a == 0:
        raise ValueError("ord_p(0) is undefined")

    if p < 2:
        raise ValueError(f"ord_p() needs a prime (was {p})")

    a = abs(a)
    e = 0

    while a % p == 0:
        a //= p
        e += 1

    return e


def jacobi_symbol(a, n):
    """
    Jacobi symbol (a/n) for odd n >= 1, by quadratic reciprocity.

    Returns:
      int -- one of -1, 0, 1  (0 iff gcd(a,n) > 1)
    """
    a = int(a)
    n = int(n)

    if n < 1 or n % 2 == 0:
        raise ValueError(f"jacobi_symbol() needs a positive odd modulus (was {n})")

    a %= n
    result = 1

    while a != 0:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result

        a, n = n, a

        if a % 4 == 3 and n % 4 == 3:
            result = -result

        a %= n

    return result if n == 1 else 0


def kronecker_two(a):
    """
    The symbol (2/a) for odd a, which is 1 if a = +-1 mod 8 and -1 if a = +-3 mod 8
    """
    if a % 2 == 0:
        raise ValueError(f"(2/a) needs odd a (was {a})")

    return 1 if a % 8 in (1, 7) else -1


def epsilon_factor(j):
    """
    The unit epsilon_j of the Gauss-sum evaluations: 1 if j = 1 mod 4, i if j = 3 mod 4
    """
    j = int(j)

    if j % 2 == 0:
        raise ValueError(f"epsilon_factor() needs an odd integer (was {j})")

    return 1+0j if j % 4 == 1 else 1j


def euler_phi(n):
    """
    Euler's totient of n >= 1
    """
    phi = int(n)

    for p, e in factorize(n):
        phi = phi // p * (p - 1)

    return phi


def units(c):
    """
    The residues d in [0,c) with gcd(d,c) = 1, in ascending order.
    For c=1 this is [0], the single class mod 1.
    """
    c = int(c)

    if c < 1:
        raise ValueError(f"modulus must be positive (was {c})")

    if c == 1:
        return [0]

    return [d for d in range(1, c) if math.gcd(d, c) == 1]


def divisors(n):
    """
    The positive divisors of n >= 1, in ascending order.
    """
    divs = [1]

    for p, e in factorize(n):
        divs = [d * p**i for d in divs for i in range(e + 1)]

    return sorted(divs)


def crt_pair(c1, c2):
    """
    For coprime c1, c2 returns (inverse of c2 mod c1, inverse of c1 mod c2),
    the twisting factors used when splitting a sum mod c1*c2 into its parts.
    """
    if math.gcd(c1, c2) != 1:
        raise NotInvertibleError(f"crt_pair() needs coprime moduli (was {c1}, {c2})")

    return mod_inverse(c2, c1), mod_inverse(c1, c2)


def check_modulus(c):
    """
    Validate a modulus for the exponential sums and return it as an int.
    """
    c = int(c)

    if c < 1:
        raise ValueError(f"modulus must be a positive integer (was {c})")

    if c > MAX_MODULUS:
        raise ValueError(f"modulus {c} is too large (max {MAX_MODULUS})")

    return c
