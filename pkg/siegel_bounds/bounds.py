#!/usr/bin/env python3
"""
Exact-rational exponent algebra for the coefficient bounds.

Every bound is a product of powers of D, det(2m), d, c, A, B (and D^eps style
epsilon factors), so it's kept as an ExponentExpr:  a map from symbol to its
exponent plus the coefficient of epsilon.  Constant factors are dropped.
"""
import math
import logging

from fractions import Fraction

from .utils import RangeError, get_option


SYMBOLS = ('D', 'det2m', 'd', 'c', 'A', 'B')


class ExponentExpr:
    """
    prod_s s^coefficients[s] * X^(epsilon * eps), with exact Fraction exponents.

    Parameters:
      coefficients (dict) -- symbol -> exponent (int, Fraction, or 'p/q' string)
      epsilon (Fraction) -- the coefficient of epsilon
    """
    def __init__(self, coefficients=None, epsilon=0):
        self.coefficients = {}

        for symbol, value in (coefficients or {}).items():
            if symbol not in SYMBOLS:
                raise ValueError(f"unknown exponent symbol '{symbol}' (valid symbols are {SYMBOLS})")
            value = Fraction(value)
            if value != 0:
                self.coefficients[symbol] = value

        self.epsilon = Fraction(epsilon)

    def __getitem__(self, symbol):
        if symbol not in SYMBOLS:
            raise KeyError(symbol)
        return self.coefficients.get(symbol, Fraction(0))

    def __add__(self, other):
        """
        Multiplying the underlying quantities adds their exponents
        """
        coefficients = dict(self.coefficients)

        for symbol, value in other.coefficients.items():
            coefficients[symbol] = coefficients.get(symbol, Fraction(0)) + value

        return ExponentExpr(coefficients, self.epsilon + other.epsilon)

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, factor):
        """
        Raising the quantity to a rational power multiplies every exponent
        """
        factor = Fraction(factor)
        return ExponentExpr({s: v * factor for s, v in self.coefficients.items()}, self.epsilon * factor)

    def substitute(self, symbol, expr):
        """
        Replace the symbol by the quantity expr (so symbol^e becomes expr^e)
        """
        if symbol not in SYMBOLS:
            raise ValueError(f"unknown exponent symbol '{symbol}'")

        power = self[symbol]
        rest = ExponentExpr({s: v for s, v in self.coefficients.items() if s != symbol}, self.epsilon)

        return rest + expr.scale(power)

    def without_epsilon(self):
        return ExponentExpr(self.coefficients, 0)

    def equals(self, other, ignore_epsilon=False):
        if ignore_epsilon:
            return self.coefficients == other.coefficients
        return self == other

    def __eq__(self, other):
        if not isinstance(other, ExponentExpr):
            return NotImplemented
        return self.coefficients == other.coefficients and self.epsilon == other.epsilon

    def __hash__(self):
        return hash((tuple(sorted(self.coefficients.items())), self.epsilon))

    def log_value(self, values):
        """
        The natural log of the quantity for positive symbol values (dict symbol -> float).
        The epsilon part is left out.
        """
        total = 0.0

        for symbol, power in self.coefficients.items():
            if symbol not in values:
                raise KeyError(f"no value given for '{symbol}'")
            if values[symbol] <= 0:
                raise ValueError(f"'{symbol}' must be positive (was {values[symbol]})")
            total += float(power) * math.log(values[symbol])

        return total

    def to_dict(self):
        d = {symbol: fraction_str(self[symbol]) for symbol in SYMBOLS if symbol in self.coefficients}

        if self.epsilon:
            d['epsilon'] = fraction_str(self.epsilon)

        return d

    def __str__(self):
        parts = [f"{symbol}^({fraction_str(self[symbol])})" for symbol in SYMBOLS if symbol in self.coefficients]

        if self.epsilon:
            parts.append(f"[eps x {fraction_str(self.epsilon)}]")

        return ' '.join(parts) if parts else '1'

    def __repr__(self):
        return f"ExponentExpr({self})"


def fraction_str(x):
    """
    Format an exact rational as 'p/q' (or 'p' when it's an integer)
    """
    x = Fraction(x)

    if x.denominator == 1:
        return str(x.numerator)

    return f"{x.numerator}/{x.denominator}"


def _check_genus(g, minimum=2):
    g = int(g)
    if g < minimum:
        raise RangeError(f"genus must be >= {minimum} (was {g})")
    return g


def in_theorem1_range(g, k):
    return Fraction(g, 2) + 1 < k < g


def in_theorem4_range(g, k):
    return Fraction(g + 3, 2) < k < g


def _check_theorem1_range(g, k):
    if not in_theorem1_range(g, k):
        raise RangeError(f"(g={g}, k={k}) is outside the range g/2 + 1 < k < g")


def _check_theorem4_range(g, k, permissive=False):
    if not in_theorem4_range(g, k):
        if not permissive:
            raise RangeError(f"(g={g}, k={k}) is outside the range (g+3)/2 < k < g")
        logging.warning(f"(g={g}, k={k}) is outside the range (g+3)/2 < k < g, evaluating anyway")
        return False
    return True


def alpha(g):
    """
    alpha_g = 1 / (4(g-1) + 4 floor((g-1)/2) + 2/(g+2))
    """
    g = _check_genus(g)
    return 1 / (4 * (g - 1) + 4 * ((g - 1) // 2) + Fraction(2, g + 2))


def c_g(g):
    """
    13/36 for g=2, 1/4 for g=3, and 1/(2g) + (1 - 1/g) alpha_g for g > 3
    """
    g = _check_genus(g)

    if g == 2:
        return Fraction(13, 36)
    elif g == 3:
        return Fraction(1, 4)

    return Fraction(1, 2 * g) + (1 - Fraction(1, g)) * alpha(g)


def theorem1_exponent(g, k):
    """
    The exponent k/2 + (g-k)/(2g(g-2)) - 1/(2g) - (1-1/g) alpha_g of D in the
    coefficient bound, for g/2 + 1 < k < g.
    """
    g = _check_genus(g, 3)
    _check_theorem1_range(g, k)
    return Fraction(k, 2) + Fraction(g - k, 2 * g * (g - 2)) - Fraction(1, 2 * g) - (1 - Fraction(1, g)) * alpha(g)


def tk_exponent(g, k, strict=True):
    """
    The previous exponent k/2 - (1 - 1/g) alpha_g, stated for (g+3)/2 < k < g.
    With strict=False the formula is evaluated outside of that range too.
    """
    g = _check_genus(g)

    if strict and not in_theorem4_range(g, k):
        raise RangeError(f"(g={g}, k={k}) is outside the range (g+3)/2 < k < g")

    return Fraction(k, 2) - (1 - Fraction(1, g)) * alpha(g)


def improvement_delta(g, k):
    """
    (g-k)/(2g(g-2)) - 1/(2g), the gain of theorem1_exponent over tk_exponent (always < 0)
    """
    g = _check_genus(g, 3)
    _check_theorem1_range(g, k)
    return Fraction(g - k, 2 * g * (g - 2)) - Fraction(1, 2 * g)


def theorem4_terms(g, k):
    """
    The summands of 1 + D^(g/2+eps)/det(2m)^((g+1)/2) * (1 + D^(k-g-1) det(2m)^(-k+g+1+(-k+g+1)/(g-1)+eps))
    expanded into three ExponentExprs.
    """
    g = _check_genus(g)
    half = Fraction(g, 2)

    first = ExponentExpr()
    second = ExponentExpr({'D': half, 'det2m': -Fraction(g + 1, 2)}, 1)
    inner = ExponentExpr({'D': k - g - 1, 'det2m': -k + g + 1 + Fraction(-k + g + 1, g - 1)}, 1)

    return [first, second, second + inner]


def theorem4_bound(g, k, det2m, D, epsilon=0, permissive=None):
    """
    Evaluate the coefficient bound 1 + D^(g/2+eps)/det(2m)^((g+1)/2) * (1 + D^(k-g-1) det(2m)^(...+eps))
    in log space.

    Parameters:
      g, k (int) -- genus and weight with (g+3)/2 < k < g (or permissive)
      det2m, D (int) -- positive integers
      epsilon (Fraction) -- the value substituted for eps
    """
    if permissive is None:
        permissive = get_option('permissive')

    g = _check_genus(g)
    _check_theorem4_range(g, k, permissive)

    if det2m < 1 or D < 1:
        raise ValueError(f"det2m and D must be positive (were {det2m}, {D})")

    epsilon = Fraction(epsilon)
    values = {'D': D, 'det2m': det2m}
    logs = []

    for term in theorem4_terms(g, k):
        # eps multiplies log D in the outer factor and log det(2m) in the inner one
        log = term.without_epsilon().log_value(values)
        if term.epsilon >= 1:
            log += float(epsilon) * math.log(D)
        if term.epsilon >= 2:
            log += float(epsilon) * math.log(det2m)
        logs.append(log)

    top = max(logs)
    return math.exp(top) * math.fsum(math.exp(x - top) for x in logs)


def poincare_range_exponents(g, k):
    """
    The three pieces of the c-sum after splitting at c = A and c = B, where
    A = 2 pi D / (d det(2m)):

      small   c <= A       A^(g/2) d^(g/2)
      middle  A <= c <= B  A^(k-g/2-1) d^(g/2) B^(-k+g+1)
      large   c >= B       B^((g+3)/2-k) A^(k-g/2-1) d^(1/2) det(2m)^(1/2)
    """
    g = _check_genus(g)
    half = Fraction(g, 2)
    power = k - half - 1

    return {
        'small': ExponentExpr({'A': half, 'd': half}, 2),
        'middle': ExponentExpr({'A': power, 'd': half, 'B': -k + g + 1}, 2),
        'large': ExponentExpr({'B': Fraction(g + 3, 2) - k, 'A': power, 'd': Fraction(1, 2), 'det2m': Fraction(1, 2)}),
    }


def optimal_B(g):
    """
    B = d^-1 det(2m)^(1/(g-1))
    """
    return ExponentExpr({'d': -1, 'det2m': Fraction(1, g - 1)})


def optimal_B_check(g, k):
    """
    Substitute B = d^-1 det(2m)^(1/(g-1)) into the middle and large range estimates
    and check that they coincide (ignoring eps).

    Returns:
      (ExponentExpr, ExponentExpr, bool) -- the two substituted expressions and whether they're equal
    """
    g = _check_genus(g, 3)
    _check_theorem4_range(g, k)

    ranges = poincare_range_exponents(g, k)
    B = optimal_B(g)

    middle = ranges['middle'].substitute('B', B)
    large = ranges['large'].substitute('B', B)

    return middle, large, middle.equals(large, ignore_epsilon=True)


def range_pipeline(g, k):
    """
    Carry the range estimates through to the coefficient bound:  substitute the
    optimal B, then A = D d^-1 det(2m)^-1, then multiply by det(2m)^(-1/2).
    The small range gives the second summand of theorem4_terms, the middle and
    large ranges the third one.

    Returns:
      dict -- name -> ExponentExpr for 'small', 'middle', 'large'
    """
    g = _check_genus(g, 3)
    ranges = poincare_range_exponents(g, k)
    A = ExponentExpr({'D': 1, 'd': -1, 'det2m': -1})
    B = optimal_B(g)
    normalize = ExponentExpr({'det2m': Fraction(-1, 2)})

    return {name: expr.substitute('B', B).substitute('A', A) + normalize for name, expr in ranges.items()}


def lemma22_jacobi_exponent(g, k):
    """
    |c_phi(n,r)| <~ |b_{n,r}|^(1/2) D^(k/2-g/4-1/2) det(2m)^(-(k/2-(g+3)/4)) ||phi||, without the
    |b_{n,r}|^(1/2) and ||phi|| factors
    """
    g = _check_genus(g, 1)
    return ExponentExpr({'D': Fraction(k, 2) - Fraction(g, 4) - Fraction(1, 2),
                         'det2m': -(Fraction(k, 2) - Fraction(g + 3, 4))})


def lemma51_exponent(g, k):
    """
    ||phi_m|| <~ det(2m)^(k/2 - alpha_g + eps) for the Fourier-Jacobi coefficients of a genus g form
    """
    return ExponentExpr({'det2m': Fraction(k, 2) - alpha(g)}, 1)


def lemma22_exponent(g, k):
    """
    a(T) <~ |b_{n,r}|^(1/2) D^(k/2-g/4-1/4) det(2m)^(g/4+1/2-alpha_g+eps), which is the
    Jacobi form bound at genus g-1 combined with the Fourier-Jacobi norm bound.
    """
    g = _check_genus(g)
    return lemma22_jacobi_exponent(g - 1, k) + lemma51_exponent(g, k)


def f_terms(g, k):
    """
    The three summands of f(m,D) = det(2m)^(g/2) + D^((g-1)/2+eps) (1 + D^(k-g) det(2m)^(-k+g+(g-k)/(g-2)+eps))
    """
    g = _check_genus(g, 3)
    first = ExponentExpr({'det2m': Fraction(g, 2)})
    second = ExponentExpr({'D': Fraction(g - 1, 2)}, 1)
    inner = ExponentExpr({'D': k - g, 'det2m': -k + g + Fraction(g - k, g - 2)}, 1)
    return [first, second, second + inner]


def genus_shift_check(g, k):
    """
    f(m,D) is det(2m)^(g/2) times the coefficient bound at genus g-1;
    returns true if the two spellings agree term by term (ignoring eps).
    """
    g = _check_genus(g, 3)
    shift = ExponentExpr({'det2m': Fraction(g, 2)})
    shifted = [shift + term for term in theorem4_terms(g - 1, k)]
    return all(a.equals(b, ignore_epsilon=True) for a, b in zip(f_terms(g, k), shifted))


def reduction_substitution(g):
    """
    det(2m) -> D^(1 - 1/g), from m_{g-1}(T) <~ D^(1-1/g)
    """
    return ExponentExpr({'D': 1 - Fraction(1, g)})


def dominance_check(g, k):
    """
    Substitute det(2m) -> D^(1-1/g) into the terms of f(m,D) and check that the last
    one has the largest D exponent.

    Returns:
      (bool, dict) -- whether the check passed, and a table with the det(2m) exponent of
                      each term and its D exponent after the substitution
    """
    g = _check_genus(g, 3)
    _check_theorem1_range(g, k)

    names = ['det_power', 'D_power', 'mixed']
    table = {}

    for name, term in zip(names, f_terms(g, k)):
        table[name] = {
            'det2m_exponent': term['det2m'],
            'D_exponent': term.substitute('det2m', reduction_substitution(g))['D'],
        }

    nonnegative = all(row['det2m_exponent'] >= 0 for row in table.values())
    dominant = all(table['mixed']['D_exponent'] >= row['D_exponent'] for row in table.values())

    return nonnegative and dominant, table


def assemble_theorem1(g, k):
    """
    Reassemble the coefficient exponent from its pieces in exact arithmetic:

      1. a(T) <~ |b|^(1/2) D^(k/2-g/4-1/4) det(2m)^(g/4+1/2-alpha_g)         (lemma22_exponent)
      2. |b| <~ det(2m)^(-g/2) f(m,D), keeping the dominant term of f
      3. det(2m) -> D^(1-1/g) on everything but det(2m)^(1/2-alpha_g)
      4. det(2m) -> D^(1-1/g) on the rest, since 1/2 - alpha_g > 0

    The genus g-1 coefficient bound behind step 2 needs k < g - 1, so k = g - 1
    is accepted with a warning.

    Returns:
      dict -- the ExponentExpr of each stage, with 'final' the D exponent as an ExponentExpr
    """
    g = _check_genus(g, 3)
    _check_theorem1_range(g, k)

    if not in_theorem4_range(g - 1, k):
        logging.warning(f"(g={g}, k={k}):  the genus {g-1} coefficient bound is stated for {Fraction(g + 2, 2)} < k < {g - 1}")

    stages = {}
    stages['lemma22'] = lemma22_exponent(g, k).without_epsilon()

    dominant = f_terms(g, k)[-1].without_epsilon()
    b = (ExponentExpr({'det2m': -Fraction(g, 2)}) + dominant).scale(Fraction(1, 2))
    stages['combined'] = stages['lemma22'] + b

    keep = ExponentExpr({'det2m': Fraction(1, 2) - alpha(g)})
    rest = stages['combined'] - keep
    stages['reduced'] = keep + rest.substitute('det2m', reduction_substitution(g))

    stages['final'] = stages['reduced'].substitute('det2m', reduction_substitution(g))
    return stages


def final_exponent_check(g, k):
    """
    True if the assembled D exponent equals theorem1_exponent(g, k) exactly
    """
    final = assemble_theorem1(g, k)['final']
    return set(final.coefficients) <= {'D'} and final['D'] == theorem1_exponent(g, k)


def valid_pairs(max_g, kind='theorem1'):
    """
    All integer (g,k) in the theorem1 range g/2 + 1 < k < g (or the theorem4 range) for g <= max_g
    """
    check = in_theorem1_range if kind == 'theorem1' else in_theorem4_range
    return [(g, k) for g in range(2, max_g + 1) for k in range(1, g) if check(g, k)]
