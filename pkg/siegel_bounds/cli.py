#!/usr/bin/env python3
#
# Command-line interface.  Run it with:
#
#   python3 -m siegel_bounds gauss --a 1 --b 0 --c 3 --method both
#   python3 -m siegel_bounds exponents --g 5 --k 4
#   python3 -m siegel_bounds kloosterman --m '{"g":1,"twice_m":[[2]]}' --c 3 --n 1 --r 0 --n2 1 --r2 0
#
# Results are printed to stdout as JSON (default), CSV, or a plain table.
# Exit codes:  0 success, 1 internal consistency error, 2 invalid input, 3 work limit exceeded.
#
import os
import sys
import csv
import json
import logging
import argparse

from fractions import Fraction

from .bessel import bessel_j, bessel_small_bound, bessel_large_bound
from .bounds import (alpha, c_g, theorem1_exponent, tk_exponent, improvement_delta, theorem4_bound,
                     in_theorem4_range, optimal_B_check, dominance_check,
                     assemble_theorem1, final_exponent_check, genus_shift_check, lemma22_exponent,
                     fraction_str, ExponentExpr)
from .forms import HalfIntegralMatrix, JacobiDatum, discriminant, discriminant_split, min_submatrix_det, reduction_ratio
from .gauss import ExpSumValue, gauss_sum, gauss_sum_brute
from .kloosterman import KloostermanParams, kloosterman, bound_ratio_lemma32, bound_ratio_bk
from .log import LogFormatter, log_dir
from .poincare import PoincareParams, poincare_coefficient, poincare_coefficient_pm, delta_term, petersson_lambda
from .sweep import empirical_exponent_sweep, load_family
from .utils import temporary_options, print_table, pprint_debug, WorkLimitError, ConsistencyError, KLOOSTERMAN_METHODS


EXIT_OK = 0
EXIT_CONSISTENCY = 1
EXIT_INVALID = 2
EXIT_WORK_LIMIT = 3

FORMATS = ['json', 'csv', 'plain']


def parse_vector(text):
    """
    Parse an integer vector given as '1,0,-1', '1 0 -1' or '[1,0,-1]'
    """
    text = str(text).strip()

    if text.startswith('['):
        try:
            values = json.loads(text)
        except json.JSONDecodeError as error:
            raise ValueError(f"malformed vector '{text}' ({error})")
    else:
        values = text.replace(',', ' ').split()

    try:
        return [int(x) for x in values]
    except (TypeError, ValueError):
        raise ValueError(f"vector entries must be integers (was '{text}')")


def parse_matrix(text):
    return HalfIntegralMatrix.from_json(text)


def parse_rational(text):
    try:
        return Fraction(str(text))
    except (ValueError, ZeroDivisionError):
        raise ValueError(f"expected a rational like 3/2 or 0.5 (was '{text}')")


def to_jsonable(value):
    """
    Convert results to JSON types:  Fractions become 'p/q' strings and ExpSumValues {re, im, abs_error}
    """
    if isinstance(value, Fraction):
        return fraction_str(value)
    elif isinstance(value, ExpSumValue):
        return value.to_dict()
    elif isinstance(value, ExponentExpr):
        return value.to_dict()
    elif isinstance(value, complex):
        return {'re': value.real, 'im': value.imag}
    elif isinstance(value, dict):
        return {str(key): to_jsonable(x) for key, x in value.items()}
    elif isinstance(value, (list, tuple)):
        return [to_jsonable(x) for x in value]
    elif isinstance(value, (HalfIntegralMatrix, JacobiDatum, KloostermanParams, PoincareParams)):
        return value.to_dict()

    return value


def flatten(value, prefix=''):
    """
    Flatten nested dicts into (dotted key, value) rows for CSV and plain output
    """
    rows = []

    if isinstance(value, dict):
        for key, x in value.items():
            rows.extend(flatten(x, f"{prefix}.{key}" if prefix else str(key)))
    elif isinstance(value, list) and any(isinstance(x, (dict, list)) for x in value):
        for i, x in enumerate(value):
            rows.extend(flatten(x, f"{prefix}.{i}" if prefix else str(i)))
    elif isinstance(value, list):
        rows.append([prefix, ' '.join(str(x) for x in value)])
    else:
        rows.append([prefix, value])

    return rows


def emit(result, format='json', file=None):
    """
    Print a result dict in the selected output format
    """
    file = file or sys.stdout
    result = to_jsonable(result)

    if format == 'json':
        print(json.dumps(result, indent=2), file=file)
    elif format == 'csv':
        writer = csv.writer(file, lineterminator='\n')
        writer.writerow(['key', 'value'])
        writer.writerows(flatten(result))
    elif format == 'plain':
        print_table(flatten(result), header=['key', 'value'], file=file)
    else:
        raise ValueError(f"format should be one of {FORMATS} (was '{format}')")


def _add_datum_args(parser, required_r=True):
    parser.add_argument('--m', type=str, required=True, help='the index as JSON {"g": int, "twice_m": [[...]]} or a path to a .json file')
    parser.add_argument('--n', type=int, required=True, help='the integer n')
    parser.add_argument('--r', type=str, required=required_r, default=None, help="the integer vector r (like '0' or '1,0'; use --r=-1,0 for leading minus signs)")
    parser.add_argument('--n2', type=int, default=None, help="the integer n' (defaults to n)")
    parser.add_argument('--r2', type=str, default=None, help="the integer vector r' (defaults to r)")


def build_parser():
    """
    Build the argparse parser with one subcommand per operation
    """
    common = argparse.ArgumentParser(add_help=False)

    common.add_argument('--format', type=str, default='json', choices=FORMATS, help='output format')
    common.add_argument('--work-limit', type=int, default=None, help='max terms of a single brute-force enumeration (default 10^8)')
    common.add_argument('--threads', type=int, default=None, help='max worker threads')
    common.add_argument('--permissive', action='store_const', const=True, default=None, help='evaluate formulas outside of their validity range (with a warning)')
    common.add_argument('--log-level', type=str, default='warning', choices=['debug', 'info', 'warning', 'error', 'critical'], help='the logging level to stderr')
    common.add_argument('--debug', '--verbose', action='store_true', help='set the logging level to debug/verbose mode')

    parser = argparse.ArgumentParser(prog='siegel_bounds', formatter_class=argparse.ArgumentDefaultsHelpFormatter,
                                     description='Exponential sums, Poincare series coefficients, and exponent bounds for Siegel and Jacobi cusp forms')

    subparsers = parser.add_subparsers(dest='command', metavar='command')
    subparsers.required = True

    def subcommand(name, help):
        return subparsers.add_parser(name, help=help, parents=[common], formatter_class=argparse.ArgumentDefaultsHelpFormatter)

    # gauss
    sub = subcommand('gauss', 'generalized Gauss sum G(a,b;c)')
    sub.add_argument('--a', type=int, required=True)
    sub.add_argument('--b', type=int, required=True)
    sub.add_argument('--c', type=int, required=True)
    sub.add_argument('--method', type=str, default='closed', choices=['brute', 'closed', 'both'])

    # kloosterman
    sub = subcommand('kloosterman', "Kloosterman sum H_{m,c}(n,r,n',r')")
    _add_datum_args(sub)
    sub.add_argument('--c', type=int, required=True)
    sub.add_argument('--sign', type=int, default=None, choices=[1, -1], help="evaluate H^+-(n,r) = H(n,r,n,+-r) and its bound ratios")
    sub.add_argument('--epsilon', type=str, default='0', help='epsilon for the c^(g+eps) bound ratio')
    sub.add_argument('--method', type=str, default=None, choices=KLOOSTERMAN_METHODS + ['both'], help="evaluation strategy ('both' compares brute force with auto)")

    # poincare
    sub = subcommand('poincare', 'Fourier coefficient of a Jacobi Poincare series')
    _add_datum_args(sub)
    sub.add_argument('--k', type=int, required=True, help='the weight')
    sub.add_argument('--c-max', type=int, default=None, help='truncation of the c-series (adaptive if omitted)')
    sub.add_argument('--max-c', type=int, default=1024, help='cap for the adaptive truncation')
    sub.add_argument('--tol', type=float, default=1e-10, help='convergence tolerance for the adaptive truncation')
    sub.add_argument('--pm', action='store_true', help="combine g(n',r') + (-1)^k g(n',-r')")
    sub.add_argument('--method', type=str, default=None, choices=KLOOSTERMAN_METHODS, help='Kloosterman evaluation strategy')

    # delta
    sub = subcommand('delta', "the delta term of the coefficient formula")
    _add_datum_args(sub)

    # lambda
    sub = subcommand('lambda', 'normalization constant lambda_{k,m,D} of the Petersson coefficient formula')
    sub.add_argument('--k', type=int, required=True)
    sub.add_argument('--g', type=int, required=True)
    sub.add_argument('--det2m', type=int, required=True)
    sub.add_argument('--D', type=int, required=True)

    # bessel
    sub = subcommand('bessel', 'Bessel function J_nu(t)')
    sub.add_argument('--nu', type=str, required=True, help='the order (like 0.5 or 1/2)')
    sub.add_argument('--t', type=float, required=True, help='the argument')

    # exponents
    sub = subcommand('exponents', 'exact exponents alpha_g, c_g and the coefficient bound exponents')
    sub.add_argument('--g', type=int, required=True)
    sub.add_argument('--k', type=int, default=None)
    sub.add_argument('--det2m', type=int, default=None, help='with --D, also evaluate the Poincare coefficient bound')
    sub.add_argument('--D', type=int, default=None)
    sub.add_argument('--epsilon', type=str, default='0')

    # bcheck
    sub = subcommand('bcheck', 'optimal-B and dominance checks of the exponent pipeline')
    sub.add_argument('--g', type=int, required=True)
    sub.add_argument('--k', type=int, required=True)

    # forms
    sub = subcommand('forms', 'discriminants and reduction quantities of half-integral matrices')
    sub.add_argument('--m', type=str, required=True, help='the matrix as JSON {"g": int, "twice_m": [[...]]}')
    sub.add_argument('--n', type=int, default=None, help='with --r, compute the discriminant of (n, r, m)')
    sub.add_argument('--r', type=str, default=None)
    sub.add_argument('--search-bound', type=int, default=None, help='compute m_{g-1} of the matrix by bounded unimodular search')

    # sweep
    sub = subcommand('sweep', 'empirical sweep of Kloosterman sums or coefficients against their bounds')
    sub.add_argument('--family', type=str, required=True, help='sweep family definition (.json, .yml, .yaml)')
    sub.add_argument('--k', type=int, default=None, help='override the weight of a coefficient sweep')
    sub.add_argument('--c-max', type=int, default=None, help='override the c-series truncation of a coefficient sweep')
    sub.add_argument('--max-slope', type=float, default=None, help='fail if the regression slope is above this (default from the family, or 0.05 for Kloosterman sweeps)')
    sub.add_argument('--output', type=str, default=None, help='directory to save the CSV and JSON summary under (default ~/.cache/siegel_bounds/logs/<timestamp>/sweep)')
    sub.add_argument('--no-progress', action='store_true', help='disable the progress bar')

    return parser


def cmd_gauss(args):
    result = {'a': args.a, 'b': args.b, 'c': args.c}

    if args.method in ('brute', 'both'):
        result['brute'] = gauss_sum_brute(args.a, args.b, args.c)

    if args.method in ('closed', 'both'):
        result['closed'] = gauss_sum(args.a, args.b, args.c)

    if args.method == 'both':
        result['diff'] = abs(result['brute'].value - result['closed'].value)

    return result


def _kloosterman_params(args):
    m = parse_matrix(args.m)
    r = parse_vector(args.r)

    if args.sign is not None:
        if args.n2 is not None or args.r2 is not None:
            raise ValueError("--sign can't be combined with --n2/--r2")
        return KloostermanParams.pm(m, args.c, args.n, r, args.sign)

    n2 = args.n if args.n2 is None else args.n2
    r2 = r if args.r2 is None else parse_vector(args.r2)

    return KloostermanParams(m, args.c, args.n, r, n2, r2)


def cmd_kloosterman(args):
    p = _kloosterman_params(args)
    result = {'params': p}

    if args.method == 'both':
        result['brute'] = kloosterman(p, 'brute')
        result['fast'] = kloosterman(p, 'auto')
        result['diff'] = abs(result['brute'].value - result['fast'].value)
        value = result['fast']
    else:
        value = kloosterman(p, args.method)
        result.update(value.to_dict())

    if args.sign is not None:
        method = None if args.method == 'both' else args.method
        result['lemma32_ratio'] = bound_ratio_lemma32(p.m, p.c, p.n, p.r, args.sign, method)
        result['bk_ratio'] = bound_ratio_bk(p.m, p.c, p.n, p.r, args.sign, parse_rational(args.epsilon), method)

    return result


def cmd_poincare(args):
    m = parse_matrix(args.m)
    r = parse_vector(args.r)
    n2 = args.n if args.n2 is None else args.n2
    r2 = r if args.r2 is None else parse_vector(args.r2)

    p = PoincareParams(args.k, JacobiDatum(args.n, r, m), n2, r2, tol=args.tol)

    if args.pm:
        value = poincare_coefficient_pm(p, args.c_max, max_c=args.max_c, method=args.method)
    else:
        value = poincare_coefficient(p, args.c_max, max_c=args.max_c, method=args.method)

    result = {'params': p, 'c_max': args.c_max if args.c_max is not None else 'adaptive'}
    result.update(value.to_dict())
    return result


def cmd_delta(args):
    m = parse_matrix(args.m)
    r = parse_vector(args.r)
    n2 = args.n if args.n2 is None else args.n2
    r2 = r if args.r2 is None else parse_vector(args.r2)

    return {'delta': delta_term(m, args.n, r, n2, r2)}


def cmd_lambda(args):
    return {'lambda': petersson_lambda(args.k, args.g, args.det2m, args.D)}


def cmd_bessel(args):
    nu = parse_rational(args.nu)
    result = {'nu': nu, 't': args.t, 'value': bessel_j(nu, args.t), 'small_bound': bessel_small_bound(nu, args.t)}

    if args.t >= nu * nu:
        result['large_bound'] = bessel_large_bound(args.t)

    return result


def cmd_exponents(args):
    g, k = args.g, args.k
    result = {'g': g, 'alpha': alpha(g), 'c_g': c_g(g)}
    warnings = []

    if k is None:
        return result

    result['k'] = k
    result['theorem1'] = theorem1_exponent(g, k)
    result['improvement'] = improvement_delta(g, k)

    if in_theorem4_range(g, k):
        result['tk'] = tk_exponent(g, k)
    else:
        result['tk'] = tk_exponent(g, k, strict=False)
        warnings.append(f"tk exponent is stated for {Fraction(g + 3, 2)} < k < {g}")
        logging.warning(warnings[-1])

    result['lemma22'] = lemma22_exponent(g, k)

    if args.det2m is not None and args.D is not None:
        result['theorem4_bound'] = theorem4_bound(g, k, args.det2m, args.D, parse_rational(args.epsilon))

    if warnings:
        result['warnings'] = warnings

    return result


def cmd_bcheck(args):
    g, k = args.g, args.k
    result = {'g': g, 'k': k}

    if in_theorem4_range(g, k):
        middle, large, equal = optimal_B_check(g, k)
        result['optimal_B'] = {'middle': middle, 'large': large, 'equal': equal}
    else:
        result['optimal_B'] = None

    dominant, table = dominance_check(g, k)
    result['dominance'] = {'dominant': dominant, 'terms': table}
    result['genus_shift'] = genus_shift_check(g, k)
    result['pipeline'] = {name: expr for name, expr in assemble_theorem1(g, k).items()}
    result['pipeline_matches'] = final_exponent_check(g, k)

    return result


def cmd_forms(args):
    m = parse_matrix(args.m)
    result = {'matrix': m, 'det2m': m.det2m}

    if args.n is not None:
        datum = JacobiDatum(args.n, parse_vector(args.r or ' '.join(['0'] * m.g)), m, check=False)
        result['D'] = discriminant(datum)
        result['D_split'] = discriminant_split(datum)

    if args.search_bound is not None:
        result['min_submatrix_det'] = min_submatrix_det(m, args.search_bound)
        result['reduction_ratio'] = reduction_ratio(m, args.search_bound)
        result['search'] = 'bounded'

    return result


def cmd_sweep(args):
    family = load_family(args.family, args.k)
    report = empirical_exponent_sweep(family, c_max=args.c_max, progress=not args.no_progress)

    max_slope = args.max_slope

    if max_slope is None:
        max_slope = family.get('max_slope', 0.05 if family['kind'] == 'kloosterman' else None)

    directory = args.output or log_dir('sweep')
    csv_path, json_path = report.save(directory, family.get('name', 'sweep'))
    logging.info(f"saved sweep to {csv_path} and {json_path}")

    result = report.summary()

    # stdout only depends on the inputs (the default directory is timestamped)
    if args.output:
        result['csv'] = csv_path

    if max_slope is not None:
        result['max_slope'] = max_slope
        result['passed'] = report.slope <= max_slope

    if args.format == 'csv':
        sys.stdout.write(report.to_csv())
        return None

    return result


COMMANDS = {
    'gauss': cmd_gauss,
    'kloosterman': cmd_kloosterman,
    'poincare': cmd_poincare,
    'delta': cmd_delta,
    'lambda': cmd_lambda,
    'bessel': cmd_bessel,
    'exponents': cmd_exponents,
    'bcheck': cmd_bcheck,
    'forms': cmd_forms,
    'sweep': cmd_sweep,
}


def run(argv=None):
    """
    Run the command line and return the exit code (see the top of this file)
    """
    parser = build_parser()

    try:
        args = parser.parse_args(argv)
    except SystemExit as error:
        return error.code if isinstance(error.code, int) else EXIT_INVALID

    LogFormatter.config(level='debug' if args.debug else args.log_level)

    # --verbose also enables log_debug() and pprint_debug() while the command runs
    verbose = os.environ.get('VERBOSE')

    if args.debug:
        os.environ['VERBOSE'] = '1'

    try:
        return _run_command(args)
    finally:
        if verbose is None:
            os.environ.pop('VERBOSE', None)
        else:
            os.environ['VERBOSE'] = verbose


def _run_command(args):
    logging.debug(f"{args}")
    pprint_debug(vars(args))

    try:
        with temporary_options(work_limit=args.work_limit, threads=args.threads, permissive=args.permissive):
            result = COMMANDS[args.command](args)

        if result is not None:
            emit(result, args.format)

    except WorkLimitError as error:
        print(f"error: {error}", file=sys.stderr)
        return EXIT_WORK_LIMIT
    except ConsistencyError as error:
        print(f"error: {error}", file=sys.stderr)
        return EXIT_CONSISTENCY
    except (ValueError, KeyError, NotImplementedError, OverflowError, OSError) as error:
        print(f"error: {error}", file=sys.stderr)
        return EXIT_INVALID

    if args.command == 'sweep' and result is not None and result.get('passed') is False:
        logging.warning(f"sweep slope {result['slope']:.4f} is above the max slope {result['max_slope']}")

    return EXIT_OK


def main():
    sys.exit(run())


if __name__ == '__main__':
    main()
