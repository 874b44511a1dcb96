#!/usr/bin/env python3
import io
import os
import json
import math
import tempfile
import contextlib

from helpers import run_tests

from siegel_bounds.cli import run, parse_vector, parse_rational, flatten, EXIT_OK, EXIT_INVALID, EXIT_WORK_LIMIT
from siegel_bounds.log import set_log_dir
from siegel_bounds.utils import get_option


ONE = '{"g":1,"twice_m":[[2]]}'
I2 = '{"g":2,"twice_m":[[2,0],[0,2]]}'


def cli(*argv):
    """
    Run the command line, and return (exit code, stdout, stderr)
    """
    stdout, stderr = io.StringIO(), io.StringIO()

    with contextlib.redirect_stdout(stdout), contextlib.redirect_stderr(stderr):
        code = run([str(x) for x in argv])

    return code, stdout.getvalue(), stderr.getvalue()


def cli_json(*argv):
    code, stdout, stderr = cli(*argv)
    assert code == EXIT_OK, stderr
    return json.loads(stdout)


def test_parsers():
    assert parse_vector('1,0,-1') == [1, 0, -1]
    assert parse_vector('1 0') == [1, 0]
    assert parse_vector('[2, -3]') == [2, -3]
    assert parse_rational('1/2') == parse_rational('0.5')

    for bad in ('1,a', '[1,'):
        try:
            parse_vector(bad)
        except ValueError:
            continue
        assert False, bad

    assert flatten({'a': {'b': 1, 'c': [1, 2]}, 'd': [{'e': 3}]}) == [['a.b', 1], ['a.c', '1 2'], ['d.0.e', 3]]


def test_gauss():
    result = cli_json('gauss', '--a', 1, '--b', 0, '--c', 12, '--method', 'both')
    assert result['diff'] <= 1e-9
    assert abs(result['closed']['re'] - result['brute']['re']) <= 1e-9

    result = cli_json('gauss', '--a', 1, '--b', 0, '--c', 3)
    assert abs(result['closed']['im'] - math.sqrt(3)) < 1e-12
    assert 'brute' not in result


def test_exponents():
    result = cli_json('exponents', '--g', 5, '--k', 4)

    assert result['alpha'] == '7/170'
    assert result['theorem1'] == '2423/1275'
    assert result['tk'] == '836/425'
    assert result['improvement'] == '-1/15'
    assert result['lemma22'] == {'D': '1/2', 'det2m': '581/340', 'epsilon': '1'}
    assert len(result['warnings']) == 1

    result = cli_json('exponents', '--g', 4)
    assert result == {'g': 4, 'alpha': '3/49', 'c_g': '67/392'}

    result = cli_json('exponents', '--g', 7, '--k', 6, '--det2m', 1, '--D', 1)
    assert result['theorem4_bound'] == 3
    assert 'warnings' not in result


def test_kloosterman():
    result = cli_json('kloosterman', '--m', ONE, '--c', 3, '--n', 1, '--r', 0, '--n2', 1, '--r2', 0)
    assert abs(result['re'] - 3.0) < 1e-9
    assert result['params']['c'] == 3

    result = cli_json('kloosterman', '--m', ONE, '--c', 15, '--n', 2, '--r', 1, '--method', 'both')
    assert result['diff'] <= 1e-8

    result = cli_json('kloosterman', '--m', ONE, '--c', 3, '--n', 1, '--r', 0, '--sign', 1)
    assert abs(result['lemma32_ratio'] - 1 / math.sqrt(2)) < 1e-12
    assert abs(result['bk_ratio'] - 1) < 1e-12


def test_poincare():
    result = cli_json('poincare', '--m', ONE, '--k', 12, '--n', 1, '--r', 0, '--c-max', 0)
    assert result['re'] == 1.0
    assert result['c_max'] == 0

    result = cli_json('poincare', '--m', ONE, '--k', 12, '--n', 1, '--r', 0, '--pm')
    assert result['c_max'] == 'adaptive'
    assert result['im'] == 0

    code, _, stderr = cli('poincare', '--m', ONE, '--k', 2, '--n', 1, '--r', 0, '--c-max', 5)
    assert code == EXIT_INVALID
    assert 'error:' in stderr

    result = cli_json('poincare', '--m', ONE, '--k', 3, '--n', 1, '--r', 0, '--c-max', 5, '--permissive')
    assert 'heuristic-tail' in result['notes']


def test_small_commands():
    assert cli_json('delta', '--m', ONE, '--n', 1, '--r', 1, '--r2=-1')['delta'] == 1
    assert cli_json('lambda', '--k', 12, '--g', 1, '--det2m', 2, '--D', 4)['lambda'] > 0

    result = cli_json('bessel', '--nu', '1/2', '--t', math.pi / 2)
    assert abs(result['value'] - 2 / math.pi) < 1e-12
    assert result['nu'] == '1/2'
    assert 'large_bound' in result

    result = cli_json('forms', '--m', I2, '--n', 1, '--r', '0,0', '--search-bound', 2)
    assert result['D'] == result['D_split'] == 8
    assert result['min_submatrix_det'] == 1
    assert abs(result['reduction_ratio'] - 0.5) < 1e-12
    assert result['search'] == 'bounded'


def test_bcheck():
    result = cli_json('bcheck', '--g', 7, '--k', 6)

    assert result['optimal_B']['equal'] is True
    assert result['dominance']['dominant'] is True
    assert result['genus_shift'] is True
    assert result['pipeline_matches'] is True
    assert result['pipeline']['final'] == {'D': cli_json('exponents', '--g', 7, '--k', 6)['theorem1']}

    assert cli_json('bcheck', '--g', 7, '--k', 5)['optimal_B'] is None


def test_invalid_input():
    for argv in (('bcheck', '--g', 4, '--k', 3),
                 ('exponents', '--g', 1),
                 ('lambda', '--k', 2, '--g', 2, '--det2m', 3, '--D', 3),
                 ('kloosterman', '--m', '{"g":1', '--c', 3, '--n', 1, '--r', 0),
                 ('kloosterman', '--m', ONE, '--c', 0, '--n', 1, '--r', 0),
                 ('kloosterman', '--m', ONE, '--c', 3, '--n', 1, '--r', '0,0'),
                 ('gauss', '--a', 1, '--b', 0, '--c', 3, '--unknown'),
                 ('gauss', '--a', 1, '--b', 0),
                 ('gauss', '--a', 1, '--b', 0, '--c', 2**61 - 1),
                 ('sweep', '--family', '/nonexistent/family.json')):
        code, stdout, stderr = cli(*argv)
        assert code == EXIT_INVALID, f"{argv} returned {code}"
        assert stdout == ''


def test_work_limit():
    code, stdout, stderr = cli('kloosterman', '--m', ONE, '--c', 11, '--n', 1, '--r', 0, '--method', 'brute', '--work-limit', 10)
    assert code == EXIT_WORK_LIMIT
    assert 'error:' in stderr

    # the option doesn't leak into later calls
    assert get_option('work_limit') > 10
    assert cli('kloosterman', '--m', ONE, '--c', 11, '--n', 1, '--r', 0, '--method', 'brute')[0] == EXIT_OK


def test_large_integers():
    small = cli_json('kloosterman', '--m', ONE, '--c', 3, '--n', 1, '--r', 0, '--method', 'brute')
    large = cli_json('kloosterman', '--m', ONE, '--c', 3, '--n', 30000000000000000001, '--r', 0, '--method', 'brute')

    assert large['params']['n'] == 30000000000000000001
    assert (large['re'], large['im']) == (small['re'], small['im'])



def test_verbose():
    saved = os.environ.pop('VERBOSE', None)

    try:
        code, stdout, stderr = cli('exponents', '--g', 3, '--verbose')
        assert code == EXIT_OK
        assert json.loads(stdout)['alpha'] == '5/62'
        assert "'command': 'exponents'" in stderr
        assert 'VERBOSE' not in os.environ

        if not os.environ.get('DEBUG'):
            assert "'command'" not in cli('exponents', '--g', 3)[2]
    finally:
        if saved is not None:
            os.environ['VERBOSE'] = saved



def test_formats():
    code, stdout, _ = cli('gauss', '--a', 1, '--b', 0, '--c', 4, '--format', 'csv')
    lines = stdout.splitlines()
    assert code == EXIT_OK
    assert lines[0] == 'key,value'
    assert any(line.startswith('closed.re,') for line in lines)

    code, stdout, _ = cli('exponents', '--g', 3, '--format', 'plain')
    assert code == EXIT_OK
    assert 'alpha' in stdout and '5/62' in stdout


def test_sweep():
    family = {'name': 'tiny', 'g': 1, 'm': [[2]], 'n_range': [1, 1], 'r_values': [[0]], 'c_range': [1, 10]}

    with tempfile.TemporaryDirectory() as tmp:
        path = os.path.join(tmp, 'tiny.json')

        with open(path, 'w') as file:
            json.dump(family, file)

        output = os.path.join(tmp, 'out')
        result = cli_json('sweep', '--family', path, '--output', output, '--no-progress', '--max-slope', 10)

        assert result['rows'] == 10
        assert result['max_slope'] == 10
        assert result['passed'] is True
        assert result['csv'] == os.path.join(output, 'tiny.csv')
        assert os.path.isfile(os.path.join(output, 'tiny.json'))

        code, stdout, _ = cli('sweep', '--family', path, '--output', output, '--no-progress', '--format', 'csv')
        assert code == EXIT_OK
        assert stdout.splitlines()[0] == 'n,r,D,c,magnitude,bound,ratio'

        # without --output the files go under the log dir, and stdout doesn't change between runs
        set_log_dir(os.path.join(tmp, 'logs'))
        first = cli('sweep', '--family', path, '--no-progress')
        second = cli('sweep', '--family', path, '--no-progress')

        assert first[0] == EXIT_OK
        assert first[1] == second[1]
        assert 'csv' not in json.loads(first[1])
        assert os.path.isfile(os.path.join(tmp, 'logs', 'sweep', 'tiny.csv'))


if __name__ == '__main__':
    import sys
    run_tests(sys.modules[__name__], 'cli')
