#!/usr/bin/env python3
#
# Time the Kloosterman evaluation strategies and the Poincare partial sums:
#
#   python3 -m siegel_bounds.benchmark --save benchmark.csv
#
import os
import time
import socket
import logging
import datetime
import argparse

from .forms import HalfIntegralMatrix, JacobiDatum
from .kloosterman import KloostermanParams, kloosterman
from .log import LogFormatter, log_dir
from .poincare import PoincareParams, poincare_coefficient
from .utils import set_options, print_table, StrategyUnavailable


parser = argparse.ArgumentParser(formatter_class=argparse.ArgumentDefaultsHelpFormatter)

parser.add_argument('--m', type=str, action='append', default=None, help='index matrices as JSON (can be given multiple times)')
parser.add_argument('--c', type=int, action='append', default=None, help='moduli of the Kloosterman sums')
parser.add_argument('--k', type=int, default=6, help='weight of the Poincare series (for the 1x1 index)')
parser.add_argument('--c-max', type=int, action='append', default=None, help='truncations of the Poincare series')
parser.add_argument('--runs', type=int, default=3, help='the number of timed runs to average over')
parser.add_argument('--threads', type=int, default=1)
parser.add_argument('--save', type=str, default='', help='CSV file to save benchmarking results to (relative paths go under the benchmark log dir)')
parser.add_argument('--log-level', type=str, default='info')

args = parser.parse_args()

if not args.m:
    args.m = ['{"g":3,"twice_m":[[2,0,0],[0,2,0],[0,0,2]]}', '{"g":2,"twice_m":[[2,1],[1,2]]}']

if not args.c:
    args.c = [25, 105]

if not args.c_max:
    args.c_max = [50, 100, 200]

LogFormatter.config(level=args.log_level)
set_options(threads=args.threads)

print(args)


def timeit(func, runs=args.runs):
    """
    Return (result, average seconds) over the number of runs
    """
    start = time.perf_counter()
    for _ in range(runs):
        result = func()
    return result, (time.perf_counter() - start) / runs


results = []
timings = {}

for m in args.m:
    m = HalfIntegralMatrix.from_json(m)
    r = [1] + [0] * (m.g - 1)

    for c in args.c:
        for method in ['brute', 'crt', 'fast']:
            p = KloostermanParams(m, c, 1, r, 1, r)
            try:
                value, elapsed = timeit(lambda: kloosterman(p, method))
            except StrategyUnavailable as error:
                logging.info(f"skipping {method} at g={m.g} c={c} ({error})")
                continue
            logging.info(f"kloosterman  g={m.g}  c={c}  method={method}  value={value.value:.6g}  time={elapsed:.4f} sec")
            results.append(['kloosterman', m.g, c, method, f"{abs(value):.6g}", elapsed])
            timings[(m.g, c, method)] = elapsed

        if (m.g, c, 'fast') in timings:
            speedup = timings[(m.g, c, 'brute')] / timings[(m.g, c, 'fast')]
            if speedup >= 10:
                logging.success(f"fast path is {speedup:.1f}x faster than brute force at g={m.g} c={c}")
            else:
                logging.warning(f"fast path is only {speedup:.1f}x faster than brute force at g={m.g} c={c}")

m = HalfIntegralMatrix([[2]])
p = PoincareParams(args.k, JacobiDatum(1, [0], m), 1, [0])

for c_max in args.c_max:
    value, elapsed = timeit(lambda: poincare_coefficient(p, c_max))
    logging.info(f"poincare  k={args.k}  c_max={c_max}  value={value.value:.10g}  abs_error={value.abs_error:.3g}  time={elapsed:.4f} sec")
    results.append(['poincare', 1, c_max, f"k={args.k}", f"{abs(value):.10g}", elapsed])

print_table([[*row[:5], f"{row[5]:.4f}"] for row in results], header=['sum', 'g', 'c', 'method', '|value|', 'time (sec)'])

if args.save:
    if not os.path.isabs(args.save):
        args.save = os.path.join(log_dir('benchmark'), args.save)

    if not os.path.isfile(args.save):  # csv header
        with open(args.save, 'w') as file:
            file.write(f"timestamp, hostname, sum, g, c, method, value, time\n")
    with open(args.save, 'a') as file:
        for row in results:
            file.write(f"{datetime.datetime.now().strftime('%Y%m%d %H:%M:%S')}, {socket.gethostname()}, ")
            file.write(', '.join(str(x) for x in row) + '\n')

    logging.info(f"saved benchmark results to {args.save}")
