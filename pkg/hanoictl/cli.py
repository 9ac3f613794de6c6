'''hanoictl command line.

Exit codes: 0 success, 1 a check failed (possible counterexample), 2 usage
or overflow, 3 the memory budget is too small for the requested search.
'''
import argparse
import asyncio
import csv
import json
import logging
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from contextlib import contextmanager
from dataclasses import asdict, dataclass, replace
from typing import Optional

from . import __version__
from .analysis import analyze_instance
from .constructor import Replay, stream_solution
from .core import Problem
from .errors import BudgetExceededError, CheckMismatchError, HanoiError, KOverflowError
from .log import setup_logging
from .numerics import find_r, k_closed, k_delta, k_dp
from .oracle import (DEFAULT_MEMORY_BYTES, StateSpace, check_budget, distances_from,
                     m_number, write_distance_table)

log = logging.getLogger(__name__)

MEMORY_ENV = 'HANOI_MEMORY_GIB'
VERIFY_COLUMNS = ('n', 'p', 'r', 'K', 'M', 'match', 'demolish_len', 't31', 't32', 't41',
                  'states_expanded', 'ms')
FORMATS = ('text', 'json', 'csv')
DEFAULT_FORMATS = {'verify': 'csv', 'analyze': 'json'}


def default_memory_bytes(environ=None):
    environ = os.environ if environ is None else environ
    value = environ.get(MEMORY_ENV)
    if not value:
        return DEFAULT_MEMORY_BYTES
    try:
        return int(float(value) * 2**30)
    except ValueError:
        log.warning('ignoring %s=%r, not a number', MEMORY_ENV, value)
        return DEFAULT_MEMORY_BYTES


@dataclass(frozen=True)
class RunConfig:
    command: str
    n: Optional[int] = None
    p: Optional[int] = None
    n_max: Optional[int] = None
    p_max: Optional[int] = None
    format: str = 'text'
    memory_bytes: int = DEFAULT_MEMORY_BYTES
    samples: int = 16
    out: Optional[str] = None
    from_peg: int = 1
    to_peg: int = 2
    jobs: int = 1
    workers: int = 1
    table: Optional[str] = None

    @classmethod
    def from_args(cls, args, environ=None):
        memory = args.memory_gib
        memory_bytes = (default_memory_bytes(environ) if memory is None else int(memory * 2**30))
        values = {
            name: getattr(args, name)
            for name in ('n', 'p', 'n_max', 'p_max', 'format', 'samples', 'out', 'from_peg',
                         'to_peg', 'jobs', 'workers', 'table')
            if getattr(args, name, None) is not None
        }
        return cls(args.command, memory_bytes=memory_bytes, **values)

    @property
    def oracle_options(self):
        return {'memory_bytes': self.memory_bytes, 'workers': self.workers}

    def validate(self):
        if self.command in ('k', 'solve', 'oracle', 'analyze'):
            problem = Problem(self.n, self.p)
            if self.command == 'solve':
                problem.check_peg(self.from_peg)
                problem.check_peg(self.to_peg)
            if self.command in ('oracle', 'analyze'):
                check_budget(self.n, self.p, self.memory_bytes)
        if self.command == 'verify':
            Problem(self.n_max, self.p_max)
        return self


@contextmanager
def output(config):
    if config.out is None:
        yield sys.stdout
        sys.stdout.flush()
    else:
        with open(config.out, 'w', encoding='utf-8', newline='\n') as stream:
            yield stream


def _digits(value):
    try:
        return str(value)
    except ValueError:
        raise KOverflowError(f'value has too many digits to print ({value.bit_length()} bits)')


def write_record(stream, record, fmt, columns=None):
    columns = columns or list(record)
    if fmt == 'json':
        stream.write(json.dumps(record) + '\n')
    elif fmt == 'csv':
        writer = csv.DictWriter(stream, fieldnames=columns, lineterminator='\n')
        writer.writeheader()
        writer.writerow({key: record.get(key) for key in columns})
    else:
        for key in columns:
            stream.write(f'{key}: {record.get(key)}\n')


def cmd_k(config):
    n, p = config.n, config.p
    closed = k_closed(n, p)
    dp = k_dp(n, p)
    record = {
        'n': n,
        'p': p,
        'r': find_r(n, p),
        'K': _digits(closed),
        'K_dp': _digits(dp),
        'delta': _digits(k_delta(n, p)) if n >= 2 else None,
    }
    if config.format == 'json':
        record = {key: int(value) if isinstance(value, str) else value
                  for key, value in record.items()}
    with output(config) as stream:
        write_record(stream, record, config.format)
    if closed != dp:
        raise CheckMismatchError(f'MISMATCH: closed form K({n},{p})={closed} but DP gives {dp}')
    return 0


def cmd_solve(config):
    stream = stream_solution(config.n, config.p, config.from_peg, config.to_peg)
    replay = Replay(stream.start)
    with output(config) as out:
        if config.format == 'json':
            out.write(json.dumps({'initial': stream.start.to_json()}) + '\n')
            for move in stream:
                replay.step(move.disk, move.from_peg, move.to_peg)
                out.write(json.dumps(move.to_json()) + '\n')
        else:
            for disk, a, b in stream.peg_moves():
                replay.step(disk, a, b)
                out.write(f'{disk}:{a}>{b}\n')

        final = (config.to_peg, ) * config.n
        valid = not replay.violations and tuple(replay.assignment) == final
        if config.format == 'json':
            out.write(json.dumps({'length': replay.length, 'valid': valid}) + '\n')
        else:
            out.write(f'# length {replay.length} {"valid" if valid else "invalid"}\n')

    if not valid:
        raise CheckMismatchError('constructed solution failed validation: '
                                 f'{[v.to_json() for v in replay.violations[:3]]}')
    return 0


def cmd_oracle(config):
    n, p = config.n, config.p
    result = m_number(n, p, **config.oracle_options)
    record = {'n': n, 'p': p, 'M': result.distance, **result.to_json()}
    del record['distance']
    with output(config) as stream:
        write_record(stream, record, config.format)

    if config.table:
        space = StateSpace(n, p, config.memory_bytes, workers=config.workers)
        with open(config.table, 'wb') as table:
            write_distance_table(table, n, p, distances_from(space, space.constant(1)))
        log.debug('wrote distance table of (%d,%d) to %s', n, p, config.table)
    return 0


def cmd_analyze(config):
    report = analyze_instance(config.n, config.p, config.samples, **config.oracle_options)
    record = report.to_json()
    with output(config) as stream:
        if config.format == 'json':
            stream.write(json.dumps(record, indent=2) + '\n')
        else:
            # one row of scalars; text also lists the per-sample bases
            bases = record.pop('bases')
            histogram = record.pop('base_histogram')
            write_record(stream, record, config.format)
            if config.format == 'text':
                stream.write(f'base_histogram: {histogram}\n')
                for i, base in enumerate(bases):
                    stream.write(f'base {i}: k={base["k"]} base={base["base"]} '
                                 f'upper_block_moves={base["upper_block_moves"]} '
                                 f'tower_complete_step={base["tower_complete_step"]} '
                                 f'disk_n_alone={base["disk_n_alone"]}\n')
    if not report.ok:
        raise CheckMismatchError(f'MISMATCH in ({config.n},{config.p}): {report.to_json()}')
    return 0


def verify_cell(n, p, config):
    '''One row of the sweep; never raises for a per-cell problem.'''
    row = {key: None for key in VERIFY_COLUMNS}
    row.update(n=n, p=p, r=find_r(n, p), K=k_closed(n, p))
    try:
        check_budget(n, p, config.memory_bytes)
    except BudgetExceededError:
        row['M'] = 'skipped'
        return row

    try:
        report = analyze_instance(n, p, config.samples, **config.oracle_options)
    except HanoiError as e:
        row['M'] = 'error'
        row['error'] = str(e)
        return row

    row.update(M=report.M, match=report.match, demolish_len=report.demolish_len,
               t31=report.doubling_ok, t32=report.stacking_ok, t41=report.base_bound_ok,
               states_expanded=report.states_expanded, ms=round(report.seconds * 1000, 3))
    row['ok'] = report.ok
    return row


async def _sweep(cells, config):
    if config.jobs <= 1:
        return [verify_cell(n, p, config) for n, p in cells]
    loop = asyncio.get_running_loop()
    with ProcessPoolExecutor(config.jobs) as pool:
        return await asyncio.gather(*(loop.run_in_executor(pool, verify_cell, n, p, config)
                                      for n, p in cells))


def cmd_verify(config):
    cells = [(n, p) for n in range(1, config.n_max + 1) for p in range(3, config.p_max + 1)]
    rows = asyncio.run(_sweep(cells, config))

    with output(config) as stream:
        if config.format == 'json':
            stream.write(json.dumps(rows, indent=2) + '\n')
        elif config.format == 'csv':
            writer = csv.DictWriter(stream, fieldnames=VERIFY_COLUMNS, extrasaction='ignore',
                                    lineterminator='\n')
            writer.writeheader()
            writer.writerows(rows)
        else:
            widths = {c: max(len(c), *(len(str(row[c])) for row in rows)) for c in VERIFY_COLUMNS}
            stream.write(' '.join(c.rjust(widths[c]) for c in VERIFY_COLUMNS).rstrip() + '\n')
            for row in rows:
                stream.write(' '.join(str(row[c]).rjust(widths[c])
                                      for c in VERIFY_COLUMNS).rstrip() + '\n')

    for row in rows:
        if row.get('error'):
            log.warning('(%d,%d) failed: %s', row['n'], row['p'], row['error'])
    failed = [row for row in rows if row.get('ok') is False]
    if failed:
        cells = ', '.join(f'({row["n"]},{row["p"]})' for row in failed)
        raise CheckMismatchError(f'MISMATCH in {cells}')
    return 0


COMMANDS = {
    'k': cmd_k,
    'solve': cmd_solve,
    'oracle': cmd_oracle,
    'verify': cmd_verify,
    'analyze': cmd_analyze,
}


def _global_options(parser, suppress=False):
    # given after the command, a value overrides the one given before it
    default = argparse.SUPPRESS if suppress else None
    parser.add_argument('--debug', action='store_true',
                        default=argparse.SUPPRESS if suppress else False,
                        help='print debug messages')
    parser.add_argument('--memory-gib', type=float, default=default,
                        help=f'memory budget of the exact search (default 2, or ${MEMORY_ENV})')
    parser.add_argument('--workers', type=int, default=default,
                        help='threads expanding one search frontier')
    parser.add_argument('-o', '--out', default=default, help='write output to this file')
    parser.add_argument('-f', '--format', choices=FORMATS, default=default)


def build_parser():
    parser = argparse.ArgumentParser(
        prog='hanoictl',
        description='Frame-Stewart numbers, constructed solutions and exact optima '
        'of the generalized Tower of Hanoi.')
    parser.add_argument('-v', '--version', action='version', version=f'v{__version__}')
    _global_options(parser)

    common = argparse.ArgumentParser(add_help=False)
    _global_options(common, suppress=True)

    commands = parser.add_subparsers(dest='command', required=True)

    def command(name, help):
        return commands.add_parser(name, help=help, parents=[common])

    def problem(sub):
        sub.add_argument('--n', type=int, required=True, help='number of disks')
        sub.add_argument('--p', type=int, required=True, help='number of pegs')

    problem(command('k', 'print r, K(n,p) and K(n,p)-K(n-1,p)'))

    solve = command('solve', 'print a solution with K(n,p) moves')
    problem(solve)
    solve.add_argument('--from', dest='from_peg', type=int, default=None)
    solve.add_argument('--to', dest='to_peg', type=int, default=None)

    oracle = command('oracle', 'compute M(n,p) by exhaustive search')
    problem(oracle)
    oracle.add_argument('--table', default=None,
                        help='also write the distances from peg 1 to this file')

    verify = command('verify', 'compare K and M over a range of problems')
    verify.add_argument('--n-max', type=int, required=True)
    verify.add_argument('--p-max', type=int, required=True)
    verify.add_argument('--samples', type=int, default=None)
    verify.add_argument('--jobs', type=int, default=None, help='cells computed at once')

    analyze = command('analyze', 'check the structure of optimal solutions')
    problem(analyze)
    analyze.add_argument('--samples', type=int, default=None)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    setup_logging(args.debug)

    try:
        config = RunConfig.from_args(args)
        if args.format is None and args.command in DEFAULT_FORMATS:
            config = replace(config, format=DEFAULT_FORMATS[args.command])
        config.validate()
        log.debug('running %s', asdict(config))
        return COMMANDS[config.command](config)
    except CheckMismatchError as e:
        message = str(e)
        if not message.startswith('MISMATCH'):
            message = f'MISMATCH: {message}'
        print(message, file=sys.stderr)
        return e.exit_code
    except HanoiError as e:
        print(f'hanoictl: {e}', file=sys.stderr)
        return e.exit_code
    except BrokenPipeError:
        return 0
