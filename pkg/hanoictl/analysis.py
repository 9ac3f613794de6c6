'''Structure of solutions: demolishing prefixes, middle states and bases.

The middle state is the state right before disk n first moves; the
demolishing prefix is everything before that move.
'''
import logging
import time
from collections import Counter
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from .core import Move, Path, concat_paths, count_moves, first_move_of
from .constructor import validate_solution
from .errors import InvalidProblemError
from .numerics import find_r, k_closed
from .oracle import m_number, minimal_demolishing_length, optimal_solutions_sample

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class DemolishingDecomposition:
    prefix: Path
    pivot: Move
    suffix: Path

    @property
    def middle_state(self):
        return self.prefix.end

    def sequence(self):
        '''The demolishing sequence: the prefix followed by the pivot move.'''
        return Path(self.prefix.states + (self.suffix.start, ))

    def rebuild(self):
        return concat_paths(self.sequence(), self.suffix)


def _check_solution(S):
    if not (S.start.is_constant() and S.end.is_constant()) or S.start == S.end:
        raise InvalidProblemError('not a path between two distinct constant states')


def decompose(S):
    _check_solution(S)
    index = first_move_of(S, S.n)
    if index is None:
        raise InvalidProblemError(f'disk {S.n} never moves')
    return DemolishingDecomposition(Path(S.states[:index + 1]), S.moves[index],
                                    Path(S.states[index + 1:]))


def demolishing_sequence(S):
    return decompose(S).sequence()


def reflect(P, peg_swap):
    '''P backwards with the two pegs exchanged in every state.'''
    a, b = peg_swap
    return Path(tuple(s.swap_pegs(a, b) for s in reversed(P.states)))


def mirrored_solution(decomposition):
    '''Prefix, pivot, then the prefix reflected onto the pivot's peg.'''
    pivot = decomposition.pivot
    back = reflect(decomposition.prefix, (pivot.from_peg, pivot.to_peg))
    return concat_paths(decomposition.sequence(), back)


@dataclass(frozen=True)
class BaseReport:
    middle_state: object
    k: int
    base: int
    r: int
    upper_block_moves: int = 0
    tower_complete_step: int = 0
    disk_n_alone: bool = True

    @property
    def tower_bound(self):
        '''Moves a B-disk tower needs on three pegs.'''
        return 2**self.base - 1

    @property
    def default_k(self):
        '''No smaller disk is apart from disk n-1, so k falls back to 0.'''
        return self.k == 0

    @property
    def bounds_ok(self):
        return 1 <= self.base <= self.middle_state.n - 1 and self.disk_n_alone

    def to_json(self):
        return {
            'middle_state': self.middle_state.to_json(),
            'k': self.k,
            'base': self.base,
            'r': self.r,
            'upper_block_moves': self.upper_block_moves,
            'tower_bound': self.tower_bound,
            'tower_complete_step': self.tower_complete_step,
            'disk_n_alone': self.disk_n_alone,
            'default_k': self.default_k,
        }


def base_of(S):
    n = S.n
    if n < 2:
        raise InvalidProblemError('the base needs at least two disks')
    decomposition = decompose(S)
    mu = decomposition.middle_state
    peg = mu.peg_of(n - 1)
    # 0 when every smaller disk sits with disk n-1
    k = max((disk for disk in range(1, n - 1) if mu.peg_of(disk) != peg), default=0)
    base = n - k - 1

    upper = set(range(k + 1, n))
    prefix = decomposition.prefix
    tower_step = 0
    for index, move in enumerate(prefix.moves, 1):
        if move.disk in upper:
            tower_step = index
    alone = all(mu.peg_of(disk) != mu.peg_of(n) for disk in range(1, n))
    return BaseReport(mu, k, base, find_r(n, S.p), count_moves(prefix, upper), tower_step,
                      alone)


@dataclass
class DoublingReport:
    n: int
    p: int
    m: int
    demolish_len: int

    @property
    def ok(self):
        return self.m == 2 * self.demolish_len + 1


def check_doubling(n, p, **options):
    m = m_number(n, p, **options).distance
    demolish = minimal_demolishing_length(n, p, **options).distance
    report = DoublingReport(n, p, m, demolish)
    if not report.ok:
        log.warning('(%d,%d): M=%d but the minimal demolishing prefix has %d moves', n, p, m,
                    demolish)
    return report


@dataclass
class StackingReport:
    stacks: int
    bottoms: Tuple[int, ...] = ()
    j1: Optional[int] = None
    peg: Optional[int] = None
    violations: List[Tuple[int, int]] = field(default_factory=list)

    @property
    def vacuous(self):
        return self.j1 is None

    @property
    def ok(self):
        return not self.violations

    def to_json(self):
        return {
            'stacks': self.stacks,
            'bottoms': list(self.bottoms),
            'j1': self.j1,
            'peg': self.peg,
            'violations': [{'step': step, 'disk': disk} for step, disk in self.violations],
        }


def check_stacking(S):
    '''S is a demolishing sequence ending with the move of disk n. No disk
    larger than j1, the smallest bottom disk besides n and n-1, may ever
    stand on the peg j1 ends on.'''
    n = S.n
    if S.length == 0 or S.moves[-1].disk != n:
        raise InvalidProblemError(f'a demolishing sequence ends with a move of disk {n}')

    stacks = [stack for stack in S.end.stacks() if stack]
    bottoms = tuple(sorted(stack[0] for stack in stacks))
    others = [disk for disk in bottoms if disk < n - 1]
    if not others:
        return StackingReport(len(stacks), bottoms)

    j1 = others[0]
    peg = S.end.peg_of(j1)
    report = StackingReport(len(stacks), bottoms, j1, peg)
    for step, s in enumerate(S.states):
        for disk in range(j1 + 1, n + 1):
            if s.peg_of(disk) == peg:
                report.violations.append((step, disk))
    if report.violations:
        step, disk = report.violations[0]
        log.warning('COUNTEREXAMPLE to the stacking property: disk %d on peg %d at step %d '
                    '(j1=%d, bottoms %s)', disk, peg, step, j1, bottoms)
    return report


@dataclass
class BaseBoundReport:
    n: int
    p: int
    r: int
    K: int
    M: int
    samples: int = 0
    base_histogram: Dict[int, int] = field(default_factory=dict)
    violations: List[int] = field(default_factory=list)

    @property
    def ok(self):
        return not self.violations

    @property
    def conjecture(self):
        return 'verified' if self.M == self.K else 'counterexample'


def check_base_bound(n, p, sample_limit, samples=None, **options):
    '''Every sampled optimal solution with B(S) >= r must have |S| >= K(n,p).'''
    if samples is None:
        samples = optimal_solutions_sample(n, p, sample_limit, **options)
    K = k_closed(n, p)
    r = find_r(n, p)
    M = samples[0].length if samples else m_number(n, p, **options).distance
    report = BaseBoundReport(n, p, r, K, M, len(samples))

    histogram = Counter()
    for index, S in enumerate(samples):
        if n < 2:
            continue
        base = base_of(S).base
        histogram[base] += 1
        if base >= r and S.length < K:
            report.violations.append(index)
            log.warning('(%d,%d) sample %d has base %d >= r=%d and only %d < K=%d moves', n,
                        p, index, base, r, S.length, K)
    report.base_histogram = dict(sorted(histogram.items()))
    if M != K:
        log.warning('MISMATCH: M(%d,%d)=%d but K(%d,%d)=%d', n, p, M, n, p, K)
    return report


@dataclass
class InstanceReport:
    n: int
    p: int
    r: int
    K: int
    M: int
    demolish_len: int
    doubling_ok: bool
    stacking_ok: bool
    base_bound_ok: bool
    base_histogram: Dict[int, int]
    samples: int = 0
    balance_ok: bool = True
    reflection_ok: bool = True
    tower_bound_ok: bool = True
    bases_ok: bool = True
    bases: List[BaseReport] = field(default_factory=list)
    states_expanded: int = 0
    seconds: float = 0.0

    @property
    def match(self):
        return self.M == self.K

    @property
    def default_k_bases(self):
        return sum(1 for base in self.bases if base.default_k)

    @property
    def ok(self):
        return (self.match and self.doubling_ok and self.stacking_ok and self.base_bound_ok
                and self.balance_ok and self.reflection_ok and self.bases_ok)

    def to_json(self):
        # check keys keep the names of the published record format
        return {
            'n': self.n,
            'p': self.p,
            'r': self.r,
            'K': self.K,
            'M': self.M,
            'demolish_len': self.demolish_len,
            'theorem31_ok': self.doubling_ok,
            'theorem32_ok': self.stacking_ok,
            'theorem41_ok': self.base_bound_ok,
            'base_histogram': {str(base): count for base, count in self.base_histogram.items()},
            'conjecture': 'verified' if self.match else 'counterexample',
            'samples': self.samples,
            'balance_ok': self.balance_ok,
            'reflection_ok': self.reflection_ok,
            'tower_bound_ok': self.tower_bound_ok,
            'bases_ok': self.bases_ok,
            'default_k_bases': self.default_k_bases,
            'bases': [base.to_json() for base in self.bases],
            'states_expanded': self.states_expanded,
            'ms': round(self.seconds * 1000, 3),
        }


def analyze_instance(n, p, sample_limit, **options):
    begin = time.perf_counter()
    search = m_number(n, p, **options)
    demolish = minimal_demolishing_length(n, p, **options)
    doubling = DoublingReport(n, p, search.distance, demolish.distance)
    samples = optimal_solutions_sample(n, p, sample_limit, **options)
    base_bound = check_base_bound(n, p, sample_limit, samples=samples, **options)

    stacking_ok = balance_ok = reflection_ok = tower_ok = True
    bases = []
    for S in samples:
        decomposition = decompose(S)
        stacking_ok &= check_stacking(decomposition.sequence()).ok
        balance_ok &= decomposition.prefix.length == decomposition.suffix.length
        mirrored = mirrored_solution(decomposition)
        pivot = decomposition.pivot
        validation = validate_solution(mirrored, n, p, pivot.from_peg, pivot.to_peg)
        if not validation.ok:
            log.warning('(%d,%d): mirrored solution is invalid: %s', n, p, validation.to_json())
        reflection_ok &= mirrored.length == search.distance and validation.ok
        if n >= 2:
            base = base_of(S)
            bases.append(base)
            tower_ok &= base.upper_block_moves >= base.tower_bound

    bases_ok = all(base.bounds_ok for base in bases)
    if not bases_ok:
        log.warning('(%d,%d): a sampled base is out of 1..n-1 or disk %d is not alone', n, p,
                    n)
    if not tower_ok:
        log.info('(%d,%d): an upper block was built in fewer than 2^B-1 moves', n, p)
    if not doubling.ok:
        log.warning('(%d,%d): M=%d != 2*%d+1', n, p, search.distance, demolish.distance)

    return InstanceReport(n, p, base_bound.r, base_bound.K, search.distance, demolish.distance,
                          doubling.ok, bool(stacking_ok), base_bound.ok,
                          base_bound.base_histogram, len(samples), bool(balance_ok),
                          bool(reflection_ok), bool(tower_ok), bases_ok, bases,
                          search.states_expanded + demolish.states_expanded,
                          time.perf_counter() - begin)
