'''Frame-Stewart solutions built by the three-phase recursion.

Disks 1..k go from the initial peg to a middle peg using every peg, disks
k+1..n go to the final peg without touching the middle peg, then disks 1..k
follow them. Three-peg and single-disk subproblems are solved directly.
'''
import logging
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

from .core import INF, Move, Path, Problem, State
from .errors import InvalidPegError
from .numerics import SplitChoice, k_dp, optimal_split

log = logging.getLogger(__name__)


def choose_middle_peg(p, initial_peg, final_peg, pegs=None):
    pegs = range(1, p + 1) if pegs is None else sorted(pegs)
    for peg in pegs:
        if peg != initial_peg and peg != final_peg:
            return peg
    raise InvalidPegError(f'no peg besides {initial_peg} and {final_peg}')


@dataclass(frozen=True)
class ConstructionPlan:
    '''One node of the recursion: move disks first_disk..first_disk+n-1
    from initial_peg to final_peg using only `pegs`.'''
    n: int
    pegs: Tuple[int, ...]
    initial_peg: int
    final_peg: int
    first_disk: int = 1
    middle_peg: Optional[int] = None
    split: Optional[SplitChoice] = None
    phases: Tuple['ConstructionPlan', ...] = ()

    @property
    def p(self):
        return len(self.pegs)

    @property
    def is_leaf(self):
        return not self.phases

    @property
    def length(self):
        return k_dp(self.n, self.p)

    def iter_moves(self):
        '''(disk, from_peg, to_peg) in order, without building any state.'''
        stack = [self]
        while stack:
            item = stack.pop()
            if type(item) is tuple:
                if item[0] == 0:
                    yield item[1:]
                    continue
                _, first, m, a, b, c = item
                if m == 1:
                    yield (first, a, b)
                else:
                    stack.append((1, first, m - 1, c, b, a))
                    stack.append((0, first + m - 1, a, b))
                    stack.append((1, first, m - 1, a, c, b))
            elif item.phases:
                stack.extend(reversed(item.phases))
            elif item.n == 1:
                yield (item.first_disk, item.initial_peg, item.final_peg)
            else:
                spare = choose_middle_peg(3, item.initial_peg, item.final_peg, item.pegs)
                stack.append((1, item.first_disk, item.n, item.initial_peg,
                              item.final_peg, spare))


def _plan(first, n, pegs, initial_peg, final_peg):
    if n == 1 or len(pegs) == 3:
        return ConstructionPlan(n, pegs, initial_peg, final_peg, first)

    middle = choose_middle_peg(len(pegs), initial_peg, final_peg, pegs)
    split = optimal_split(n, len(pegs))
    k = split.k
    without_middle = tuple(peg for peg in pegs if peg != middle)
    phases = (
        _plan(first, k, pegs, initial_peg, middle),
        _plan(first + k, n - k, without_middle, initial_peg, final_peg),
        _plan(first, k, pegs, middle, final_peg),
    )
    return ConstructionPlan(n, pegs, initial_peg, final_peg, first, middle, split, phases)


def plan_solution(n, p, initial_peg, final_peg):
    problem = Problem(n, p)
    problem.check_peg(initial_peg)
    problem.check_peg(final_peg)
    if initial_peg == final_peg:
        raise InvalidPegError(f'initial and final peg are both {initial_peg}')
    return _plan(1, n, tuple(range(1, p + 1)), initial_peg, final_peg)


class SolutionStream:
    '''A constructed solution emitted lazily; single consumer per iteration.'''

    def __init__(self, plan):
        self.plan = plan
        self.n = plan.n
        self.p = plan.p
        self.start = State.constant(plan.n, plan.p, plan.initial_peg)

    @property
    def length(self):
        return self.plan.length

    def peg_moves(self):
        return self.plan.iter_moves()

    def __iter__(self):
        '''Moves with their Demontis triples.'''
        stacks = [list(stack) for stack in self.start.stacks()]
        for disk, a, b in self.plan.iter_moves():
            source = stacks[a - 1]
            target = stacks[b - 1]
            below = source[-2] if len(source) > 1 else INF
            onto = target[-1] if target else INF
            target.append(source.pop())
            yield Move(disk, a, b, below, onto)

    def materialize(self):
        return Path.from_moves(self.start, self)


def stream_solution(n, p, initial_peg, final_peg):
    plan = plan_solution(n, p, initial_peg, final_peg)
    log.debug('plan for (%d,%d) %d>%d has length %d', n, p, initial_peg, final_peg,
              plan.length)
    return SolutionStream(plan)


def build_solution(n, p, initial_peg, final_peg):
    return stream_solution(n, p, initial_peg, final_peg).materialize()


@dataclass(frozen=True)
class Violation:
    step: int
    reason: str

    def to_json(self):
        return {'step': self.step, 'reason': self.reason}


class Replay:
    '''Replays moves on its own copy of the pegs and records every rule it
    sees broken. Illegal steps are still applied so replay can go on.'''

    def __init__(self, start):
        self.p = start.p
        self.assignment = list(start.assignment)
        self.stacks = [list(stack) for stack in start.stacks()]
        self.length = 0
        self.violations: List[Violation] = []

    def _violation(self, reason):
        self.violations.append(Violation(self.length, reason))

    def _reset(self, assignment):
        self.assignment = list(assignment)
        self.stacks = [list(stack) for stack in State(tuple(assignment), self.p).stacks()]

    def step(self, disk, from_peg, to_peg):
        self.length += 1
        if not (1 <= disk <= len(self.assignment) and 1 <= from_peg <= self.p
                and 1 <= to_peg <= self.p):
            self._violation(f'move {disk}:{from_peg}>{to_peg} is out of range')
            return
        if from_peg == to_peg:
            self._violation(f'disk {disk} moves onto its own peg {to_peg}')
            return

        source = self.stacks[from_peg - 1]
        target = self.stacks[to_peg - 1]
        if self.assignment[disk - 1] != from_peg:
            self._violation(f'disk {disk} is on peg {self.assignment[disk - 1]}, not {from_peg}')
        elif source[-1] != disk:
            self._violation(f'disk {disk} is covered by disk {source[-1]}')
        elif target and target[-1] < disk:
            self._violation(f'disk {disk} placed on smaller disk {target[-1]}')
        else:
            target.append(source.pop())
            self.assignment[disk - 1] = to_peg
            return

        assignment = list(self.assignment)
        assignment[disk - 1] = to_peg
        self._reset(assignment)

    def jump(self, state, reason):
        '''Record a step that is not a single move and continue from `state`.'''
        self.length += 1
        self._violation(reason)
        self._reset(state.assignment)

    def state(self):
        return State(tuple(self.assignment), self.p)


@dataclass
class ValidationReport:
    n: int
    p: int
    initial_peg: int
    final_peg: int
    length: int = 0
    violations: List[Violation] = field(default_factory=list)

    @property
    def ok(self):
        return not self.violations

    def to_json(self):
        return {
            'n': self.n,
            'p': self.p,
            'from': self.initial_peg,
            'to': self.final_peg,
            'length': self.length,
            'valid': self.ok,
            'violations': [v.to_json() for v in self.violations],
        }


def _steps(P, replay):
    if isinstance(P, Path):
        for s, t in zip(P.states, P.states[1:]):
            changed = [d for d, (a, b) in enumerate(zip(s.assignment, t.assignment), 1) if a != b]
            if len(changed) == 1:
                disk = changed[0]
                replay.step(disk, s.assignment[disk - 1], t.assignment[disk - 1])
            else:
                replay.jump(t, f'{len(changed)} disks change in one step')
    else:
        for disk, a, b in P.peg_moves():
            replay.step(disk, a, b)


def validate_solution(P, n, p, initial_peg, final_peg):
    '''Check a Path or SolutionStream against the (n,p)-problem; every
    violation is reported with the index of the step it happened at.'''
    report = ValidationReport(n, p, initial_peg, final_peg)
    start = P.start
    if start.n != n or start.p != p:
        report.violations.append(
            Violation(0, f'path is for ({start.n},{start.p}), not ({n},{p})'))
        return report
    if start.assignment != (initial_peg, ) * n:
        report.violations.append(
            Violation(0, f'does not start with every disk on peg {initial_peg}'))

    replay = Replay(start)
    _steps(P, replay)
    report.length = replay.length
    report.violations.extend(replay.violations)
    if tuple(replay.assignment) != (final_peg, ) * n:
        report.violations.append(
            Violation(replay.length, f'does not end with every disk on peg {final_peg}'))
    return report
