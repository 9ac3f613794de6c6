'''States, moves and paths of the (n,p)-problem.

Disks and pegs are 1-indexed. A state is the disk -> peg assignment; the
order of disks on a peg is forced by their sizes, so per-peg stacks are
derived when they are needed and never stored.
'''
import math
from dataclasses import dataclass
from functools import cached_property
from itertools import pairwise
from typing import Optional, Tuple, Union

from .errors import (IllegalMoveError, InvalidPegError, InvalidProblemError,
                     PathMismatchError)

# no disk below / empty destination peg in a Demontis triple
INF = math.inf

Disk = Union[int, float]


def _dump_disk(disk):
    return 'inf' if disk == INF else disk


def _load_disk(value):
    return INF if value == 'inf' else int(value)


@dataclass(frozen=True)
class Problem:
    n: int
    p: int

    def __post_init__(self):
        if self.n < 1:
            raise InvalidProblemError(f'need at least one disk, got n={self.n}')
        if self.p < 3:
            raise InvalidProblemError(f'need at least three pegs, got p={self.p}')

    def check_peg(self, peg):
        if not 1 <= peg <= self.p:
            raise InvalidPegError(f'peg {peg} is not in 1..{self.p}')
        return peg


@dataclass(frozen=True)
class State:
    assignment: Tuple[int, ...]
    p: int

    def __post_init__(self):
        object.__setattr__(self, 'assignment', tuple(self.assignment))
        if self.p < 3:
            raise InvalidProblemError(f'need at least three pegs, got p={self.p}')
        for disk, peg in enumerate(self.assignment, 1):
            if not 1 <= peg <= self.p:
                raise InvalidPegError(f'disk {disk} is on peg {peg}, not in 1..{self.p}')

    @classmethod
    def constant(cls, n, p, peg):
        Problem(n, p).check_peg(peg)
        return cls((peg, ) * n, p)

    @property
    def n(self):
        return len(self.assignment)

    def peg_of(self, disk):
        if not 1 <= disk <= self.n:
            raise InvalidProblemError(f'disk {disk} is not in 1..{self.n}')
        return self.assignment[disk - 1]

    def is_constant(self):
        return len(set(self.assignment)) <= 1

    def stacks(self):
        '''Disks per peg, bottom (largest) first. Index 0 is peg 1.'''
        stacks = [[] for _ in range(self.p)]
        for disk in range(self.n, 0, -1):
            stacks[self.assignment[disk - 1] - 1].append(disk)
        return tuple(tuple(stack) for stack in stacks)

    def swap_pegs(self, a, b):
        swap = {a: b, b: a}
        return State(tuple(swap.get(peg, peg) for peg in self.assignment), self.p)

    def to_json(self):
        return list(self.assignment)


def top_disk(s, peg):
    if not 1 <= peg <= s.p:
        raise InvalidPegError(f'peg {peg} is not in 1..{s.p}')
    for disk, on in enumerate(s.assignment, 1):
        if on == peg:
            return disk
    return None


@dataclass(frozen=True)
class Move:
    '''One disk relocation in peg form plus its Demontis triple.

    `below` is the disk under `disk` before the move and `onto` the disk it
    lands on; either is INF when there is none.
    '''
    disk: int
    from_peg: int
    to_peg: int
    below: Disk = INF
    onto: Disk = INF

    @property
    def triple(self):
        return (self.disk, self.below, self.onto)

    @classmethod
    def between(cls, s, disk, to_peg):
        if not 1 <= to_peg <= s.p:
            raise InvalidPegError(f'peg {to_peg} is not in 1..{s.p}')
        from_peg = s.peg_of(disk)
        if from_peg == to_peg:
            raise IllegalMoveError(f'disk {disk} is already on peg {to_peg}')

        stacks = s.stacks()
        source = stacks[from_peg - 1]
        target = stacks[to_peg - 1]
        if source[-1] != disk:
            raise IllegalMoveError(f'disk {disk} is covered by disk {source[-1]}')
        if target and target[-1] < disk:
            raise IllegalMoveError(
                f'disk {disk} cannot be placed on smaller disk {target[-1]}')

        below = source[-2] if len(source) > 1 else INF
        onto = target[-1] if target else INF
        return cls(disk, from_peg, to_peg, below, onto)

    @classmethod
    def from_triple(cls, s, triple, to_peg=None):
        '''Recover the peg form of a triple in state `s`.

        A triple landing on INF only says "an empty peg"; the lowest empty
        peg is used unless `to_peg` names one.
        '''
        disk, _, onto = triple
        if onto != INF:
            to_peg = s.peg_of(onto)
        elif to_peg is None:
            stacks = s.stacks()
            empty = [peg for peg in range(1, s.p + 1) if not stacks[peg - 1]]
            if not empty:
                raise IllegalMoveError(f'triple {triple} needs an empty peg')
            to_peg = empty[0]
        elif top_disk(s, to_peg) is not None:
            raise IllegalMoveError(f'peg {to_peg} is not empty for triple {triple}')

        move = cls.between(s, disk, to_peg)
        if move.triple != tuple(triple):
            raise IllegalMoveError(f'triple {triple} does not match state, expected {move.triple}')
        return move

    def reverse(self):
        return Move(self.disk, self.to_peg, self.from_peg, self.onto, self.below)

    def compact(self):
        return f'{self.disk}:{self.from_peg}>{self.to_peg}'

    def to_json(self):
        return {
            'disk': self.disk,
            'from': self.from_peg,
            'to': self.to_peg,
            'triple': [self.disk, _dump_disk(self.below), _dump_disk(self.onto)],
        }

    @classmethod
    def from_json(cls, obj):
        disk, below, onto = obj['triple']
        if disk != obj['disk']:
            raise IllegalMoveError(f'triple {obj["triple"]} is not a move of disk {obj["disk"]}')
        return cls(obj['disk'], obj['from'], obj['to'], _load_disk(below), _load_disk(onto))


def parse_compact(line):
    '''`d:a>b` -> (disk, from_peg, to_peg)'''
    try:
        disk, pegs = line.strip().split(':')
        from_peg, to_peg = pegs.split('>')
        return int(disk), int(from_peg), int(to_peg)
    except ValueError:
        raise InvalidProblemError(f'not a move: {line!r}') from None


def legal_moves(s):
    stacks = s.stacks()
    moves = []
    for from_peg, source in enumerate(stacks, 1):
        if not source:
            continue
        disk = source[-1]
        below = source[-2] if len(source) > 1 else INF
        for to_peg, target in enumerate(stacks, 1):
            if to_peg == from_peg:
                continue
            if target and target[-1] < disk:
                continue
            moves.append(Move(disk, from_peg, to_peg, below, target[-1] if target else INF))
    return moves


def apply_move(s, m):
    if Move.between(s, m.disk, m.to_peg) != m:
        raise IllegalMoveError(f'{m} does not describe a move in state {s.assignment}')
    assignment = list(s.assignment)
    assignment[m.disk - 1] = m.to_peg
    return State(tuple(assignment), s.p)


def step_move(s, t):
    '''The move that takes state `s` to state `t`.'''
    if s.n != t.n or s.p != t.p:
        raise IllegalMoveError('states belong to different problems')
    changed = [disk for disk, (a, b) in enumerate(zip(s.assignment, t.assignment), 1) if a != b]
    if len(changed) != 1:
        raise IllegalMoveError(f'{len(changed)} disks change between consecutive states')
    return Move.between(s, changed[0], t.assignment[changed[0] - 1])


@dataclass(frozen=True)
class Path:
    states: Tuple[State, ...]

    def __post_init__(self):
        object.__setattr__(self, 'states', tuple(self.states))
        if not self.states:
            raise InvalidProblemError('a path has at least one state')
        first = self.states[0]
        if any(s.n != first.n or s.p != first.p for s in self.states):
            raise InvalidProblemError('all states of a path belong to one problem')

    @classmethod
    def from_moves(cls, start, moves):
        states = [start]
        for move in moves:
            states.append(apply_move(states[-1], move))
        return cls(tuple(states))

    @cached_property
    def moves(self):
        return tuple(step_move(a, b) for a, b in pairwise(self.states))

    @property
    def length(self):
        return len(self.states) - 1

    @property
    def start(self):
        return self.states[0]

    @property
    def end(self):
        return self.states[-1]

    @property
    def n(self):
        return self.start.n

    @property
    def p(self):
        return self.start.p

    def reversed(self):
        return Path(self.states[::-1])

    def to_json(self):
        return {
            'initial': self.start.to_json(),
            'moves': [move.to_json() for move in self.moves],
        }

    @classmethod
    def from_json(cls, obj, p):
        start = State(tuple(obj['initial']), p)
        return cls.from_moves(start, (Move.from_json(m) for m in obj['moves']))


def concat_paths(P, Q):
    if P.end != Q.start:
        raise PathMismatchError(
            f'path ends at {P.end.assignment} but the next starts at {Q.start.assignment}')
    return Path(P.states + Q.states[1:])


def _check_disks(disks, n):
    disks = set(disks)
    outside = [disk for disk in disks if not 1 <= disk <= n]
    if outside:
        raise InvalidProblemError(f'disks {sorted(outside)} are not in 1..{n}')
    return disks


def restrict(P, A):
    '''Erase the disks outside `A`.

    The kept disks are renumbered 1..|A| in size order and repeated
    consecutive states are collapsed, so the result is a legal path of the
    (|A|,p)-problem.
    '''
    disks = sorted(_check_disks(A, P.n))
    if not disks:
        raise InvalidProblemError('restriction needs at least one disk')

    states = []
    for s in P.states:
        restricted = State(tuple(s.assignment[disk - 1] for disk in disks), s.p)
        if not states or states[-1] != restricted:
            states.append(restricted)
    return Path(tuple(states))


def count_moves(P, X):
    disks = _check_disks(X, P.n)
    return sum(1 for move in P.moves if move.disk in disks)


def first_move_of(P, disk) -> Optional[int]:
    for index, move in enumerate(P.moves):
        if move.disk == disk:
            return index
    return None
