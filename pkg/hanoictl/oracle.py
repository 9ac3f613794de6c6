'''Exact M(n,p) by breadth-first search over all p^n states.

A state is packed as a base-p integer: digit d-1 is the (zero-based) peg of
disk d. Distance labels live in flat numpy arrays indexed by that code and
frontiers are expanded level by level, a chunk of states at a time.
'''
import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .core import Path, Problem, State
from .errors import BudgetExceededError, CodeRangeError, KOverflowError

log = logging.getLogger(__name__)

DEFAULT_MEMORY_BYTES = 2 * 2**30
DEFAULT_CHUNK_SIZE = 1 << 16

UNSEEN = -1
DISTANCE_DTYPE = np.int32


def encode(s, p=None):
    p = s.p if p is None else p
    code = 0
    for peg in reversed(s.assignment):
        code = code * p + (peg - 1)
    return code


def decode(code, n, p):
    if not 0 <= code < p**n:
        raise CodeRangeError(f'code {code} is not in [0, {p}^{n})')
    assignment = []
    for _ in range(n):
        code, digit = divmod(code, p)
        assignment.append(digit + 1)
    return State(tuple(assignment), p)


def required_bytes(n, p, chunk_size=DEFAULT_CHUNK_SIZE):
    '''Two distance arrays and frontier codes per state, plus one chunk's
    digit and neighbor arrays.'''
    states = p**n
    per_state = 2 * np.dtype(DISTANCE_DTYPE).itemsize + 16
    per_chunk = min(chunk_size, states) * 8 * (n + 2 * p * p)
    return states * per_state + per_chunk


def check_budget(n, p, memory_bytes=DEFAULT_MEMORY_BYTES, chunk_size=DEFAULT_CHUNK_SIZE):
    Problem(n, p)
    need = required_bytes(n, p, chunk_size)
    if need > memory_bytes:
        raise BudgetExceededError(n, p, p**n, need, memory_bytes)
    return need


class StateSpace:
    '''All states of the (n,p)-problem and their adjacency.

    Neighbors are ordered by source peg ascending, then destination peg
    ascending; path reconstruction and sampling depend on that order.
    '''

    def __init__(self, n, p, memory_bytes=DEFAULT_MEMORY_BYTES,
                 chunk_size=DEFAULT_CHUNK_SIZE, workers=1):
        check_budget(n, p, memory_bytes, chunk_size)
        self.n = n
        self.p = p
        self.size = p**n
        self.chunk_size = chunk_size
        self.workers = max(1, workers)
        self.powers = p**np.arange(n, dtype=np.int64)

    def encode(self, s):
        return encode(s, self.p)

    def decode(self, code):
        return decode(int(code), self.n, self.p)

    def constant(self, peg):
        '''Code of the state with every disk on `peg` (1-based).'''
        return (peg - 1) * int(self.powers.sum())

    def digits(self, codes):
        return (codes[:, None] // self.powers[None, :]) % self.p

    def _tops(self, digits):
        n = self.n
        tops = np.empty((self.p, digits.shape[0]), dtype=np.int64)
        for peg in range(self.p):
            on_peg = digits == peg
            tops[peg] = np.where(on_peg.any(axis=1), on_peg.argmax(axis=1), n)
        return tops

    def _expand_chunk(self, codes):
        tops = self._tops(self.digits(codes))
        out = []
        for src in range(self.p):
            moving = tops[src] < self.n
            for dst in range(self.p):
                if dst == src:
                    continue
                legal = moving & (tops[src] < tops[dst])
                disk = tops[src][legal]
                out.append(codes[legal] + (dst - src) * self.powers[disk])
        return np.concatenate(out)

    def chunks(self, codes):
        return [codes[i:i + self.chunk_size] for i in range(0, len(codes), self.chunk_size)]

    def expand(self, codes, keep=None):
        '''Every neighbor of every code, with repeats, optionally filtered
        chunk by chunk through the boolean mask function `keep`.'''
        if len(codes) == 0:
            return np.empty(0, dtype=np.int64)

        def work(part):
            neighbors = self._expand_chunk(part)
            return neighbors if keep is None else neighbors[keep(neighbors)]

        parts = self.chunks(codes)
        if self.workers > 1 and len(parts) > 1:
            with ThreadPoolExecutor(self.workers) as pool:
                expanded = list(pool.map(work, parts))
        else:
            expanded = [work(part) for part in parts]
        return np.concatenate(expanded)

    def neighbors(self, code):
        code = int(code)
        assignment = []
        rest = code
        for _ in range(self.n):
            rest, digit = divmod(rest, self.p)
            assignment.append(digit)
        tops = [self.n] * self.p
        for disk in range(self.n - 1, -1, -1):
            tops[assignment[disk]] = disk
        result = []
        for src in range(self.p):
            disk = tops[src]
            if disk == self.n:
                continue
            for dst in range(self.p):
                if dst != src and disk < tops[dst]:
                    result.append(code + (dst - src) * int(self.powers[disk]))
        return result

    def path(self, codes):
        return Path(tuple(self.decode(code) for code in codes))


class Frontier:
    '''One direction of a level-synchronous search.'''

    def __init__(self, space, origin):
        self.space = space
        self.dist = np.full(space.size, UNSEEN, dtype=DISTANCE_DTYPE)
        self.dist[origin] = 0
        self.codes = np.array([origin], dtype=np.int64)
        self.depth = 0
        self.expanded = 0
        self.peak = 1

    def advance(self):
        '''Label the next level; returns its codes sorted.'''
        fresh = np.unique(self.space.expand(self.codes,
                                            keep=lambda codes: self.dist[codes] == UNSEEN))
        self.expanded += len(self.codes)
        self.depth += 1
        if self.depth > np.iinfo(DISTANCE_DTYPE).max:
            raise KOverflowError(f'distance {self.depth} does not fit the distance table')
        self.dist[fresh] = self.depth
        self.codes = fresh
        self.peak = max(self.peak, len(fresh))
        return fresh

    def walk_back(self, code):
        '''Codes from `code` back to the origin along decreasing labels.'''
        chain = [int(code)]
        depth = int(self.dist[code])
        while depth > 0:
            depth -= 1
            chain.append(next(nb for nb in self.space.neighbors(chain[-1])
                              if self.dist[nb] == depth))
        return chain


@dataclass
class SearchResult:
    distance: int
    path: Optional[Path] = None
    states_expanded: int = 0
    peak_frontier: int = 0
    seconds: float = 0.0

    def to_json(self):
        return {
            'distance': self.distance,
            'states_expanded': self.states_expanded,
            'peak_frontier': self.peak_frontier,
            'ms': round(self.seconds * 1000, 3),
        }


def _bidirectional(space, start, goal):
    forward = Frontier(space, start)
    backward = Frontier(space, goal)
    while True:
        side, other = ((forward, backward) if len(forward.codes) <= len(backward.codes)
                       else (backward, forward))
        if len(side.codes) == 0:
            raise AssertionError('state graph is disconnected')
        fresh = side.advance()
        meet = fresh[other.dist[fresh] != UNSEEN]
        if len(meet):
            totals = side.depth + other.dist[meet].astype(np.int64)
            best = int(totals.min())
            pivot = int(meet[totals == best].min())
            return forward, backward, best, pivot


def _unidirectional(space, start, goal):
    forward = Frontier(space, start)
    while forward.dist[goal] == UNSEEN:
        if len(forward.codes) == 0:
            raise AssertionError('state graph is disconnected')
        forward.advance()
    return forward, int(forward.dist[goal])


def bfs_distance(n, p, start, goal, want_path=False, bidirectional=True,
                 memory_bytes=DEFAULT_MEMORY_BYTES, workers=1,
                 chunk_size=DEFAULT_CHUNK_SIZE):
    space = StateSpace(n, p, memory_bytes, chunk_size, workers)
    begin = time.perf_counter()
    a, b = space.encode(start), space.encode(goal)
    if a == b:
        return SearchResult(0, Path((start, )) if want_path else None)

    if bidirectional:
        forward, backward, distance, pivot = _bidirectional(space, a, b)
        expanded = forward.expanded + backward.expanded
        peak = max(forward.peak, backward.peak)
        path = None
        if want_path:
            codes = forward.walk_back(pivot)[::-1] + backward.walk_back(pivot)[1:]
            path = space.path(codes)
    else:
        forward, distance = _unidirectional(space, a, b)
        expanded, peak = forward.expanded, forward.peak
        path = space.path(forward.walk_back(b)[::-1]) if want_path else None

    result = SearchResult(distance, path, expanded, peak, time.perf_counter() - begin)
    log.debug('(%d,%d) distance %d, expanded %d states, peak frontier %d', n, p, distance,
              expanded, peak)
    return result


def m_number(n, p, want_path=False, **options):
    return bfs_distance(n, p, State.constant(n, p, 1), State.constant(n, p, 2),
                        want_path=want_path, **options)


def demolished(space, codes):
    '''Disk n alone on peg 1 with some other peg empty.'''
    digits = space.digits(codes)
    alone = (digits[:, -1] == 0) & ~(digits[:, :-1] == 0).any(axis=1)
    empty = np.zeros(len(codes), dtype=bool)
    for peg in range(1, space.p):
        empty |= ~(digits == peg).any(axis=1)
    return alone & empty


def minimal_demolishing_length(n, p, want_path=False, memory_bytes=DEFAULT_MEMORY_BYTES,
                               workers=1, chunk_size=DEFAULT_CHUNK_SIZE):
    '''Moves needed before disk n can leave peg 1, i.e. a minimal
    demolishing sequence without its final move of disk n.'''
    space = StateSpace(n, p, memory_bytes, chunk_size, workers)
    begin = time.perf_counter()
    frontier = Frontier(space, space.constant(1))
    codes = frontier.codes
    while True:
        hits = np.concatenate([part[demolished(space, part)] for part in space.chunks(codes)])
        if len(hits):
            break
        codes = frontier.advance()

    target = int(hits.min())
    path = None
    if want_path:
        path = space.path(frontier.walk_back(target)[::-1])
        assert all(s.assignment[-1] == 1 for s in path.states), 'disk n moved while demolishing'
    return SearchResult(frontier.depth, path, frontier.expanded, frontier.peak,
                        time.perf_counter() - begin)


def distances_from(space, origin):
    frontier = Frontier(space, origin)
    while len(frontier.codes):
        frontier.advance()
    return frontier.dist


def optimal_solutions_sample(n, p, limit, memory_bytes=DEFAULT_MEMORY_BYTES, workers=1,
                             chunk_size=DEFAULT_CHUNK_SIZE):
    '''Up to `limit` shortest solutions from peg 1 to peg 2, in the
    lexicographic order of the neighbor ordering.'''
    space = StateSpace(n, p, memory_bytes, chunk_size, workers)
    start, goal = space.constant(1), space.constant(2)
    from_start = distances_from(space, start)
    from_goal = distances_from(space, goal)
    total = int(from_start[goal])

    paths = []
    if limit <= 0:
        return paths
    chain = [start]
    pending = [iter(space.neighbors(start))]
    while pending:
        if len(chain) == total + 1:
            paths.append(space.path(chain))
            if len(paths) >= limit:
                break
            chain.pop()
            pending.pop()
            continue
        depth = len(chain)
        step = next((nb for nb in pending[-1]
                     if from_start[nb] == depth and from_goal[nb] == total - depth), None)
        if step is None:
            chain.pop()
            pending.pop()
        else:
            chain.append(step)
            pending.append(iter(space.neighbors(step)))
    log.debug('sampled %d optimal solutions of (%d,%d)', len(paths), n, p)
    return paths


def write_distance_table(stream, n, p, dist):
    '''Header: n, p and entry width in bytes as little-endian uint32; then
    p^n little-endian signed entries in code order.'''
    dist = np.asarray(dist)
    if dist.shape != (p**n, ):
        raise CodeRangeError(f'table has {dist.size} entries, ({n},{p}) needs {p**n}')
    stream.write(np.array([n, p, dist.dtype.itemsize], dtype='<u4').tobytes())
    stream.write(dist.astype(dist.dtype.newbyteorder('<')).tobytes())


def read_distance_table(stream):
    header = stream.read(12)
    if len(header) != 12:
        raise CodeRangeError('distance table header is truncated')
    n, p, width = (int(x) for x in np.frombuffer(header, dtype='<u4'))
    if width not in (1, 2, 4, 8):
        raise CodeRangeError(f'distance table entries of {width} bytes are not supported')
    data = stream.read(p**n * width)
    if len(data) != p**n * width:
        raise CodeRangeError(f'distance table of ({n},{p}) is truncated')
    dist = np.frombuffer(data, dtype=f'<i{width}')
    return n, p, dist
