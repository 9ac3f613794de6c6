import io
import random
from itertools import permutations

import numpy as np
import pytest

from hanoictl.constructor import build_solution, validate_solution
from hanoictl.core import State, apply_move, legal_moves
from hanoictl.errors import BudgetExceededError, CodeRangeError
from hanoictl.numerics import k_closed
from hanoictl.oracle import (StateSpace, bfs_distance, check_budget, decode, distances_from,
                             encode, m_number, minimal_demolishing_length,
                             optimal_solutions_sample, read_distance_table, write_distance_table)


def random_state(n, p, rng):
    return State(tuple(rng.randint(1, p) for _ in range(n)), p)


def test_encode_decode():
    assert encode(State.constant(4, 3, 1)) == 0
    assert encode(State((2, 1), 3)) == 1
    assert decode(1, 2, 3) == State((2, 1), 3)

    codes = set()
    for code in range(3**4):
        s = decode(code, 4, 3)
        assert encode(s) == code
        codes.add(s.assignment)
    assert len(codes) == 81

    with pytest.raises(CodeRangeError):
        decode(81, 4, 3)


def test_neighbors_match_legal_moves():
    rng = random.Random(3)
    space = StateSpace(5, 4)
    codes = np.array(sorted({encode(random_state(5, 4, rng)) for _ in range(200)}),
                     dtype=np.int64)
    for code in codes:
        s = space.decode(code)
        expected = [encode(apply_move(s, m)) for m in legal_moves(s)]
        assert space.neighbors(code) == expected
    assert sorted(space.expand(codes).tolist()) == sorted(
        nb for code in codes for nb in space.neighbors(code))


def test_trivial_distances():
    s = State.constant(3, 4, 2)
    assert bfs_distance(3, 4, s, s).distance == 0
    for a, b in permutations(range(1, 5), 2):
        assert bfs_distance(1, 4, State.constant(1, 4, a), State.constant(1, 4, b)).distance == 1
    result = bfs_distance(3, 3, State.constant(3, 3, 1), State.constant(3, 3, 3), want_path=True)
    assert result.distance == 7
    assert validate_solution(result.path, 3, 3, 1, 3).ok


@pytest.mark.timeout(30)
def test_classical_law():
    for n in range(1, 11):
        assert m_number(n, 3).distance == 2**n - 1


def test_small_m_numbers():
    for p in range(3, 7):
        assert m_number(1, p).distance == 1
    result = m_number(4, 4, want_path=True)
    assert result.distance == 9 == k_closed(4, 4)
    assert result.path.length == 9
    assert validate_solution(result.path, 4, 4, 1, 2).ok
    assert result.states_expanded > 0
    assert result.peak_frontier > 0


@pytest.mark.timeout(120)
def test_conjecture_four_pegs():
    for n in range(1, 11):
        assert m_number(n, 4).distance == k_closed(n, 4), n


@pytest.mark.timeout(120)
def test_conjecture_five_pegs():
    for n in range(1, 9):
        assert m_number(n, 5).distance == k_closed(n, 5), n


def test_bidirectional_equals_unidirectional():
    rng = random.Random(7)
    for n, p in [(4, 3), (6, 3), (5, 4), (7, 4), (5, 5), (6, 6)]:
        for _ in range(5):
            a, b = random_state(n, p, rng), random_state(n, p, rng)
            both = bfs_distance(n, p, a, b, want_path=True)
            one = bfs_distance(n, p, a, b, want_path=True, bidirectional=False)
            assert both.distance == one.distance
            assert both.path.length == both.distance
            assert both.path.start == a and both.path.end == b


@pytest.mark.timeout(600)
def test_bidirectional_equals_unidirectional_on_towers():
    # every tower-to-tower problem with at most 10^5 states, up to 10 pegs
    cells = [(n, p) for p in range(3, 11) for n in range(1, 20) if p**n <= 10**5]
    assert (10, 3) in cells and (8, 4) in cells and (5, 10) in cells
    for n, p in cells:
        start = State.constant(n, p, 1)
        for peg in (2, p):
            goal = State.constant(n, p, peg)
            both = bfs_distance(n, p, start, goal)
            one = bfs_distance(n, p, start, goal, bidirectional=False)
            assert both.distance == one.distance, (n, p, peg)
        assert both.distance == m_number(n, p).distance


def test_symmetry_and_relabeling():
    rng = random.Random(11)
    n, p = 5, 4
    for _ in range(10):
        a, b = random_state(n, p, rng), random_state(n, p, rng)
        distance = bfs_distance(n, p, a, b).distance
        assert bfs_distance(n, p, b, a).distance == distance

        relabel = list(range(1, p + 1))
        rng.shuffle(relabel)
        a2 = State(tuple(relabel[peg - 1] for peg in a.assignment), p)
        b2 = State(tuple(relabel[peg - 1] for peg in b.assignment), p)
        assert bfs_distance(n, p, a2, b2).distance == distance


@pytest.mark.timeout(120)
@pytest.mark.parametrize('n,p', [(3, 3), (4, 4), (5, 4), (4, 5)])
def test_random_walks_never_beat_oracle(n, p):
    rng = random.Random(n * 100 + p)
    start = State.constant(n, p, 1)
    distances = {}
    for _ in range(300):
        s = start
        steps = rng.randint(0, 40)
        for _ in range(steps):
            s = apply_move(s, rng.choice(legal_moves(s)))
        if s not in distances:
            distances[s] = bfs_distance(n, p, start, s).distance
        assert steps >= distances[s]


def test_constructed_never_beats_oracle():
    for n, p in [(5, 3), (6, 4), (5, 5)]:
        path = build_solution(n, p, 1, 2)
        assert path.length >= m_number(n, p).distance


def test_odd_m_numbers():
    for n, p in [(2, 3), (5, 3), (3, 4), (6, 4), (4, 5), (3, 6)]:
        assert m_number(n, p).distance % 2 == 1


def test_demolishing_length():
    assert minimal_demolishing_length(1, 3).distance == 0
    assert minimal_demolishing_length(2, 3).distance == 1
    result = minimal_demolishing_length(3, 3, want_path=True)
    assert result.distance == 3
    mu = result.path.end
    assert mu.peg_of(3) == 1
    assert all(mu.peg_of(disk) != 1 for disk in (1, 2))


@pytest.mark.timeout(120)
def test_demolishing_doubles_to_m():
    for p in (3, 4, 5):
        for n in range(1, 9):
            demolish = minimal_demolishing_length(n, p).distance
            assert 2 * demolish + 1 == m_number(n, p).distance, (n, p)


def test_optimal_solutions_sample():
    [only] = optimal_solutions_sample(1, 3, 10)
    assert only.length == 1

    paths = optimal_solutions_sample(2, 3, 10)
    assert len(paths) == 1
    assert paths[0].length == 3

    paths = optimal_solutions_sample(4, 4, 25)
    assert 1 < len(paths) <= 25
    assert len(set(paths)) == len(paths)
    for path in paths:
        assert path.length == 9
        assert validate_solution(path, 4, 4, 1, 2).ok
    assert optimal_solutions_sample(4, 4, 25) == paths
    assert optimal_solutions_sample(4, 4, 0) == []


def test_parallel_expansion_is_identical():
    a = m_number(6, 4, want_path=True, chunk_size=64)
    b = m_number(6, 4, want_path=True, chunk_size=64, workers=4)
    assert a.distance == b.distance
    assert a.path == b.path


def test_budget():
    with pytest.raises(BudgetExceededError) as info:
        check_budget(20, 4)
    assert info.value.states == 4**20
    assert info.value.required_bytes > 2 * 2**30
    assert info.value.exit_code == 3

    with pytest.raises(BudgetExceededError):
        m_number(8, 4, memory_bytes=1024)


def test_distance_table():
    space = StateSpace(3, 3)
    dist = distances_from(space, 0)
    assert dist.max() == 7
    assert (dist >= 0).all()

    stream = io.BytesIO()
    write_distance_table(stream, 3, 3, dist)
    data = stream.getvalue()
    width = dist.dtype.itemsize
    assert np.frombuffer(data[:12], dtype='<u4').tolist() == [3, 3, width]
    assert len(data) == 12 + 27 * width
    stream.seek(0)
    n, p, table = read_distance_table(stream)
    assert (n, p) == (3, 3)
    assert table.tolist() == dist.tolist()

    with pytest.raises(CodeRangeError):
        read_distance_table(io.BytesIO(data[:-1]))
    with pytest.raises(CodeRangeError):
        read_distance_table(io.BytesIO(data[:8]))
