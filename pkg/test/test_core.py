import json
import random

import pytest

from hanoictl.core import (INF, Move, Path, Problem, State, apply_move, concat_paths,
                           count_moves, legal_moves, parse_compact, restrict, top_disk)
from hanoictl.errors import (IllegalMoveError, InvalidPegError, InvalidProblemError,
                             PathMismatchError)


def random_walk(n, p, steps, seed):
    rng = random.Random(seed)
    s = State.constant(n, p, 1)
    states = [s]
    for _ in range(steps):
        s = apply_move(s, rng.choice(legal_moves(s)))
        states.append(s)
    return Path(tuple(states))


def test_problem():
    Problem(1, 3)
    with pytest.raises(InvalidProblemError):
        Problem(0, 3)
    with pytest.raises(InvalidProblemError):
        Problem(3, 2)
    with pytest.raises(InvalidPegError):
        State((1, 4), 3)


def test_top_disk():
    full = State.constant(3, 3, 1)
    assert top_disk(full, 1) == 1
    assert top_disk(full, 2) is None
    assert top_disk(State((2, 1, 1), 3), 2) == 1
    assert top_disk(State((2, 1, 1), 3), 1) == 2


def test_stacks():
    s = State((2, 1, 1, 2), 4)
    assert s.stacks() == ((3, 2), (4, 1), (), ())
    assert not s.is_constant()
    assert State.constant(4, 4, 3).is_constant()
    assert s.swap_pegs(1, 2).assignment == (1, 2, 2, 1)


def test_legal_moves():
    moves = legal_moves(State.constant(1, 3, 1))
    assert [(m.from_peg, m.to_peg) for m in moves] == [(1, 2), (1, 3)]

    moves = legal_moves(State.constant(2, 3, 1))
    assert [(m.disk, m.to_peg) for m in moves] == [(1, 2), (1, 3)]

    moves = legal_moves(State.constant(3, 4, 1))
    assert len(moves) == 3
    assert all(m.disk == 1 and m.triple == (1, 2, INF) for m in moves)

    # disk 1 on peg 2: disk 2 may only go to peg 3, disk 1 anywhere
    moves = legal_moves(State((2, 1), 3))
    assert sorted((m.disk, m.from_peg, m.to_peg) for m in moves) == [(1, 2, 1), (1, 2, 3),
                                                                      (2, 1, 3)]
    onto_disk = next(m for m in moves if m.to_peg == 1)
    assert onto_disk.triple == (1, INF, 2)


def test_apply_move():
    s = State.constant(3, 3, 1)
    move = Move.between(s, 1, 2)
    t = apply_move(s, move)
    assert t.assignment == (2, 1, 1)
    assert apply_move(t, move.reverse()) == s

    with pytest.raises(IllegalMoveError):
        apply_move(s, Move(2, 1, 3, 3, INF))
    with pytest.raises(IllegalMoveError):
        Move.between(t, 2, 2)
    with pytest.raises(IllegalMoveError):
        # right pegs, wrong triple
        apply_move(s, Move(1, 1, 2, INF, INF))


@pytest.mark.parametrize('n,p,seed', [(3, 3, 0), (4, 4, 1), (5, 5, 2)])
def test_legality_closure(n, p, seed):
    for s in random_walk(n, p, 60, seed).states:
        for move in legal_moves(s):
            t = apply_move(s, move)
            assert move.reverse() in legal_moves(t)

            recovered = Move.from_triple(s, move.triple, to_peg=move.to_peg)
            assert recovered == move
            if move.onto != INF:
                assert Move.from_triple(s, move.triple) == move
            else:
                assert top_disk(s, Move.from_triple(s, move.triple).to_peg) is None


def test_move_json():
    move = Move(1, 1, 3, 2, INF)
    assert move.to_json() == {'disk': 1, 'from': 1, 'to': 3, 'triple': [1, 2, 'inf']}
    assert Move.from_json(json.loads(json.dumps(move.to_json()))) == move
    assert move.compact() == '1:1>3'
    assert parse_compact('12:3>1\n') == (12, 3, 1)
    with pytest.raises(InvalidProblemError):
        parse_compact('1-2')


def test_path_json(classical):
    obj = classical.to_json()
    assert obj['initial'] == [1, 1, 1]
    assert len(obj['moves']) == 7
    assert Path.from_json(obj, 3) == classical


def test_path_rejects_jumps():
    s = State.constant(2, 3, 1)
    with pytest.raises(IllegalMoveError):
        Path((s, State.constant(2, 3, 2))).moves


def test_concat(classical):
    P = Path(classical.states[:4])
    Q = Path(classical.states[3:])
    assert P.length == 3
    assert Q.length == 4
    assert concat_paths(P, Q).length == 7
    assert concat_paths(P, Q) == classical

    single = Path((classical.start, ))
    assert concat_paths(single, classical) == classical

    with pytest.raises(PathMismatchError):
        concat_paths(Q, P)


def test_restrict(classical):
    assert restrict(classical, {1, 2, 3}) == classical
    assert restrict(classical, {1}).length == 4
    assert restrict(classical, {3}).length == 1
    assert restrict(classical, {2, 3}).length == 3

    only_small = Path.from_moves(State.constant(2, 3, 1), [Move(1, 1, 2, 2, INF)])
    assert restrict(only_small, {2}).length == 0

    with pytest.raises(InvalidProblemError):
        restrict(classical, set())
    with pytest.raises(InvalidProblemError):
        restrict(classical, {4})


def test_count_moves(classical):
    assert count_moves(classical, {1, 2, 3}) == 7
    assert count_moves(classical, set()) == 0
    assert count_moves(classical, {3}) == 1
    assert count_moves(classical, {1}) == 4


@pytest.mark.parametrize('seed', range(5))
def test_count_and_restrict_laws(seed):
    P = random_walk(5, 4, 80, seed)
    rng = random.Random(seed)
    disks = set(range(1, 6))
    X = {d for d in disks if rng.random() < 0.5}
    Y = disks - X
    assert count_moves(P, X) + count_moves(P, Y) == P.length
    assert count_moves(P, disks) == P.length
    for A in (X, Y, {1, 5}, {3}):
        if A:
            assert restrict(P, A).length == count_moves(P, A)
