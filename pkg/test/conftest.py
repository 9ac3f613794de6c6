import pytest

from hanoictl.constructor import build_solution

from .hanoictl import HanoictlCli


@pytest.fixture()
def hanoictl():
    return HanoictlCli()


@pytest.fixture(scope='module')
def classical():
    '''the 7-move solution of (3,3) from peg 1 to peg 3'''
    return build_solution(3, 3, 1, 3)
