'''Exceptions raised by hanoictl. Each carries the exit code the cli maps it to.'''


class HanoiError(Exception):
    exit_code = 1


class CheckMismatchError(HanoiError):
    '''a computed value disagrees with the formula it is checked against'''
    exit_code = 1


class InvalidProblemError(HanoiError, ValueError):
    exit_code = 2


class InvalidPegError(InvalidProblemError):
    pass


class IllegalMoveError(HanoiError, ValueError):
    exit_code = 2


class PathMismatchError(HanoiError, ValueError):
    exit_code = 2


class CodeRangeError(HanoiError, ValueError):
    exit_code = 2


class KOverflowError(HanoiError, OverflowError):
    exit_code = 2


class BudgetExceededError(HanoiError):
    exit_code = 3

    def __init__(self, n, p, states, required_bytes, budget_bytes):
        self.n = n
        self.p = p
        self.states = states
        self.required_bytes = required_bytes
        self.budget_bytes = budget_bytes
        super().__init__(
            f'({n},{p}) has {states} states and needs about '
            f'{required_bytes / 2**30:.2f} GiB ({required_bytes} bytes), '
            f'budget is {budget_bytes / 2**30:.2f} GiB')
