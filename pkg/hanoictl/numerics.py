'''Exact integer arithmetic for Frame-Stewart numbers.

All values are Python integers, so nothing wraps; the only size limit is
printing them (see KOverflowError in the cli).
'''
import logging
import threading
from dataclasses import dataclass

from .errors import InvalidProblemError

log = logging.getLogger(__name__)


def _check(n, p, n_min=1, p_min=3):
    if n < n_min:
        raise InvalidProblemError(f'need n >= {n_min}, got n={n}')
    if p < p_min:
        raise InvalidProblemError(f'need p >= {p_min}, got p={p}')


def binomial(a, b):
    if a < 0 or b < 0:
        raise InvalidProblemError(f'binomial({a}, {b}) needs nonnegative arguments')
    if b > a:
        return 0
    b = min(b, a - b)
    result = 1
    for i in range(1, b + 1):
        result = result * (a - i + 1) // i
    return result


def find_r(n, p):
    '''The level of n: the unique r >= 1 with C(p+r-3, p-2) <= n < C(p+r-2, p-2).'''
    _check(n, p)
    r = 1
    while binomial(p + r - 2, p - 2) <= n:
        r += 1
    assert binomial(p + r - 3, p - 2) <= n < binomial(p + r - 2, p - 2)
    return r


def k_closed(n, p):
    _check(n, p)
    r = find_r(n, p)
    total = sum(2**t * binomial(p + t - 3, p - 3) for t in range(r))
    return total + 2**r * (n - binomial(p + r - 3, p - 2))


def k_delta(n, p):
    '''K(n,p) - K(n-1,p): 2^(r-1) when n opens its level, 2^r inside it.'''
    _check(n, p, n_min=2)
    return k_closed(n, p) - k_closed(n - 1, p)


@dataclass(frozen=True)
class SplitChoice:
    n: int
    p: int
    k: int
    r: int
    alpha: int

    @property
    def beta(self):
        return self.k - binomial(self.p + self.r - 4, self.p - 2)

    @property
    def gamma(self):
        return self.alpha - self.beta


class KTable:
    '''Frame-Stewart DP values and their smallest minimizing split.

    Rows are filled bottom-up (p ascending from 3, n ascending) by one
    writer holding the lock; once a row covers n it is only read.
    '''

    def __init__(self):
        self._lock = threading.Lock()
        self._values = {}
        self._splits = {}

    def _row(self, p, n):
        values = self._values.get(p)
        if values is not None and len(values) > n:
            return values
        with self._lock:
            values = self._values.get(p)
            if values is None or len(values) <= n:
                self._fill(p, n)
            return self._values[p]

    def _fill(self, p, n):
        if p == 3:
            self._values[3] = [2**m - 1 for m in range(n + 1)]
            return

        lower = self._values.get(p - 1)
        if lower is None or len(lower) <= n:
            self._fill(p - 1, n)
            lower = self._values[p - 1]

        values = self._values.setdefault(p, [0, 1])
        splits = self._splits.setdefault(p, [0, 0])
        start = len(values)
        for m in range(start, n + 1):
            best, best_k = None, 0
            for k in range(1, m):
                cost = 2 * values[k] + lower[m - k]
                if best is None or cost < best:
                    best, best_k = cost, k
            # a row is read without the lock once values covers n
            splits.append(best_k)
            values.append(best)
        if n >= start:
            log.debug('k table p=%d filled up to n=%d', p, n)

    def value(self, n, p):
        _check(n, p, n_min=0)
        return self._row(p, n)[n]

    def split(self, n, p):
        _check(n, p, n_min=2, p_min=4)
        splits = self._splits.get(p)
        if splits is None or len(splits) <= n:
            self._row(p, n)
            splits = self._splits[p]
        return splits[n]


_table = KTable()


def k_dp(n, p):
    return _table.value(n, p)


def split_cost(n, p, k):
    return 2 * k_dp(k, p) + k_dp(n - k, p - 1)


def optimal_split(n, p):
    k = _table.split(n, p)
    r = find_r(n, p)
    return SplitChoice(n, p, k, r, n - binomial(p + r - 3, p - 2))


def admissible_splits(n, p):
    '''Splits k = C(p+r-4, p-2) + beta with beta + gamma = alpha and the
    strict bounds beta < C(p+r-4, p-3), gamma < C(p+r-4, p-4).

    Only pairs giving 1 <= k < n are yielded.
    '''
    _check(n, p, n_min=2, p_min=4)
    r = find_r(n, p)
    alpha = n - binomial(p + r - 3, p - 2)
    base = binomial(p + r - 4, p - 2)
    beta_bound = binomial(p + r - 4, p - 3)
    gamma_bound = binomial(p + r - 4, p - 4)
    for beta in range(min(alpha, beta_bound - 1) + 1):
        gamma = alpha - beta
        if gamma >= gamma_bound:
            continue
        k = base + beta
        if 1 <= k < n:
            yield SplitChoice(n, p, k, r, alpha)
