import functools
import itertools
import logging
from collections import namedtuple
from fractions import Fraction

logger = logging.getLogger('scheme')

SOURCE_A = 'A'
SOURCE_B = 'B'
SOURCES = (SOURCE_A, SOURCE_B)


class NotStochastic(Exception):
    """
    Exception that is thrown if a matrix is not a valid 2x2 row-stochastic matrix
    """
    pass


class DegenerateContext(Exception):
    """
    Exception that is thrown if a conditional probability is requested for a context with zero probability
    """
    pass


class MatrixFormatError(Exception):
    """
    Exception that is thrown if a transition matrix could not be parsed from text
    """
    pass


UContext = namedtuple('UContext', ['last_on', 'next'])
UContext.__doc__ = 'Pair (X_{F-(t)}, X_{t+1}): request at the last ON time and the one-step lookahead request'

#: All four contexts in a fixed order: (A,A), (A,B), (B,A), (B,B)
CONTEXTS = tuple(UContext(a, b) for a in SOURCES for b in SOURCES)

BridgeDistribution = namedtuple('BridgeDistribution', ['probs', 'gap'])
BridgeDistribution.__doc__ = 'Conditional law p(x_t|u_t) of the current request, for a given gap t - F-(t)'


class TransitionMatrix(object):
    """
    Immutable 2x2 transition matrix of the request chain, with exact rational entries. Rows and columns are
    indexed by source label (A, B).
    """

    def __init__(self, rows):
        """
        Initialization. Use :func:`~onoffprivacy.markov.validate_matrix` to build validated instances.

        :param rows: 2x2 grid of :class:`fractions.Fraction`
        """
        self._rows = tuple(tuple(Fraction(value) for value in row) for row in rows)
        self.positive = all(value > 0 for row in self._rows for value in row)

    def __getitem__(self, key):
        source_from, source_to = key
        return self._rows[SOURCES.index(source_from)][SOURCES.index(source_to)]

    @property
    def rows(self):
        return self._rows

    def __eq__(self, other):
        return isinstance(other, TransitionMatrix) and self._rows == other._rows

    def __hash__(self):
        return hash(self._rows)

    def __repr__(self):
        return 'TransitionMatrix(%s)' % self.to_text()

    def to_text(self):
        """
        Renders the matrix in the row-major textual form accepted by :func:`parse_matrix`
        """
        return ' '.join(str(value) for row in self._rows for value in row)


def validate_matrix(raw):
    """
    Validates a raw 2x2 grid and returns it as :class:`TransitionMatrix`. The `positive` attribute of the result
    tells whether all entries are strictly positive.

    :param raw: 2x2 grid of rationals (anything :class:`fractions.Fraction` accepts)
    """
    try:
        rows = [[Fraction(value) for value in row] for row in raw]
    except (TypeError, ValueError, ZeroDivisionError) as e:
        raise NotStochastic('Matrix entries must be rationals: %s' % e)

    if len(rows) != 2 or any(len(row) != 2 for row in rows):
        raise NotStochastic('Matrix must be 2x2, got %s' % raw)

    for row in rows:
        if any(value < 0 or value > 1 for value in row):
            raise NotStochastic('Matrix entries must lie in [0, 1], got row %s' % [str(v) for v in row])
        if sum(row) != 1:
            raise NotStochastic('Matrix rows must sum to 1, got row sum %s' % sum(row))

    return TransitionMatrix(rows)


def symmetric(alpha):
    """
    Returns the symmetric chain that switches source with probability alpha

    :param alpha: switching probability
    """
    alpha = Fraction(alpha)
    return validate_matrix([[1 - alpha, alpha], [alpha, 1 - alpha]])


def parse_matrix(text):
    """
    Parses a matrix from its textual form: either four fractions in row-major order ("3/4 1/4 1/4 3/4") or the
    symmetric shorthand "alpha=1/4".

    :param text: textual matrix
    """
    text = text.strip()
    try:
        if text.startswith('alpha='):
            return symmetric(Fraction(text[len('alpha='):]))

        values = [Fraction(token) for token in text.replace(',', ' ').split()]
    except (ValueError, ZeroDivisionError):
        raise MatrixFormatError('Could not parse matrix "%s"' % text)

    if len(values) != 4:
        raise MatrixFormatError('Expected four fractions, got %d in "%s"' % (len(values), text))

    return validate_matrix([values[:2], values[2:]])


@functools.lru_cache(maxsize=256)
def power(matrix, k):
    """
    Exact k-step transition matrix, returned as a 2x2 tuple grid indexed like :attr:`TransitionMatrix.rows`.

    :param matrix: object of class :class:`TransitionMatrix`
    :param k: non-negative number of steps
    """
    if k < 0:
        raise ValueError('Matrix power must be non-negative, got %d' % k)

    result = ((Fraction(1), Fraction(0)), (Fraction(0), Fraction(1)))
    base = matrix.rows
    while k:
        if k & 1:
            result = _multiply(result, base)
        base = _multiply(base, base)
        k >>= 1
    return result


def _multiply(left, right):
    return tuple(
        tuple(sum(left[i][m] * right[m][j] for m in range(2)) for j in range(2))
        for i in range(2)
    )


def step_probability(matrix, k, source_from, source_to):
    """
    p(X_{i+k} = source_to | X_i = source_from)
    """
    return power(matrix, k)[SOURCES.index(source_from)][SOURCES.index(source_to)]


def context_possible(matrix, gap, u):
    """
    Checks whether context u can occur at this gap, i.e. whether p(x_{t+1}|x_{F-(t)}) > 0
    """
    return step_probability(matrix, gap + 1, u.last_on, u.next) > 0


def bridge(matrix, gap, u):
    """
    Conditional law of the current request given the context:

    p(x_t|u_t) = p(x_{t+1}|x_t) p(x_t|x_{F-(t)}) / p(x_{t+1}|x_{F-(t)})

    with the three factors taken from M, M^gap and M^(gap+1). For gap 0, M^0 is the identity and the result is
    the point mass on u.last_on.

    :param matrix: object of class :class:`TransitionMatrix`
    :param gap: t - F-(t)
    :param u: object of class :class:`UContext`
    """
    denominator = step_probability(matrix, gap + 1, u.last_on, u.next)
    if denominator == 0:
        if gap == 0:
            # limit of the indicator: X_t = X_{F-(t)}
            return BridgeDistribution({x: Fraction(int(x == u.last_on)) for x in SOURCES}, gap)
        raise DegenerateContext('Context %s has probability 0 at gap %d for %r' % (tuple(u), gap, matrix))

    probs = {
        x: matrix[x, u.next] * step_probability(matrix, gap, u.last_on, x) / denominator
        for x in SOURCES
    }
    return BridgeDistribution(probs, gap)


def enumerate_bridge(matrix, gap, u):
    """
    Reference computation of :func:`bridge`: conditional law of X_gap given X_0 = u.last_on and
    X_{gap+1} = u.next, by summing over all trajectories of the chain.
    """
    weights = {x: Fraction(0) for x in SOURCES}
    for middle in itertools.product(SOURCES, repeat=gap):
        path = (u.last_on,) + middle
        current = path[-1]
        mass = Fraction(1)
        for source_from, source_to in zip(path, path[1:]):
            mass *= matrix[source_from, source_to]
        weights[current] += mass * matrix[current, u.next]

    total = sum(weights.values())
    if total == 0:
        raise DegenerateContext('Context %s has probability 0 at gap %d for %r' % (tuple(u), gap, matrix))
    return BridgeDistribution({x: weights[x] / total for x in SOURCES}, gap)


def stationary(matrix):
    """
    Exact stationary distribution of the chain

    :param matrix: object of class :class:`TransitionMatrix`
    """
    leave_a = matrix[SOURCE_A, SOURCE_B]
    leave_b = matrix[SOURCE_B, SOURCE_A]
    if leave_a + leave_b == 0:
        raise DegenerateContext('Chain %r never switches source, stationary law is not unique' % matrix)
    return {SOURCE_A: leave_b / (leave_a + leave_b), SOURCE_B: leave_a / (leave_a + leave_b)}


def uniform():
    return {x: Fraction(1, len(SOURCES)) for x in SOURCES}


def initial_distribution(matrix, name):
    """
    Returns the law of X_0 by name

    :param matrix: object of class :class:`TransitionMatrix`
    :param name: 'uniform' or 'stationary'
    """
    if name == 'uniform':
        return uniform()
    if name == 'stationary':
        return stationary(matrix)
    raise ValueError('Unknown initial distribution %s' % name)
