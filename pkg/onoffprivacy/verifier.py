import itertools
import logging
from collections import defaultdict, namedtuple
from fractions import Fraction

from scipy.stats import entropy

from onoffprivacy.encoders.onoff import OnOffEncoder
from onoffprivacy.markov import SOURCES, UContext, symmetric, validate_matrix, uniform
from onoffprivacy.scheme import ON, OFF, PrivacyPattern, optimal_inverse_rate

logger = logging.getLogger('scheme')

#: Largest horizon build_joint enumerates; the number of cells grows about 3.4 times per step
MAX_HORIZON = 8


class HorizonTooLarge(Exception):
    """
    Exception that is thrown if a horizon is too large to be enumerated
    """
    pass


PrivacyReport = namedtuple('PrivacyReport', ['t', 'factorizes', 'max_abs_gap', 'mi_bits'])
PrivacyReport.__doc__ = 'Result of the exact check that the requests in the privacy set are independent of the queries'


class JointTable(object):
    """
    Exact joint distribution of the requests X_0..X_{t+1} and the queries Q_0..Q_t. Cells with zero mass are
    not stored.
    """

    def __init__(self, horizon, entries, initial_dist, pattern=None, matrix=None):
        """
        Initialization

        :param horizon: t, the last query time
        :param entries: dictionary mapping (requests tuple, queries tuple) to :class:`fractions.Fraction`
        :param initial_dist: law of X_0
        :param pattern: object of class :class:`~onoffprivacy.scheme.PrivacyPattern` the table was built for
        :param matrix: object of class :class:`~onoffprivacy.markov.TransitionMatrix` the table was built for
        """
        self.horizon = horizon
        self.entries = entries
        self.initial_dist = initial_dist
        self.pattern = pattern
        self.matrix = matrix

    def total(self):
        return sum(self.entries.values())

    def marginal(self, key):
        """
        Sums the table over everything but key(requests, queries)

        :param key: function mapping a cell (requests, queries) to the marginal's outcome
        """
        result = defaultdict(Fraction)
        for (requests, queries), mass in self.entries.items():
            result[key(requests, queries)] += mass
        return dict(result)


def privacy_set(pattern, t):
    """
    B_t truncated at t+1: all ON times up to t, plus t+1
    """
    return tuple(pattern.on_times(t)) + (t + 1,)


def build_joint(matrix, pattern, initial, t, encoder=None):
    """
    Builds the exact joint table of requests and queries up to time t.

    1. Enumerates all request trajectories X_0..X_{t+1} with their chain probability

    2. Multiplies in the encoder weights of every time i <= t, using context (X_{F-(i)}, X_{i+1})

    :param matrix: object of class :class:`~onoffprivacy.markov.TransitionMatrix`
    :param pattern: object of class :class:`~onoffprivacy.scheme.PrivacyPattern`; only F_0..F_t are used
    :param initial: law of X_0
    :param t: last query time
    :param encoder: encoder to use, :class:`~onoffprivacy.encoders.onoff.OnOffEncoder` if not given
    """
    if t < 0:
        raise ValueError('Horizon must be non-negative, got %d' % t)
    if t > MAX_HORIZON:
        raise HorizonTooLarge('Horizon %d exceeds the enumeration limit %d' % (t, MAX_HORIZON))

    if encoder is None:
        encoder = OnOffEncoder()

    distributions = {}
    entries = {}
    for requests in itertools.product(SOURCES, repeat=t + 2):
        mass = Fraction(initial[requests[0]])
        for source_from, source_to in zip(requests, requests[1:]):
            mass *= matrix[source_from, source_to]
        if mass == 0:
            continue

        branches = [((), mass)]
        for i in range(t + 1):
            gap = pattern.gap(i)
            u = UContext(requests[pattern.last_on(i)], requests[i + 1])
            key = (gap, requests[i], u)
            if key not in distributions:
                distributions[key] = encoder.distribution(matrix, gap, requests[i], u)
            dist = distributions[key]
            branches = [(queries + (q,), weight * dist[q]) for queries, weight in branches for q in dist.support()]

        for queries, weight in branches:
            entries[(requests, queries)] = weight

    logger.debug('Joint table for %r, pattern %s, t=%d has %d cells' % (matrix, pattern, t, len(entries)))
    return JointTable(t, entries, initial, pattern, matrix)


def check_decodability(j):
    """
    True iff every cell with positive mass has x_i in q_i for all i

    :param j: object of class :class:`JointTable`
    """
    for (requests, queries), mass in j.entries.items():
        if mass > 0 and any(requests[i] not in q for i, q in enumerate(queries)):
            return False
    return True


def check_privacy(j, t):
    """
    Checks exactly that p(x_B, q_[t]) = p(x_B) p(q_[t]) for every cell, where B is the privacy set truncated at
    t+1. Requests after t+1 are independent of Q_[t] given X_{t+1}, so the truncated check is equivalent to the
    one over the whole future.

    :param j: object of class :class:`JointTable` with horizon t
    :param t: time
    """
    if j.horizon != t:
        raise ValueError('Privacy check at t=%d needs a table with horizon %d, got %d' % (t, t, j.horizon))

    indices = privacy_set(j.pattern, t)
    pairs = j.marginal(lambda requests, queries: (tuple(requests[i] for i in indices), queries))
    max_abs_gap = _dependence_gap(pairs)
    factorizes = max_abs_gap == 0
    mi_bits = 0.0 if factorizes else _mutual_information(pairs)
    return PrivacyReport(t, factorizes, max_abs_gap, mi_bits)


def proposition1_terms(matrix, pattern, t, initial=None, encoder=None):
    """
    The three terms of the privacy induction step, each exactly 0 for the optimal encoder:

    - I1 = I(X_B; Q_[t-1])
    - I2 = I(U_t; Q_[t-1])
    - I3 = I(X_B minus U_t; Q_t | U_t, Q_[t-1])

    Independence is decided exactly; a term is reported as 0.0 when its factorization holds, otherwise as its
    mutual information in bits.

    :param matrix: object of class :class:`~onoffprivacy.markov.TransitionMatrix`
    :param pattern: object of class :class:`~onoffprivacy.scheme.PrivacyPattern`
    :param t: time, at least 1
    :param initial: law of X_0; uniform if not given
    :param encoder: encoder, the optimal one if not given
    """
    if t < 1:
        raise ValueError('The induction terms are defined for t >= 1, got %d' % t)

    return _induction_terms(build_joint(matrix, pattern, initial or uniform(), t, encoder), t)


def _induction_terms(j, t):
    pattern = j.pattern
    indices = privacy_set(pattern, t)
    last_on = pattern.last_on(t)
    rest = tuple(i for i in indices if i not in (last_on, t + 1))

    def context(requests):
        return requests[last_on], requests[t + 1]

    first = j.marginal(lambda requests, queries: (tuple(requests[i] for i in indices), queries[:-1]))
    second = j.marginal(lambda requests, queries: (context(requests), queries[:-1]))
    third = j.marginal(lambda requests, queries: (tuple(requests[i] for i in rest), queries[-1],
                                                  (context(requests), queries[:-1])))

    i1 = 0.0 if _dependence_gap(first) == 0 else _mutual_information(first)
    i2 = 0.0 if _dependence_gap(second) == 0 else _mutual_information(second)
    i3 = 0.0 if _conditionally_independent(third) else _conditional_mutual_information(third)
    return i1, i2, i3


def expected_cost(j, t):
    """
    E[|Q_t|], the expected number of downloaded messages at time t

    :param j: object of class :class:`JointTable` with horizon at least t
    :param t: time
    """
    if j.horizon < t:
        raise ValueError('Table horizon %d is smaller than %d' % (j.horizon, t))
    return sum(mass * len(queries[t]) for (requests, queries), mass in j.entries.items())


def _split(pairs):
    left = defaultdict(Fraction)
    right = defaultdict(Fraction)
    for (a, b), mass in pairs.items():
        left[a] += mass
        right[b] += mass
    return left, right


def _dependence_gap(pairs):
    """
    Largest |p(a,b) - p(a)p(b)| over the supports of both marginals
    """
    left, right = _split(pairs)
    return max((abs(pairs.get((a, b), 0) - pa * pb) for a, pa in left.items() for b, pb in right.items()),
               default=Fraction(0))


def _conditionally_independent(triples):
    by_condition = defaultdict(dict)
    for (a, b, c), mass in triples.items():
        by_condition[c][(a, b)] = mass

    for cell in by_condition.values():
        total = sum(cell.values())
        left, right = _split(cell)
        for a, pa in left.items():
            for b, pb in right.items():
                if cell.get((a, b), 0) * total != pa * pb:
                    return False
    return True


def _entropy(masses):
    return entropy([float(m) for m in masses if m > 0], base=2)


def _mutual_information(pairs):
    left, right = _split(pairs)
    return max(0.0, _entropy(left.values()) + _entropy(right.values()) - _entropy(pairs.values()))


def _conditional_mutual_information(triples):
    ac = defaultdict(Fraction)
    bc = defaultdict(Fraction)
    c_only = defaultdict(Fraction)
    for (a, b, c), mass in triples.items():
        ac[(a, c)] += mass
        bc[(b, c)] += mass
        c_only[c] += mass
    return max(0.0, _entropy(ac.values()) + _entropy(bc.values()) - _entropy(triples.values())
               - _entropy(c_only.values()))


def acceptance_grid():
    """
    Strictly positive matrices used for sweeps: six symmetric chains and six asymmetric ones
    """
    grid = [symmetric(Fraction(alpha)) for alpha in ('1/10', '1/5', '1/4', '1/3', '2/5', '1/2')]
    for rows in ((('1/2', '1/2'), ('1/4', '3/4')),
                 (('2/3', '1/3'), ('1/5', '4/5')),
                 (('9/10', '1/10'), ('3/10', '7/10')),
                 (('1/3', '2/3'), ('1/2', '1/2')),
                 (('1/4', '3/4'), ('2/3', '1/3')),
                 (('4/5', '1/5'), ('3/5', '2/5'))):
        grid.append(validate_matrix(rows))
    return grid


def all_patterns(max_len):
    """
    Every privacy pattern starting with ON, of length 1 up to max_len
    """
    patterns = []
    for length in range(1, max_len + 1):
        for tail in itertools.product((ON, OFF), repeat=length - 1):
            patterns.append(PrivacyPattern((ON,) + tail))
    return patterns


def verify(matrix, pattern, t, initial, encoder=None):
    """
    Runs all exact checks for one (matrix, pattern, t) and returns the report row and whether everything passed:
    decodability, privacy, vanishing induction terms and the expected cost equal to the optimum.

    :param matrix: object of class :class:`~onoffprivacy.markov.TransitionMatrix`
    :param pattern: object of class :class:`~onoffprivacy.scheme.PrivacyPattern`
    :param t: time
    :param initial: law of X_0
    :param encoder: encoder to verify, the optimal one if not given
    """
    j = build_joint(matrix, pattern, initial, t, encoder)
    decodable = check_decodability(j)
    report = check_privacy(j, t)
    cost = expected_cost(j, t)
    theorem_cost = optimal_inverse_rate(matrix, pattern.gap(t))

    if t >= 1:
        terms = _induction_terms(j, t)
    else:
        terms = (0.0, 0.0, 0.0)

    passed = decodable and report.factorizes and terms == (0.0, 0.0, 0.0) and cost == theorem_cost
    if not passed:
        logger.warning('Verification failed for %r, pattern %s, t=%d: decodable=%s, factorizes=%s, cost=%s, '
                       'optimum=%s, terms=%s' % (matrix, pattern, t, decodable, report.factorizes, cost,
                                                 theorem_cost, terms))

    row = {
        'matrix': matrix.to_text(),
        'pattern': str(pattern),
        't': t,
        'gap': pattern.gap(t),
        'expected_cost': cost,
        'theorem_cost': theorem_cost,
        'factorizes': report.factorizes,
        'I1': terms[0],
        'I2': terms[1],
        'I3': terms[2],
    }
    return row, passed
