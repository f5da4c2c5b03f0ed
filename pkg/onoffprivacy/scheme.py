import functools
import logging
from collections import namedtuple
from fractions import Fraction

from onoffprivacy.markov import SOURCES, SOURCE_A, SOURCE_B, CONTEXTS, DegenerateContext, bridge, \
    context_possible, step_probability, uniform

logger = logging.getLogger('scheme')

ON = 'ON'
OFF = 'OFF'

QUERY_A = frozenset([SOURCE_A])
QUERY_B = frozenset([SOURCE_B])
QUERY_AB = frozenset([SOURCE_A, SOURCE_B])

#: Fixed symbol order used for sampling and serialization
QUERY_SYMBOLS = (QUERY_A, QUERY_B, QUERY_AB)


class ImpossibleContext(Exception):
    """
    Exception that is thrown if the encoder is asked for a request that cannot occur in the given context
    """
    pass


class PatternFormatError(Exception):
    """
    Exception that is thrown if a privacy pattern could not be parsed or does not start with ON
    """
    pass


PiFloor = namedtuple('PiFloor', ['pi_a', 'pi_b', 'gap'])
PiFloor.__doc__ = 'Column minima of the bridge table: the largest singleton probability privacy allows per source'


def singleton(x):
    return frozenset([x])


def symbol_name(q):
    """
    Name of a query symbol as used in logs and CSV files: A, B or AB
    """
    return ''.join(x for x in SOURCES if x in q)


def symbol_from_name(name):
    q = frozenset(name)
    if q not in QUERY_SYMBOLS:
        raise ValueError('Unknown query symbol %s' % name)
    return q


class EncoderDistribution(object):
    """
    Distribution w(q|x,u) over the query symbols. Symbols not listed have probability 0.
    """

    def __init__(self, probs):
        """
        Initialization

        :param probs: dictionary mapping query symbols (frozensets) to :class:`fractions.Fraction`
        """
        self.probs = {q: Fraction(probs.get(q, 0)) for q in QUERY_SYMBOLS}

        if sum(self.probs.values()) != 1 or any(p < 0 or p > 1 for p in self.probs.values()):
            raise ValueError('Not a distribution over queries: %s' % self)

    def __getitem__(self, q):
        return self.probs[q]

    def __eq__(self, other):
        return isinstance(other, EncoderDistribution) and self.probs == other.probs

    def __repr__(self):
        return 'EncoderDistribution(%s)' % ', '.join(
            '%s: %s' % (symbol_name(q), self.probs[q]) for q in QUERY_SYMBOLS if self.probs[q]
        )

    def support(self):
        return [q for q in QUERY_SYMBOLS if self.probs[q] > 0]

    def expected_size(self):
        return sum(p * len(q) for q, p in self.probs.items())


class PrivacyPattern(object):
    """
    Sequence of privacy modes F_0..F_T. Times beyond the given flags are treated as OFF.
    """

    def __init__(self, flags):
        """
        Initialization

        :param flags: sequence of 'ON'/'OFF'; the first must be 'ON'
        """
        self.flags = tuple(flags)
        if not self.flags or self.flags[0] != ON:
            raise PatternFormatError('Privacy pattern must start with ON, got %s' % (self.flags,))
        if any(flag not in (ON, OFF) for flag in self.flags):
            raise PatternFormatError('Privacy modes must be ON or OFF, got %s' % (self.flags,))

    @staticmethod
    def parse(text):
        """
        Parses comma separated modes, e.g. "ON,OFF,OFF"

        :param text: pattern text
        """
        return PrivacyPattern(token.strip().upper() for token in text.split(',') if token.strip())

    def __len__(self):
        return len(self.flags)

    def __eq__(self, other):
        return isinstance(other, PrivacyPattern) and self.flags == other.flags

    def __hash__(self):
        return hash(self.flags)

    def __str__(self):
        return ','.join(self.flags)

    def __repr__(self):
        return 'PrivacyPattern(%s)' % self

    def flag(self, t):
        if t < len(self.flags):
            return self.flags[t]
        return OFF

    def is_on(self, t):
        return self.flag(t) == ON

    def last_on(self, t):
        """
        F-(t): latest time i <= t with privacy ON
        """
        for i in range(min(t, len(self.flags) - 1), -1, -1):
            if self.flags[i] == ON:
                return i
        return 0

    def gap(self, t):
        return t - self.last_on(t)

    def on_times(self, t):
        """
        All times i <= t with privacy ON
        """
        return [i for i in range(t + 1) if self.is_on(i)]


def bridge_table(matrix, gap):
    """
    Bridge distributions for all contexts that can occur at this gap

    :param matrix: object of class :class:`~onoffprivacy.markov.TransitionMatrix`
    :param gap: t - F-(t)
    """
    return {u: bridge(matrix, gap, u).probs for u in CONTEXTS if gap == 0 or context_possible(matrix, gap, u)}


@functools.lru_cache(maxsize=256)
def pi_floor(matrix, gap):
    """
    pi(x) := min over u of p(x|u), per source. Only contexts that can occur are considered. If some context is
    impossible (matrices with zero entries), pi is floored at 0 for every source, which forces the full download.

    :param matrix: object of class :class:`~onoffprivacy.markov.TransitionMatrix`
    :param gap: t - F-(t)
    """
    table = bridge_table(matrix, gap)
    if len(table) < len(CONTEXTS):
        logger.debug('Impossible contexts at gap %d for %r, flooring pi at 0' % (gap, matrix))
        return PiFloor(Fraction(0), Fraction(0), gap)

    return PiFloor(min(row[SOURCE_A] for row in table.values()),
                   min(row[SOURCE_B] for row in table.values()),
                   gap)


def pi_of(floor, x):
    return floor.pi_a if x == SOURCE_A else floor.pi_b


def optimal_inverse_rate(matrix, gap):
    """
    1/R_t = 2 - pi(A) - pi(B), the smallest expected number of downloaded messages at this gap
    """
    floor = pi_floor(matrix, gap)
    return 2 - floor.pi_a - floor.pi_b


def rate(matrix, gap):
    return 1 / optimal_inverse_rate(matrix, gap)


def symmetric_inverse_rate(alpha):
    """
    Closed form of the inverse rate one step after an ON time for the symmetric chain with switching
    probability alpha: 2 - 2 alpha^2 / (alpha^2 + (1 - alpha)^2)
    """
    alpha = Fraction(alpha)
    return 2 - 2 * alpha ** 2 / (alpha ** 2 + (1 - alpha) ** 2)


def encoder(matrix, gap, x, u):
    """
    Query encoding function w(q|x,u): the singleton {x} with probability pi(x)/p(x|u), otherwise both messages.
    The complementary singleton is never sent.

    :param matrix: object of class :class:`~onoffprivacy.markov.TransitionMatrix`
    :param gap: t - F-(t)
    :param x: current request
    :param u: object of class :class:`~onoffprivacy.markov.UContext`
    """
    try:
        p_x = bridge(matrix, gap, u).probs[x]
    except DegenerateContext as e:
        raise ImpossibleContext(str(e))

    if p_x == 0:
        raise ImpossibleContext('Request %s is impossible in context %s at gap %d' % (x, tuple(u), gap))

    ratio = pi_of(pi_floor(matrix, gap), x) / p_x
    return EncoderDistribution({singleton(x): ratio, QUERY_AB: 1 - ratio})


def query_marginal(matrix, gap):
    """
    Marginal law of the query: p({x}) = pi(x) and p({A,B}) = 1 - pi(A) - pi(B). It does not depend on the
    context, which is what makes the scheme private.
    """
    floor = pi_floor(matrix, gap)
    return {QUERY_A: floor.pi_a, QUERY_B: floor.pi_b, QUERY_AB: 1 - floor.pi_a - floor.pi_b}


def context_prior(matrix, gap, last_on=None):
    """
    p(u_t) for all contexts, from the law of X_{F-(t)} and M^(gap+1)

    :param matrix: object of class :class:`~onoffprivacy.markov.TransitionMatrix`
    :param gap: t - F-(t)
    :param last_on: law of X_{F-(t)}; uniform if not given
    """
    if last_on is None:
        last_on = uniform()
    return {u: last_on[u.last_on] * step_probability(matrix, gap + 1, u.last_on, u.next) for u in CONTEXTS}


def sample_query(dist, draw):
    """
    Inverse-CDF sampling over the fixed symbol order {A} < {B} < {A,B}

    :param dist: object of class :class:`EncoderDistribution`
    :param draw: uniform draw in [0, 1)
    """
    cumulative = Fraction(0)
    for q in QUERY_SYMBOLS:
        cumulative += dist.probs[q]
        if dist.probs[q] > 0 and draw < cumulative:
            return q
    # draw rounding to 1.0
    return dist.support()[-1]


def plan_rate_profile(matrix, pattern):
    """
    Optimal inverse rate for every time of the pattern, using the gap t - F-(t) at each time

    :param matrix: object of class :class:`~onoffprivacy.markov.TransitionMatrix`
    :param pattern: object of class :class:`PrivacyPattern`
    """
    return [optimal_inverse_rate(matrix, pattern.gap(t)) for t in range(len(pattern))]
