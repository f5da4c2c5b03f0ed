import logging
from fractions import Fraction

from onoffprivacy.markov import CONTEXTS, SOURCES, SOURCE_A
from onoffprivacy.scheme import QUERY_AB, QUERY_SYMBOLS, bridge_table, context_prior, pi_floor, singleton

logger = logging.getLogger('scheme')

GRID_PINNED = 'pinned'
GRID_INTERIOR = 'interior'
GRID_UNIT = 'unit'
GRIDS = (GRID_PINNED, GRID_INTERIOR, GRID_UNIT)


class Infeasible(Exception):
    """
    Exception that is thrown if (z1, z2) does not give a valid joint distribution p(u, x, q)
    """
    pass


class ConverseInstance(object):
    """
    One-step relaxation of the retrieval problem: every joint p(u, x, q) that is decodable and satisfies
    p(q|u) = p(q) is fixed by z1 = P(Q={A}|u) and z2 = P(Q={B}|u).
    """

    def __init__(self, matrix, gap, z1=0, z2=0, last_on=None):
        """
        Initialization

        :param matrix: object of class :class:`~onoffprivacy.markov.TransitionMatrix`
        :param gap: t - F-(t)
        :param z1: probability of querying {A} in every context
        :param z2: probability of querying {B} in every context
        :param last_on: law of X_{F-(t)}; uniform if not given
        """
        self.matrix = matrix
        self.gap = gap
        self.context_prior = context_prior(matrix, gap, last_on)
        self.bridge_table = bridge_table(matrix, gap)
        self.z1 = Fraction(z1)
        self.z2 = Fraction(z2)

    def at(self, z1, z2):
        """
        Same instance at another point (z1, z2)
        """
        other = object.__new__(ConverseInstance)
        other.__dict__.update(self.__dict__)
        other.z1 = Fraction(z1)
        other.z2 = Fraction(z2)
        return other

    def joint(self):
        """
        Builds the table p(u, x, q) for all 4 x 2 x 3 cells

        :raises Infeasible: if a cell is negative
        """
        if self.z1 < 0 or self.z2 < 0:
            raise Infeasible('z1=%s and z2=%s must be non-negative' % (self.z1, self.z2))

        cells = {}
        for u in CONTEXTS:
            p_u = self.context_prior[u]
            for x in SOURCES:
                z = self.z1 if x == SOURCE_A else self.z2
                for q in QUERY_SYMBOLS:
                    cells[(u, x, q)] = Fraction(0)
                if p_u == 0:
                    continue

                cells[(u, x, singleton(x))] = z * p_u
                cells[(u, x, QUERY_AB)] = p_u * (self.bridge_table[u][x] - z)
                if cells[(u, x, QUERY_AB)] < 0:
                    raise Infeasible('z=%s exceeds p(%s|%s)=%s' % (z, x, tuple(u), self.bridge_table[u][x]))
        return cells

    def expected_size(self):
        return sum(mass * len(q) for (u, x, q), mass in self.joint().items())


def feasible_table(matrix, gap, z1, z2, last_on=None):
    """
    Joint p(u, x, q) parameterized by (z1, z2)

    :param matrix: object of class :class:`~onoffprivacy.markov.TransitionMatrix`
    :param gap: t - F-(t)
    :param z1: P(Q={A}|u), equal for every context
    :param z2: P(Q={B}|u), equal for every context
    :param last_on: law of X_{F-(t)}; uniform if not given
    """
    return ConverseInstance(matrix, gap, z1, z2, last_on).joint()


def lp_minimize(matrix, gap):
    """
    Minimizes E[|Q_t|] = 2 - z1 - z2 over the box 0 <= z1 <= pi(A), 0 <= z2 <= pi(B). The objective decreases in
    both variables, so the optimum is the upper corner.

    :return: tuple (z1*, z2*, optimum)
    """
    floor = pi_floor(matrix, gap)
    return floor.pi_a, floor.pi_b, 2 - floor.pi_a - floor.pi_b


def grid_points(upper, grid_n, grid):
    """
    Values a grid takes along one axis

    :param upper: pi for this axis (the box corner)
    :param grid_n: number of points per axis
    :param grid: 'pinned' (endpoints 0 and upper), 'interior' (strictly between them) or 'unit' (over [0, 1])
    """
    if grid == GRID_PINNED:
        return [upper * i / (grid_n - 1) for i in range(grid_n)]
    if grid == GRID_INTERIOR:
        return [upper * (i + 1) / (grid_n + 1) for i in range(grid_n)]
    if grid == GRID_UNIT:
        return [Fraction(i, grid_n - 1) for i in range(grid_n)]
    raise ValueError('Unknown grid %s' % grid)


def brute_force_min(matrix, gap, grid_n, grid=GRID_PINNED):
    """
    Searches a grid_n x grid_n grid of (z1, z2) for the smallest expected download among the points where the
    joint table is valid. The objective is evaluated from the table itself.

    :param matrix: object of class :class:`~onoffprivacy.markov.TransitionMatrix`
    :param gap: t - F-(t)
    :param grid_n: points per axis, at least 2
    :param grid: grid type, see :func:`grid_points`
    :return: the smallest objective found, as :class:`fractions.Fraction`
    """
    if grid_n < 2:
        raise ValueError('Grid needs at least 2 points per axis, got %d' % grid_n)

    floor = pi_floor(matrix, gap)
    instance = ConverseInstance(matrix, gap)

    best = None
    infeasible = 0
    for z1 in grid_points(floor.pi_a, grid_n, grid):
        for z2 in grid_points(floor.pi_b, grid_n, grid):
            try:
                value = instance.at(z1, z2).expected_size()
            except Infeasible:
                infeasible += 1
                continue
            if best is None or value < best:
                best = value

    logger.debug('Brute force over %d %s points at gap %d: %d infeasible, best %s' %
                 (grid_n * grid_n, grid, gap, infeasible, best))
    if best is None:
        raise Infeasible('No feasible point on the %s grid' % grid)
    return best
