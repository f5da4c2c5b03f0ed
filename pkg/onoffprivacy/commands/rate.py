import logging
from fractions import Fraction

from onoffprivacy.commands.basecommand import BaseCommand
from onoffprivacy.markov import symmetric
from onoffprivacy.scheme import symmetric_inverse_rate, optimal_inverse_rate, pi_floor

logger = logging.getLogger('main')


class RateCommand(BaseCommand):
    """
    Writes the optimal download cost per gap. Three modes, checked in this order:

    1. --alpha-steps n: symmetric chains with alpha = 0, 1/(2n), ..., 1/2 at every requested gap

    2. --gap / --gap-max: the configured matrix at the requested gaps

    3. otherwise: one row per time of the configured pattern
    """
    columns = ('alpha_or_matrix', 'gap', 'pi_a', 'pi_b', 'inverse_rate')

    @property
    def identifier(self):
        return 'rate'

    def process(self):
        logger.setLevel(self.debug_level)
        cfg = self.config

        if cfg.alpha_steps is not None:
            rows = self._alpha_sweep(cfg.alpha_steps, cfg.get_gaps())
        elif cfg.gap is not None or cfg.gap_max is not None:
            rows = [self._row(cfg.matrix_label, cfg.matrix, gap) for gap in cfg.get_gaps()]
        else:
            self.columns = ('t',) + RateCommand.columns
            rows = []
            for t in range(len(cfg.pattern)):
                row = self._row(cfg.matrix_label, cfg.matrix, cfg.pattern.gap(t))
                row['t'] = t
                rows.append(row)

        self.write_rows(rows)
        return 0

    def _alpha_sweep(self, steps, gaps):
        rows = []
        for i in range(steps + 1):
            alpha = Fraction(i, 2 * steps)
            matrix = symmetric(alpha)
            for gap in gaps:
                row = self._row('alpha=%s' % alpha, matrix, gap)
                if gap == 1 and row['inverse_rate'] != symmetric_inverse_rate(alpha):
                    logger.error('Inverse rate %s at alpha=%s differs from the closed form %s' %
                                 (row['inverse_rate'], alpha, symmetric_inverse_rate(alpha)))
                rows.append(row)
        return rows

    @staticmethod
    def _row(label, matrix, gap):
        floor = pi_floor(matrix, gap)
        return {
            'alpha_or_matrix': label,
            'gap': gap,
            'pi_a': floor.pi_a,
            'pi_b': floor.pi_b,
            'inverse_rate': optimal_inverse_rate(matrix, gap),
        }
