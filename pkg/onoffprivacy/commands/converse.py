import logging

from onoffprivacy.commands.basecommand import BaseCommand
from onoffprivacy.converse import brute_force_min, lp_minimize

logger = logging.getLogger('main')


class ConverseCommand(BaseCommand):
    """
    Compares the closed-form optimum of the one-step relaxation with a grid search over (z1, z2)
    """
    columns = ('matrix', 'gap', 'pi_a', 'pi_b', 'z1_star', 'z2_star', 'optimum', 'brute_force_optimum', 'grid_n')

    @property
    def identifier(self):
        return 'converse'

    def process(self):
        logger.setLevel(self.debug_level)
        cfg = self.config

        rows = []
        mismatches = 0
        for gap in cfg.get_gaps():
            z1, z2, optimum = lp_minimize(cfg.matrix, gap)
            brute_force = brute_force_min(cfg.matrix, gap, cfg.grid_n, cfg.grid)
            if brute_force < optimum:
                logger.error('Grid point below the optimum at gap %d: %s < %s' % (gap, brute_force, optimum))
                mismatches += 1

            rows.append({
                'matrix': cfg.matrix_label,
                'gap': gap,
                'pi_a': z1,
                'pi_b': z2,
                'z1_star': z1,
                'z2_star': z2,
                'optimum': optimum,
                'brute_force_optimum': brute_force,
                'grid_n': cfg.grid_n,
            })

        self.write_rows(rows)
        return 1 if mismatches else 0
