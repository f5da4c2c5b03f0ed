import logging

from onoffprivacy.commands.basecommand import BaseCommand
from onoffprivacy.encoders.baseencoder import BaseEncoder
from onoffprivacy.markov import initial_distribution
from onoffprivacy.verifier import acceptance_grid, all_patterns, verify

logger = logging.getLogger('main')

#: Longest pattern enumerated by the sweep
SWEEP_PATTERN_LENGTH = 6


class VerifyCommand(BaseCommand):
    """
    Runs the exact checks and exits with status 1 if any of them fails. Without --sweep the configured matrix and
    pattern are checked for t = 0..t-max; with --sweep every matrix of the acceptance grid is checked against every
    pattern of length up to 6, for all t below the pattern length.
    """
    columns = ('matrix', 'pattern', 't', 'gap', 'expected_cost', 'theorem_cost', 'factorizes', 'I1', 'I2', 'I3')

    @property
    def identifier(self):
        return 'verify'

    def process(self):
        logger.setLevel(self.debug_level)
        cfg = self.config
        encoder = BaseEncoder.find_fitting_encoder(cfg.encoder)

        if cfg.sweep:
            cases = [(matrix, pattern, t) for matrix in acceptance_grid()
                     for pattern in all_patterns(SWEEP_PATTERN_LENGTH) for t in range(len(pattern))]
        else:
            cases = [(cfg.matrix, cfg.pattern, t) for t in range(cfg.t_max + 1)]

        rows = []
        failures = 0
        for matrix, pattern, t in cases:
            row, passed = verify(matrix, pattern, t, initial_distribution(matrix, cfg.initial_name), encoder)
            rows.append(row)
            if not passed:
                failures += 1

        self.write_rows(rows)
        logger.info('Verified %d cases with encoder %s, %d failed' % (len(cases), encoder.identifier, failures))
        return 1 if failures else 0
