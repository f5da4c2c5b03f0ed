import logging

from onoffprivacy.markov import DegenerateContext, MatrixFormatError, NotStochastic, initial_distribution, \
    parse_matrix
from onoffprivacy.scheme import PatternFormatError, PrivacyPattern
from onoffprivacy.verifier import MAX_HORIZON

DEFAULT_ALPHA = '1/4'
DEFAULT_PATTERN = 'ON,OFF'


class ConfigValidationException(Exception):
    """
    Exception that is thrown if the config of class :class:`~onoffprivacy.config.Config` could not be validated
    """
    pass


class Config(object):
    """
    Config object, that holds all configuration parameters
    """
    def __init__(self, args):
        """
        Initialization

        :param args: argumentparser of the class :class:`argparse.ArgumentParser`
        """
        self.identifier = args.command
        self.debug = args.debug
        self.matrix_text = args.matrix
        self.alpha = args.alpha
        self.pattern_text = args.pattern or DEFAULT_PATTERN
        self.gap = args.gap
        self.gap_max = args.gap_max
        self.alpha_steps = args.alpha_steps
        self.t_max = args.t_max
        self.horizon = args.horizon
        self.trials = args.trials
        self.seed = args.seed
        self.bits = args.bits
        self.grid_n = args.grid_n
        self.grid = args.grid
        self.initial_name = args.initial
        self.encoder = args.encoder
        self.host = args.host
        self.port = args.port
        self.sweep = args.sweep
        self.float_columns = args.float
        self.trace = args.trace
        self.out = args.out

        self._validate_config()

    def _validate_config(self):
        """
        Validates the config and parses the matrix and the pattern

        1. Either matrix or alpha may be set, but not both (alpha 1/4 if none is set)

        2. Matrix and pattern must parse

        3. Counts must be in range: t-max <= 8, horizon >= 1, trials >= 1, grid-n >= 2, bits a positive
        multiple of 8, non-negative gaps and seed
        """
        if self.matrix_text is not None and self.alpha is not None:
            raise ConfigValidationException('Either matrix or alpha can be set, but not both.')

        if self.matrix_text is not None:
            self.matrix_label = self.matrix_text.strip()
        else:
            self.matrix_label = 'alpha=%s' % (self.alpha if self.alpha is not None else DEFAULT_ALPHA)

        try:
            self.matrix = parse_matrix(self.matrix_label)
        except (MatrixFormatError, NotStochastic) as e:
            raise ConfigValidationException('Invalid matrix: %s' % e)

        try:
            self.pattern = PrivacyPattern.parse(self.pattern_text)
        except PatternFormatError as e:
            raise ConfigValidationException('Invalid pattern: %s' % e)

        if self.horizon is None:
            self.horizon = max(1, len(self.pattern) - 1)
        if self.t_max is None:
            self.t_max = len(self.pattern) - 1

        if not 0 <= self.t_max <= MAX_HORIZON:
            raise ConfigValidationException('t-max must be between 0 and %d.' % MAX_HORIZON)
        if self.horizon < 1:
            raise ConfigValidationException('Horizon must be at least 1.')
        if self.trials < 1:
            raise ConfigValidationException('At least one trial must be run.')
        if self.grid_n < 2:
            raise ConfigValidationException('Grid needs at least 2 points per axis.')
        if self.bits <= 0 or self.bits % 8:
            raise ConfigValidationException('Message length must be a positive multiple of 8 bits.')
        if self.seed < 0:
            raise ConfigValidationException('Seed must be non-negative.')
        if (self.gap is not None and self.gap < 0) or (self.gap_max is not None and self.gap_max < 0):
            raise ConfigValidationException('Gaps must be non-negative.')
        if self.alpha_steps is not None and self.alpha_steps < 1:
            raise ConfigValidationException('Alpha sweep needs at least one step.')
        if not 0 <= self.port <= 65535:
            raise ConfigValidationException('Port must be between 0 and 65535.')

        try:
            self.initial = initial_distribution(self.matrix, self.initial_name)
        except DegenerateContext as e:
            raise ConfigValidationException('Invalid initial distribution: %s' % e)

    def get_debug_level(self):
        """
        Gets the correct debug level, based on :mod:`logging`
        """
        choices = {
            'DEBUG': logging.DEBUG,
            'INFO': logging.INFO,
            'WARNING': logging.WARNING,
            'ERROR': logging.ERROR,
            'CRITICAL': logging.CRITICAL
        }

        return choices[self.debug]

    def get_gaps(self):
        """
        Gaps to evaluate: the single --gap, the range 0..--gap-max, or 1 if neither is set
        """
        if self.gap is not None:
            return [self.gap]
        if self.gap_max is not None:
            return list(range(self.gap_max + 1))
        return [1]

    def get_address(self):
        return self.host, self.port

    def __str__(self):
        return "Config: identifier: %s, matrix: %s, pattern: %s, gap: %s, gap_max: %s, alpha_steps: %s, " \
               "t_max: %s, horizon: %s, trials: %s, seed: %s, bits: %s, grid_n: %s, grid: %s, initial: %s, " \
               "encoder: %s, host: %s, port: %s, sweep: %s, float: %s, trace: %s, out: %s" % \
               (
                   self.identifier,
                   self.matrix_label,
                   self.pattern,
                   self.gap,
                   self.gap_max,
                   self.alpha_steps,
                   self.t_max,
                   self.horizon,
                   self.trials,
                   self.seed,
                   self.bits,
                   self.grid_n,
                   self.grid,
                   self.initial_name,
                   self.encoder,
                   self.host,
                   self.port,
                   self.sweep,
                   self.float_columns,
                   self.trace,
                   self.out
               )
