import logging

from onoffprivacy.commands.basecommand import BaseCommand
from onoffprivacy.encoders.baseencoder import BaseEncoder
from onoffprivacy.simulator import SessionConfig, empirical_leakage, goodness_of_fit, report_rows, run_session

logger = logging.getLogger('main')


def session_config(cfg):
    """
    Builds the session parameters from the command line configuration

    :param cfg: object of class :class:`~onoffprivacy.config.Config`
    """
    return SessionConfig(cfg.matrix, cfg.pattern, cfg.horizon, message_bits=cfg.bits, trials=cfg.trials,
                         seed=cfg.seed, initial=cfg.initial, keep_transcripts=True, trace=cfg.trace)


class SimulateCommand(BaseCommand):
    """
    Runs the sessions in-process and reports the empirical download per time step
    """
    columns = ('t', 'gap', 'theory_inverse_rate', 'empirical_inverse_rate', 'stderr', 'trials')

    @property
    def identifier(self):
        return 'simulate'

    def process(self):
        logger.setLevel(self.debug_level)
        session_cfg = session_config(self.config)
        encoder = BaseEncoder.find_fitting_encoder(self.config.encoder)

        stats = run_session(session_cfg, encoder)
        self.write_rows(report_rows(session_cfg, stats))
        log_statistics(session_cfg, stats, encoder)
        return 1 if stats.decode_failures else 0


def log_statistics(session_cfg, stats, encoder):
    """
    Logs the chi-square p-value of the query histogram and the plug-in leakage for every time step
    """
    for t in range(session_cfg.horizon + 1):
        p_value = goodness_of_fit(stats, session_cfg.matrix, session_cfg.pattern, t)
        leakage = empirical_leakage(session_cfg, t, encoder, stats)
        logger.info('t=%d: chi-square p-value %0.4f against the optimal marginal, empirical leakage %0.6f bits' %
                    (t, p_value, leakage))
