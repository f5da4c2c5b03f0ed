import logging

from onoffprivacy.commands.basecommand import BaseCommand
from onoffprivacy.commands.simulate import log_statistics, session_config
from onoffprivacy.encoders.baseencoder import BaseEncoder
from onoffprivacy.netproto.client import fetch
from onoffprivacy.simulator import report_rows

logger = logging.getLogger('main')


class FetchCommand(BaseCommand):
    """
    Runs the sessions against a retrieval server and reports like the simulate command
    """
    columns = ('t', 'gap', 'theory_inverse_rate', 'empirical_inverse_rate', 'stderr', 'trials')

    @property
    def identifier(self):
        return 'fetch'

    def process(self):
        logger.setLevel(self.debug_level)
        session_cfg = session_config(self.config)
        encoder = BaseEncoder.find_fitting_encoder(self.config.encoder)

        stats = fetch(self.config.get_address(), session_cfg, encoder)
        self.write_rows(report_rows(session_cfg, stats))
        log_statistics(session_cfg, stats, encoder)
        return 1 if stats.decode_failures else 0
