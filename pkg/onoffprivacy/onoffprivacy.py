import logging
import timeit

from onoffprivacy.commands.basecommand import BaseCommand

logger = logging.getLogger("main")


class OnOffPrivacy(object):
    """
    Main application

    1. Finds the fitting command via :func:`~onoffprivacy.commands.basecommand.BaseCommand.find_fitting_command`

    2. Calls :func:`~onoffprivacy.commands.basecommand.BaseCommand.process` on the found command and returns its
    exit status
    """
    def __init__(self):
        pass

    def start(self, cfg):
        """
        Starts the command

        :param cfg: holds all configuration parameters. Object of class :class:`~onoffprivacy.config.Config`
        """
        logger.setLevel(cfg.get_debug_level())
        logging.getLogger('scheme').setLevel(cfg.get_debug_level())
        logging.getLogger('netproto').setLevel(cfg.get_debug_level())
        start_time = timeit.default_timer()

        command = BaseCommand.find_fitting_command(cfg)
        if command is None:
            logger.error('No command %s found' % cfg.identifier)
            return 1
        logger.debug("Using command: %s" % command.identifier)

        status = command.process()

        elapsed = timeit.default_timer() - start_time
        logger.info("Execution time: %0.5f s" % elapsed)
        return status
