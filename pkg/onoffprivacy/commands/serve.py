import logging

from onoffprivacy.commands.basecommand import BaseCommand
from onoffprivacy.netproto.server import serve

logger = logging.getLogger('main')


class ServeCommand(BaseCommand):
    """
    Runs the retrieval server until interrupted
    """

    @property
    def identifier(self):
        return 'serve'

    def process(self):
        logger.setLevel(self.debug_level)
        server = serve(self.config.get_address(), self.config.bits, self.config.seed)
        try:
            while server.thread.is_alive():
                server.thread.join(0.5)
        except KeyboardInterrupt:
            logger.info('Interrupted, shutting down the server')
        finally:
            server.shutdown()
            server.server_close()
        return 0
