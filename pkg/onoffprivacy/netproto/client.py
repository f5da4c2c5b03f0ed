import logging
import socket

from onoffprivacy.netproto.frame import ERRORS_BY_CODE, KIND_ANSWER, KIND_ERROR, ProtocolError, TruncatedFrame, \
    UnexpectedKind, query_frame, read_frame, write_frame
from onoffprivacy.simulator import run_session

logger = logging.getLogger('netproto')


class RetrievalAgent(object):
    """
    Class that is used to talk to a retrieval server over one connection
    """

    def __init__(self, logger, address, timeout=30):
        """
        Initialization. Opens the connection.

        :param logger: logger that can be used (see: :mod:`logging`)
        :param address: (host, port) of the server
        :param timeout: socket timeout in seconds
        """
        self.logger = logger
        self.address = address
        self.sock = socket.create_connection(address, timeout=timeout)
        self.stream = self.sock.makefile('rwb')

    def query(self, t, q):
        """
        Sends the query for time t and returns the answer payload

        :param t: time
        :param q: query symbol
        """
        write_frame(self.stream, query_frame(t, q))
        frame = read_frame(self.stream)

        if frame is None:
            raise TruncatedFrame('Server closed the connection before answering t=%d' % t)
        if frame.kind == KIND_ERROR:
            code = frame.body[0] if frame.body else 0
            raise ERRORS_BY_CODE.get(code, ProtocolError)('Server answered t=%d with error code %d' % (t, code))
        if frame.kind != KIND_ANSWER or frame.time != t:
            raise UnexpectedKind('Expected ANSWER for t=%d, got kind %d for t=%d' % (t, frame.kind, frame.time))

        self.logger.debug('Got %d answer bytes for t=%d' % (len(frame.body), t))
        return frame.body

    def close(self):
        try:
            self.stream.close()
        finally:
            self.sock.close()


class RemoteExchange(object):
    """
    Server side of one trial, reached over the network. The stored messages are not known to the client, so only
    the answer length can be checked after decoding.
    """

    def __init__(self, address):
        self.agent = RetrievalAgent(logger, address)

    def retrieve(self, t, q):
        return self.agent.query(t, q)

    def expected(self, t, x):
        return None

    def close(self):
        self.agent.close()


def fetch(address, cfg, encoder=None):
    """
    Runs the sessions of cfg against a live server, one connection per trial. Requests and queries are drawn
    exactly as in :func:`~onoffprivacy.simulator.run_session`, so the same seed gives the same queries.

    :param address: (host, port) of the server
    :param cfg: object of class :class:`~onoffprivacy.simulator.SessionConfig`
    :param encoder: query encoder, the optimal one if not given
    """
    logger.info('Fetching %d sessions from %s:%d' % ((cfg.trials,) + tuple(address)))
    return run_session(cfg, encoder, exchange_factory=lambda session_cfg, trial: RemoteExchange(address))
