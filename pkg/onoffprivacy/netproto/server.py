import logging
import socketserver
import threading

from onoffprivacy.netproto.frame import KIND_QUERY, ProtocolError, UnexpectedKind, answer_frame, error_frame, \
    read_frame, symbol_of_mask, write_frame
from onoffprivacy.scheme import symbol_name
from onoffprivacy.simulator import MessageStore, answer

logger = logging.getLogger('netproto')

DEFAULT_PORT = 4791


class RetrievalHandler(socketserver.StreamRequestHandler):
    """
    Serves one connection, i.e. one retrieval session. Messages are generated per time step on first use and
    kept for the lifetime of the connection only.
    """

    def handle(self):
        connection_id = self.server.next_connection_id()
        store = MessageStore((self.server.seed, connection_id, 2), self.server.message_bits)
        logger.debug('Connection %d from %s' % (connection_id, self.client_address))

        while True:
            t = 0
            try:
                frame = read_frame(self.rfile)
                if frame is None:
                    break
                t = frame.time
                if frame.kind != KIND_QUERY:
                    raise UnexpectedKind('Server only accepts QUERY frames, got kind %d' % frame.kind)

                q = symbol_of_mask(frame.body[0])
                write_frame(self.wfile, answer_frame(t, answer(q, store.messages(t))))
                logger.debug('Connection %d: answered %s at t=%d' % (connection_id, symbol_name(q), t))
            except ProtocolError as e:
                logger.warning('Connection %d: protocol error %d (%s)' % (connection_id, e.code, e))
                if e.time is not None:
                    t = e.time
                try:
                    write_frame(self.wfile, error_frame(t, e.code))
                except OSError:
                    pass
                break
            except OSError as e:
                logger.warning('Connection %d closed: %s' % (connection_id, e))
                break


class RetrievalServer(socketserver.ThreadingTCPServer):
    """
    Server that stores fresh messages of both sources and answers subset queries. It never learns which source
    the user wants.
    """
    allow_reuse_address = True
    daemon_threads = True

    def __init__(self, address, message_bits, seed):
        """
        Initialization

        :param address: (host, port) to bind to; port 0 picks a free port
        :param message_bits: L
        :param seed: seed of the message generator
        """
        super().__init__(address, RetrievalHandler)
        self.message_bits = message_bits
        self.seed = seed
        self.thread = None
        self._connections = 0
        self._lock = threading.Lock()

    def next_connection_id(self):
        with self._lock:
            self._connections += 1
            return self._connections


def serve(address, message_bits, seed):
    """
    Starts a retrieval server in a background thread

    :param address: (host, port) to bind to
    :param message_bits: L
    :param seed: seed of the message generator
    :return: the running :class:`RetrievalServer`; stop it with shutdown() and server_close()
    """
    server = RetrievalServer(address, message_bits, seed)
    server.thread = threading.Thread(target=server.serve_forever, daemon=True)
    server.thread.start()
    logger.info('Serving %d-bit messages on %s:%d' % ((message_bits,) + server.server_address[:2]))
    return server
