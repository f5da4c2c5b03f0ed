import io
import logging
import random
import socket
import unittest
from fractions import Fraction

from onoffprivacy.markov import symmetric
from onoffprivacy.netproto.client import RetrievalAgent, fetch
from onoffprivacy.netproto.frame import BadKind, BadLength, BadMagic, BadQueryMask, BadVersion, Frame, HEADER, \
    KIND_ANSWER, KIND_ERROR, KIND_QUERY, MAGIC, TruncatedFrame, UnexpectedKind, VERSION, answer_frame, \
    decode_frame, encode_frame, error_frame, query_frame, read_frame, write_frame
from onoffprivacy.netproto.server import serve
from onoffprivacy.scheme import PrivacyPattern, QUERY_A, QUERY_AB, QUERY_B, QUERY_SYMBOLS
from onoffprivacy.simulator import SessionConfig, run_session


class FrameTest(unittest.TestCase):

    def test_query_frame_layout(self):
        self.assertEqual(encode_frame(query_frame(5, QUERY_AB)).hex().upper(),
                         '4F500101' + '0000000000000005' + '00000001' + '03')

    def test_answer_round_trip(self):
        frame = answer_frame(9, bytes(range(16)))
        self.assertEqual(decode_frame(encode_frame(frame)), frame)

    def test_random_frames_round_trip(self):
        rng = random.Random(4791)
        for _ in range(10000):
            kind = rng.choice([KIND_QUERY, KIND_ANSWER, KIND_ERROR])
            t = rng.randrange(2 ** 64)
            if kind == KIND_QUERY:
                frame = query_frame(t, rng.choice(QUERY_SYMBOLS))
            elif kind == KIND_ANSWER:
                frame = answer_frame(t, bytes(rng.randrange(256) for _ in range(rng.randrange(0, 40))))
            else:
                frame = error_frame(t, rng.randrange(8))
            self.assertEqual(decode_frame(encode_frame(frame)), frame)

    def test_bad_magic(self):
        data = b'XX' + encode_frame(query_frame(0, QUERY_A))[2:]
        with self.assertRaises(BadMagic):
            decode_frame(data)

    def test_bad_version(self):
        data = HEADER.pack(MAGIC, VERSION + 1, KIND_QUERY, 0, 1) + b'\x01'
        with self.assertRaises(BadVersion):
            decode_frame(data)

    def test_bad_kind(self):
        data = HEADER.pack(MAGIC, VERSION, 9, 0, 0)
        with self.assertRaises(BadKind):
            decode_frame(data)
        with self.assertRaises(BadKind):
            encode_frame(Frame(9, 0, b''))

    def test_empty_query_mask(self):
        data = HEADER.pack(MAGIC, VERSION, KIND_QUERY, 0, 1) + b'\x00'
        with self.assertRaises(BadQueryMask):
            decode_frame(data)

    def test_truncated_frames(self):
        data = encode_frame(answer_frame(1, b'abcdef'))
        with self.assertRaises(TruncatedFrame):
            decode_frame(data[:10])
        with self.assertRaises(TruncatedFrame):
            decode_frame(data[:-1])
        with self.assertRaises(TruncatedFrame):
            read_frame(io.BytesIO(data[:-2]))

    def test_body_longer_than_length_field(self):
        with self.assertRaises(BadLength):
            decode_frame(encode_frame(answer_frame(1, b'abc')) + b'd')

    def test_oversized_query_is_rejected_before_body(self):
        stream = io.BytesIO(HEADER.pack(MAGIC, VERSION, KIND_QUERY, 9, 2 ** 32 - 1) + b'\x01')
        with self.assertRaises(BadQueryMask) as cm:
            read_frame(stream)
        self.assertEqual(cm.exception.time, 9)
        self.assertEqual(stream.tell(), HEADER.size)

    def test_read_frames_from_stream(self):
        stream = io.BytesIO()
        write_frame(stream, query_frame(0, QUERY_B))
        write_frame(stream, answer_frame(0, b'payload'))
        stream.seek(0)

        self.assertEqual(read_frame(stream), query_frame(0, QUERY_B))
        self.assertEqual(read_frame(stream), answer_frame(0, b'payload'))
        self.assertIsNone(read_frame(stream))


class RetrievalServerTest(unittest.TestCase):

    def setUp(self):
        self.server = serve(('127.0.0.1', 0), 64, 17)
        self.address = self.server.server_address[:2]

    def tearDown(self):
        self.server.shutdown()
        self.server.server_close()

    def test_answer_sizes(self):
        agent = RetrievalAgent(logging.getLogger('netproto'), self.address)
        try:
            self.assertEqual(len(agent.query(0, QUERY_A)), 8)
            self.assertEqual(len(agent.query(1, QUERY_B)), 8)
            self.assertEqual(len(agent.query(2, QUERY_AB)), 16)
        finally:
            agent.close()

    def test_same_time_same_messages(self):
        agent = RetrievalAgent(logging.getLogger('netproto'), self.address)
        try:
            both = agent.query(3, QUERY_AB)
            self.assertEqual(agent.query(3, QUERY_A), both[:8])
            self.assertEqual(agent.query(3, QUERY_B), both[8:])
        finally:
            agent.close()

    def test_protocol_error_is_answered(self):
        sock = socket.create_connection(self.address, timeout=10)
        stream = sock.makefile('rwb')
        try:
            stream.write(HEADER.pack(MAGIC, VERSION, KIND_QUERY, 4, 1) + b'\x00')
            stream.flush()
            frame = read_frame(stream)
            self.assertEqual(frame, error_frame(4, BadQueryMask.code))
            self.assertIsNone(read_frame(stream))
        finally:
            stream.close()
            sock.close()

    def test_oversized_query_is_answered_with_error(self):
        sock = socket.create_connection(self.address, timeout=10)
        stream = sock.makefile('rwb')
        try:
            stream.write(HEADER.pack(MAGIC, VERSION, KIND_QUERY, 6, 2 ** 32 - 1))
            stream.flush()
            self.assertEqual(read_frame(stream), error_frame(6, BadQueryMask.code))
        finally:
            stream.close()
            sock.close()

    def test_answer_frames_are_rejected(self):
        sock = socket.create_connection(self.address, timeout=10)
        stream = sock.makefile('rwb')
        try:
            write_frame(stream, answer_frame(2, b'abc'))
            self.assertEqual(read_frame(stream), error_frame(2, UnexpectedKind.code))
        finally:
            stream.close()
            sock.close()

    def test_live_session_matches_simulator(self):
        cfg = SessionConfig(symmetric(Fraction(1, 4)), PrivacyPattern.parse('ON,OFF,OFF,ON,OFF'), 4,
                            message_bits=64, trials=40, seed=5, keep_transcripts=True)
        remote = fetch(self.address, cfg)
        local = run_session(cfg)

        self.assertEqual(remote.transcripts, local.transcripts)
        self.assertEqual(remote.per_t_bytes, local.per_t_bytes)
        self.assertEqual(remote.query_histogram, local.query_histogram)
        self.assertEqual(remote.decode_failures, 0)

    def test_message_length_mismatch_is_a_decode_failure(self):
        cfg = SessionConfig(symmetric(Fraction(1, 4)), PrivacyPattern.parse('ON,OFF'), 1, message_bits=128,
                            trials=3, seed=5)
        self.assertEqual(fetch(self.address, cfg).decode_failures, 6)
