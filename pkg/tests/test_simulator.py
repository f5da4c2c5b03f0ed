import math
import unittest
from fractions import Fraction

import mock

from onoffprivacy.encoders.revealing import RevealingEncoder
from onoffprivacy.markov import SOURCE_A, SOURCE_B, symmetric
from onoffprivacy.scheme import PrivacyPattern, QUERY_A, QUERY_AB, QUERY_B
from onoffprivacy.simulator import MessageStore, NotDecodable, SessionConfig, SessionStats, answer, decode, \
    empirical_leakage, goodness_of_fit, report_rows, run_session


class SimulatorTest(unittest.TestCase):

    def setUp(self):
        self.quarter = symmetric(Fraction(1, 4))
        self.on_off = PrivacyPattern.parse('ON,OFF')
        self.messages = {SOURCE_A: b'\x01' * 8, SOURCE_B: b'\x02' * 8}

    def test_answer(self):
        self.assertEqual(answer(QUERY_A, self.messages), b'\x01' * 8)
        self.assertEqual(answer(QUERY_B, self.messages), b'\x02' * 8)
        self.assertEqual(answer(QUERY_AB, self.messages), b'\x01' * 8 + b'\x02' * 8)

    def test_decode(self):
        self.assertEqual(decode(answer(QUERY_AB, self.messages), QUERY_AB, SOURCE_B), b'\x02' * 8)
        self.assertEqual(decode(answer(QUERY_A, self.messages), QUERY_A, SOURCE_A), b'\x01' * 8)
        with self.assertRaises(NotDecodable):
            decode(answer(QUERY_A, self.messages), QUERY_A, SOURCE_B)

    def test_message_store_is_reproducible(self):
        first = MessageStore((7, 3, 1), 64)
        second = MessageStore((7, 3, 1), 64)
        later = second.messages(5)
        self.assertEqual(first.messages(0), second.messages(0))
        self.assertEqual(first.messages(5), later)
        self.assertEqual(len(later[SOURCE_A]), 8)
        self.assertNotEqual(later[SOURCE_A], later[SOURCE_B])
        self.assertNotEqual(MessageStore((7, 4, 1), 64).messages(5), later)

    def test_session_config_validation(self):
        with self.assertRaises(ValueError):
            SessionConfig(self.quarter, self.on_off, 1, trials=0)
        with self.assertRaises(ValueError):
            SessionConfig(self.quarter, self.on_off, 0)
        with self.assertRaises(ValueError):
            SessionConfig(self.quarter, self.on_off, 1, message_bits=12)

    def test_same_seed_same_stats(self):
        cfg = SessionConfig(self.quarter, PrivacyPattern.parse('ON,OFF,OFF'), 2, message_bits=64, trials=200, seed=3,
                            keep_transcripts=True)
        self.assertEqual(run_session(cfg), run_session(cfg))

    def test_other_seed_other_transcripts(self):
        first = SessionConfig(self.quarter, self.on_off, 1, message_bits=64, trials=200, seed=3, keep_transcripts=True)
        second = SessionConfig(self.quarter, self.on_off, 1, message_bits=64, trials=200, seed=4,
                               keep_transcripts=True)
        self.assertNotEqual(run_session(first).transcripts, run_session(second).transcripts)

    def test_half_switching_downloads_one_message(self):
        cfg = SessionConfig(symmetric(Fraction(1, 2)), self.on_off, 1, message_bits=64, trials=500)
        stats = run_session(cfg)
        self.assertEqual(stats.empirical_inverse_rate(0, 64), 2.0)
        self.assertEqual(stats.empirical_inverse_rate(1, 64), 1.0)
        self.assertEqual(stats.decode_failures, 0)

    def test_privacy_on_always_downloads_both(self):
        cfg = SessionConfig(self.quarter, PrivacyPattern.parse('ON,ON,OFF'), 2, message_bits=64, trials=300)
        stats = run_session(cfg)
        self.assertEqual(dict(stats.query_histogram[0]), {QUERY_AB: 300})
        self.assertEqual(dict(stats.query_histogram[1]), {QUERY_AB: 300})

    @mock.patch('onoffprivacy.simulator.LocalExchange.expected')
    def test_mismatching_payload_is_a_decode_failure(self, expected_mock):
        expected_mock.return_value = b'\xff' * 8
        cfg = SessionConfig(self.quarter, self.on_off, 1, message_bits=64, trials=10)
        self.assertEqual(run_session(cfg).decode_failures, 20)

    @mock.patch('onoffprivacy.simulator.LocalExchange.retrieve')
    def test_answer_of_wrong_length_is_a_decode_failure(self, retrieve_mock):
        retrieve_mock.side_effect = lambda t, q: b'\x00' * (8 * len(q) + 1)
        cfg = SessionConfig(self.quarter, self.on_off, 1, message_bits=64, trials=10)
        with self.assertLogs('scheme', level='ERROR'):
            stats = run_session(cfg)
        self.assertEqual(stats.decode_failures, 20)

    def test_trace_logs_every_trial(self):
        cfg = SessionConfig(self.quarter, self.on_off, 1, message_bits=64, trials=3, trace=True)
        with self.assertLogs('scheme', level='DEBUG') as cm:
            run_session(cfg)
        self.assertEqual(len([line for line in cm.output if 'requests' in line]), 3)

    def test_stats_merge(self):
        first = SessionStats(1)
        first.record(0, QUERY_AB, 16)
        first.record(1, QUERY_A, 8)
        second = SessionStats(1)
        second.record(1, QUERY_AB, 16)
        second.decode_failures = 1
        third = SessionStats(1)
        third.record(1, QUERY_B, 8)

        merged = first.merge(second)
        self.assertEqual(merged.per_t_bytes, [[16, 1], [24, 2]])
        self.assertEqual(merged.decode_failures, 1)
        self.assertEqual(merged.mean_size(1), 1.5)
        self.assertEqual(first.merge(second).merge(third), first.merge(second.merge(third)))

    def test_stderr(self):
        stats = SessionStats(0)
        stats.record(0, QUERY_A, 8)
        stats.record(0, QUERY_AB, 16)
        self.assertAlmostEqual(stats.stderr(0), math.sqrt(0.25 / 2))

    def test_leakage_is_zero_for_constant_queries(self):
        cfg = SessionConfig(self.quarter, self.on_off, 1, message_bits=64, trials=200)
        self.assertEqual(empirical_leakage(cfg, 0), 0.0)

    def test_revealing_encoder_leaks(self):
        cfg = SessionConfig(self.quarter, self.on_off, 1, message_bits=64, trials=20000, seed=11)
        leakage = empirical_leakage(cfg, 1, RevealingEncoder())
        self.assertGreater(leakage, 0.05)

    def test_leakage_needs_transcripts(self):
        cfg = SessionConfig(self.quarter, self.on_off, 1, message_bits=64, trials=5000, seed=11)
        stats = run_session(cfg, RevealingEncoder())
        self.assertEqual(stats.transcripts, [])
        with self.assertRaises(ValueError):
            empirical_leakage(cfg, 1, RevealingEncoder(), stats=stats)

        cfg.keep_transcripts = True
        stats = run_session(cfg, RevealingEncoder())
        self.assertGreater(empirical_leakage(cfg, 1, RevealingEncoder(), stats=stats), 0.05)

    def test_revealing_encoder_fails_goodness_of_fit(self):
        cfg = SessionConfig(self.quarter, self.on_off, 1, message_bits=64, trials=200)
        stats = run_session(cfg, RevealingEncoder())
        self.assertEqual(goodness_of_fit(stats, self.quarter, self.on_off, 0), 0.0)


class SimulatorAgreementTest(unittest.TestCase):
    """
    One large run of the optimal scheme (alpha = 1/4, ON then OFF), shared by the statistical checks
    """

    @classmethod
    def setUpClass(cls):
        cls.matrix = symmetric(Fraction(1, 4))
        cls.pattern = PrivacyPattern.parse('ON,OFF')
        cls.cfg = SessionConfig(cls.matrix, cls.pattern, 1, message_bits=64, trials=100000, seed=2024,
                                keep_transcripts=True)
        cls.stats = run_session(cls.cfg)

    def test_no_decode_failures(self):
        self.assertEqual(self.stats.decode_failures, 0)

    def test_mean_query_size(self):
        tolerance = 3 * math.sqrt(0.16 / 100000)
        self.assertAlmostEqual(self.stats.mean_size(1), 1.8, delta=tolerance)
        self.assertEqual(self.stats.mean_size(0), 2)

    def test_download_matches_query_size(self):
        self.assertAlmostEqual(self.stats.empirical_inverse_rate(1, 64), self.stats.mean_size(1))

    def test_query_histogram_fits_marginal(self):
        self.assertGreater(goodness_of_fit(self.stats, self.matrix, self.pattern, 1), 0.01)
        self.assertEqual(goodness_of_fit(self.stats, self.matrix, self.pattern, 0), 1.0)

    def test_leakage_is_small(self):
        self.assertLess(empirical_leakage(self.cfg, 1, stats=self.stats), 5e-4)

    def test_report_rows(self):
        rows = report_rows(self.cfg, self.stats)
        self.assertEqual([row['t'] for row in rows], [0, 1])
        self.assertEqual(rows[0]['theory_inverse_rate'], 2)
        self.assertEqual(rows[1]['theory_inverse_rate'], Fraction(9, 5))
        self.assertEqual(rows[1]['gap'], 1)
        self.assertEqual(rows[1]['trials'], 100000)
