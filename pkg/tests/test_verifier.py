import timeit
import unittest
from fractions import Fraction

from onoffprivacy.encoders.full import FullDownloadEncoder
from onoffprivacy.encoders.naive import NaiveEncoder
from onoffprivacy.encoders.revealing import RevealingEncoder
from onoffprivacy.markov import SOURCE_A, SOURCE_B, stationary, symmetric, uniform, validate_matrix
from onoffprivacy.scheme import QUERY_A, QUERY_AB, QUERY_B, PrivacyPattern, optimal_inverse_rate
from onoffprivacy.verifier import HorizonTooLarge, JointTable, MAX_HORIZON, acceptance_grid, all_patterns, \
    build_joint, check_decodability, check_privacy, expected_cost, privacy_set, proposition1_terms, verify


class VerifierTest(unittest.TestCase):

    def setUp(self):
        self.quarter = symmetric(Fraction(1, 4))
        self.asymmetric = validate_matrix([['1/2', '1/2'], ['1/4', '3/4']])
        self.on_off = PrivacyPattern.parse('ON,OFF')

    def test_privacy_set(self):
        self.assertEqual(privacy_set(PrivacyPattern.parse('ON,OFF,ON'), 2), (0, 2, 3))
        self.assertEqual(privacy_set(self.on_off, 1), (0, 2))

    def test_joint_table_is_distribution(self):
        j = build_joint(self.asymmetric, PrivacyPattern.parse('ON,OFF,OFF'), uniform(), 2)
        self.assertEqual(j.total(), 1)
        self.assertEqual(j.horizon, 2)

    def test_horizon_limit(self):
        with self.assertRaises(HorizonTooLarge):
            build_joint(self.quarter, self.on_off, uniform(), MAX_HORIZON + 1)
        with self.assertRaises(ValueError):
            build_joint(self.quarter, self.on_off, uniform(), -1)

    def test_check_privacy_needs_matching_horizon(self):
        j = build_joint(self.quarter, self.on_off, uniform(), 1)
        with self.assertRaises(ValueError):
            check_privacy(j, 0)

    def test_optimal_scheme_at_first_off_step(self):
        j = build_joint(self.quarter, self.on_off, uniform(), 1)
        report = check_privacy(j, 1)

        self.assertTrue(check_decodability(j))
        self.assertTrue(report.factorizes)
        self.assertEqual(report.max_abs_gap, 0)
        self.assertEqual(report.mi_bits, 0.0)
        self.assertEqual(expected_cost(j, 1), Fraction(9, 5))
        self.assertEqual(expected_cost(j, 0), 2)

    def test_induction_terms_vanish(self):
        for pattern in ('ON,OFF', 'ON,OFF,OFF', 'ON,ON,OFF', 'ON,OFF,ON,OFF'):
            pattern = PrivacyPattern.parse(pattern)
            for t in range(1, len(pattern)):
                self.assertEqual(proposition1_terms(self.asymmetric, pattern, t), (0.0, 0.0, 0.0))

    def test_induction_terms_need_positive_time(self):
        with self.assertRaises(ValueError):
            proposition1_terms(self.quarter, self.on_off, 0)

    def test_revealing_encoder_leaks(self):
        j = build_joint(self.quarter, self.on_off, uniform(), 1, RevealingEncoder())
        report = check_privacy(j, 1)

        self.assertTrue(check_decodability(j))
        self.assertFalse(report.factorizes)
        self.assertGreater(report.max_abs_gap, 0)
        self.assertGreater(report.mi_bits, 0.1)
        self.assertNotEqual(proposition1_terms(self.quarter, self.on_off, 1, encoder=RevealingEncoder()),
                            (0.0, 0.0, 0.0))

    def test_naive_encoder_leaks_after_privacy_is_switched_off(self):
        j = build_joint(self.quarter, self.on_off, uniform(), 1, NaiveEncoder())
        self.assertTrue(check_privacy(build_joint(self.quarter, self.on_off, uniform(), 0, NaiveEncoder()), 0)
                        .factorizes)
        self.assertFalse(check_privacy(j, 1).factorizes)

    def test_full_download_is_private_but_not_optimal(self):
        row, passed = verify(self.quarter, self.on_off, 1, uniform(), FullDownloadEncoder())
        self.assertTrue(row['factorizes'])
        self.assertEqual(row['expected_cost'], 2)
        self.assertEqual(row['theorem_cost'], Fraction(9, 5))
        self.assertFalse(passed)

    def test_verify_row(self):
        row, passed = verify(self.asymmetric, PrivacyPattern.parse('ON,OFF'), 1, uniform())
        self.assertTrue(passed)
        self.assertEqual(row['matrix'], '1/2 1/2 1/4 3/4')
        self.assertEqual(row['pattern'], 'ON,OFF')
        self.assertEqual(row['gap'], 1)
        self.assertEqual(row['expected_cost'], Fraction(49, 33))
        self.assertEqual((row['I1'], row['I2'], row['I3']), (0.0, 0.0, 0.0))

    def test_verify_with_stationary_start(self):
        _, passed = verify(self.asymmetric, PrivacyPattern.parse('ON,OFF,OFF'), 2, stationary(self.asymmetric))
        self.assertTrue(passed)

    def test_acceptance_grid(self):
        grid = acceptance_grid()
        self.assertEqual(len(grid), 12)
        self.assertTrue(all(matrix.positive for matrix in grid))

    def test_all_patterns(self):
        patterns = all_patterns(3)
        self.assertEqual(len(patterns), 7)
        self.assertTrue(all(pattern.flags[0] == 'ON' for pattern in patterns))

    def test_grid_sweep_all_patterns(self):
        for matrix in acceptance_grid():
            for pattern in all_patterns(6):
                for t in range(len(pattern)):
                    row, passed = verify(matrix, pattern, t, uniform())
                    self.assertTrue(passed, row)
                    self.assertEqual(row['expected_cost'], optimal_inverse_rate(matrix, pattern.gap(t)))

    def test_long_pattern(self):
        pattern = PrivacyPattern.parse('ON,OFF,ON,OFF,OFF,OFF')
        for matrix in (self.quarter, self.asymmetric):
            _, passed = verify(matrix, pattern, 5, uniform())
            self.assertTrue(passed)

    def test_largest_horizon_is_enumerated_quickly(self):
        start = timeit.default_timer()
        j = build_joint(self.quarter, PrivacyPattern.parse('ON'), uniform(), MAX_HORIZON)
        elapsed = timeit.default_timer() - start

        self.assertEqual(j.total(), 1)
        self.assertLess(elapsed, 60)

    def test_decodability_fails_when_query_misses_request(self):
        entries = {
            ((SOURCE_A, SOURCE_A), (QUERY_B,)): Fraction(1, 2),
            ((SOURCE_B, SOURCE_B), (QUERY_AB,)): Fraction(1, 2),
        }
        j = JointTable(0, entries, uniform(), self.on_off, self.quarter)
        self.assertFalse(check_decodability(j))

        entries[((SOURCE_A, SOURCE_A), (QUERY_A,))] = entries.pop(((SOURCE_A, SOURCE_A), (QUERY_B,)))
        self.assertTrue(check_decodability(JointTable(0, entries, uniform(), self.on_off, self.quarter)))

    def test_summing_out_queries_gives_chain_law(self):
        for matrix in (self.quarter, self.asymmetric):
            for initial in (uniform(), stationary(matrix)):
                j = build_joint(matrix, PrivacyPattern.parse('ON,OFF,ON,OFF'), initial, 3)
                requests_law = j.marginal(lambda requests, queries: requests)

                self.assertEqual(len(requests_law), 2 ** 5)
                for requests, mass in requests_law.items():
                    expected = Fraction(initial[requests[0]])
                    for source_from, source_to in zip(requests, requests[1:]):
                        expected *= matrix[source_from, source_to]
                    self.assertEqual(mass, expected)

    def test_initial_distribution_does_not_change_checks(self):
        for matrix in acceptance_grid():
            for pattern in all_patterns(4):
                for t in range(len(pattern)):
                    j_uniform = build_joint(matrix, pattern, uniform(), t)
                    j_stationary = build_joint(matrix, pattern, stationary(matrix), t)

                    self.assertEqual(check_privacy(j_uniform, t), check_privacy(j_stationary, t))
                    self.assertEqual(expected_cost(j_uniform, t), expected_cost(j_stationary, t))
