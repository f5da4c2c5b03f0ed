import contextlib
import copy
import logging
import math
import timeit
from collections import Counter

import numpy as np
from scipy.stats import chisquare, entropy

from onoffprivacy.encoders.onoff import OnOffEncoder
from onoffprivacy.markov import SOURCES, SOURCE_A, SOURCE_B, UContext, uniform
from onoffprivacy.scheme import QUERY_SYMBOLS, optimal_inverse_rate, query_marginal, sample_query, symbol_name

logger = logging.getLogger('scheme')

DEFAULT_MESSAGE_BITS = 1024
DEFAULT_TRIALS = 100000


class NotDecodable(Exception):
    """
    Exception that is thrown if the desired message is not part of the answer
    """
    pass


class SessionConfig(object):
    """
    Parameters of a batch of retrieval sessions. Times after the end of the pattern are treated as OFF.
    """

    def __init__(self, matrix, pattern, horizon, message_bits=DEFAULT_MESSAGE_BITS, trials=DEFAULT_TRIALS, seed=0,
                 initial=None, keep_transcripts=False, trace=False):
        """
        Initialization

        :param matrix: object of class :class:`~onoffprivacy.markov.TransitionMatrix`
        :param pattern: object of class :class:`~onoffprivacy.scheme.PrivacyPattern`
        :param horizon: T, the last query time of a session
        :param message_bits: L, length of every message in bits
        :param trials: number of independent sessions
        :param seed: base seed; trial i uses seed + i
        :param initial: law of X_0; uniform if not given
        :param keep_transcripts: keep the requests and queries of every trial in the stats
        :param trace: log requests and queries of every trial at DEBUG level
        """
        if trials < 1:
            raise ValueError('At least one trial is needed, got %d' % trials)
        if horizon < 1:
            raise ValueError('Horizon must be at least 1, got %d' % horizon)
        if message_bits <= 0 or message_bits % 8:
            raise ValueError('Message length must be a positive multiple of 8 bits, got %d' % message_bits)

        self.matrix = matrix
        self.pattern = pattern
        self.horizon = horizon
        self.message_bits = message_bits
        self.trials = trials
        self.seed = seed
        self.initial = initial if initial is not None else uniform()
        self.keep_transcripts = keep_transcripts
        self.trace = trace

    @property
    def message_bytes(self):
        return self.message_bits // 8


class SessionStats(object):
    """
    Counters collected over the trials of a session batch
    """

    def __init__(self, horizon):
        self.per_t_bytes = [[0, 0] for _ in range(horizon + 1)]
        self.query_histogram = [Counter() for _ in range(horizon + 1)]
        self.decode_failures = 0
        self.transcripts = []

    def record(self, t, q, answer_length):
        self.per_t_bytes[t][0] += answer_length
        self.per_t_bytes[t][1] += 1
        self.query_histogram[t][q] += 1

    def merge(self, other):
        """
        Adds the counters of another stats object with the same horizon
        """
        merged = SessionStats(len(self.per_t_bytes) - 1)
        for t in range(len(self.per_t_bytes)):
            merged.per_t_bytes[t] = [self.per_t_bytes[t][0] + other.per_t_bytes[t][0],
                                     self.per_t_bytes[t][1] + other.per_t_bytes[t][1]]
            merged.query_histogram[t] = self.query_histogram[t] + other.query_histogram[t]
        merged.decode_failures = self.decode_failures + other.decode_failures
        merged.transcripts = self.transcripts + other.transcripts
        return merged

    def mean_size(self, t):
        """
        Empirical E[|Q_t|]
        """
        counts = self.query_histogram[t]
        return sum(len(q) * n for q, n in counts.items()) / sum(counts.values())

    def stderr(self, t):
        """
        Standard error of the empirical E[|Q_t|]
        """
        counts = self.query_histogram[t]
        total = sum(counts.values())
        mean = self.mean_size(t)
        variance = sum(n * (len(q) - mean) ** 2 for q, n in counts.items()) / total
        return math.sqrt(variance / total)

    def empirical_inverse_rate(self, t, message_bits):
        downloaded, trials = self.per_t_bytes[t]
        return downloaded / trials / (message_bits // 8)

    def __eq__(self, other):
        return isinstance(other, SessionStats) and self.per_t_bytes == other.per_t_bytes and \
            self.query_histogram == other.query_histogram and self.decode_failures == other.decode_failures and \
            self.transcripts == other.transcripts


class MessageStore(object):
    """
    Fresh uniformly random messages of both sources, generated lazily per time step. The messages of time t only
    depend on the store key and t, so they are reproducible in any order of access.
    """

    def __init__(self, key, message_bits):
        """
        Initialization

        :param key: tuple of non-negative integers identifying the store (e.g., seed and trial)
        :param message_bits: L
        """
        self.key = tuple(key)
        self.message_bytes = message_bits // 8
        self._messages = {}

    def messages(self, t):
        """
        Messages W_{A,t} and W_{B,t} as dictionary source -> bytes
        """
        if t not in self._messages:
            rng = np.random.default_rng(list(self.key) + [t])
            self._messages[t] = {x: rng.bytes(self.message_bytes) for x in SOURCES}
        return self._messages[t]


def answer(q, messages):
    """
    Server answer: the messages of the queried sources, concatenated in A-then-B order

    :param q: query symbol
    :param messages: dictionary source -> bytes for the current time
    """
    return b''.join(messages[x] for x in SOURCES if x in q)


def decode(ans, q, x):
    """
    Extracts the desired message from an answer

    :param ans: answer bytes
    :param q: query symbol the answer belongs to
    :param x: desired source
    """
    if x not in q:
        raise NotDecodable('Source %s is not in query %s' % (x, symbol_name(q)))
    members = [source for source in SOURCES if source in q]
    size = len(ans) // len(members)
    index = members.index(x)
    return ans[index * size:(index + 1) * size]


class LocalExchange(object):
    """
    In-process server for one trial
    """

    def __init__(self, cfg, trial):
        self.store = MessageStore((cfg.seed, trial, 1), cfg.message_bits)

    def retrieve(self, t, q):
        return answer(q, self.store.messages(t))

    def expected(self, t, x):
        return self.store.messages(t)[x]

    def close(self):
        pass


def walk_chain(cfg, draws):
    """
    Requests X_0..X_{T+1} from the first T+2 uniform draws

    :param cfg: object of class :class:`SessionConfig`
    :param draws: uniform draws of the trial
    """
    current = SOURCE_A if draws[0] < cfg.initial[SOURCE_A] else SOURCE_B
    requests = [current]
    for i in range(1, cfg.horizon + 2):
        current = SOURCE_A if draws[i] < cfg.matrix[current, SOURCE_A] else SOURCE_B
        requests.append(current)
    return requests


def run_session(cfg, encoder=None, exchange_factory=None):
    """
    Runs cfg.trials independent sessions. Every trial:

    1. Draws 2T+3 uniforms from its own generator seeded with seed + trial: the first T+2 walk the request chain,
    the remaining T+1 sample the queries

    2. At every t <= T builds the encoder distribution from (X_{F-(t)}, X_t, X_{t+1}) and samples Q_t

    3. Retrieves the answer, decodes X_t's message and compares it with the stored one

    :param cfg: object of class :class:`SessionConfig`
    :param encoder: query encoder, :class:`~onoffprivacy.encoders.onoff.OnOffEncoder` if not given
    :param exchange_factory: callable(cfg, trial) returning the server side of a trial; in-process if not given
    """
    if encoder is None:
        encoder = OnOffEncoder()
    if exchange_factory is None:
        exchange_factory = LocalExchange

    start_time = timeit.default_timer()
    stats = SessionStats(cfg.horizon)
    distributions = {}
    query_offset = cfg.horizon + 2

    for trial in range(cfg.trials):
        # plain floats, so comparisons against Fraction thresholds stay exact
        draws = np.random.default_rng(cfg.seed + trial).random(2 * cfg.horizon + 3).tolist()
        requests = walk_chain(cfg, draws)
        queries = []

        with contextlib.closing(exchange_factory(cfg, trial)) as exchange:
            for t in range(cfg.horizon + 1):
                gap = cfg.pattern.gap(t)
                x = requests[t]
                key = (gap, x, UContext(requests[cfg.pattern.last_on(t)], requests[t + 1]))
                if key not in distributions:
                    distributions[key] = encoder.distribution(cfg.matrix, *key)

                q = sample_query(distributions[key], draws[query_offset + t])
                queries.append(q)
                ans = exchange.retrieve(t, q)
                stats.record(t, q, len(ans))
                if len(ans) != len(q) * cfg.message_bytes:
                    logger.error('Trial %d, t=%d: answer to %s has %d bytes, expected %d' %
                                 (trial, t, symbol_name(q), len(ans), len(q) * cfg.message_bytes))
                    stats.decode_failures += 1
                    continue

                try:
                    payload = decode(ans, q, x)
                except NotDecodable as e:
                    logger.error('Trial %d, t=%d: %s' % (trial, t, e))
                    stats.decode_failures += 1
                    continue

                expected = exchange.expected(t, x)
                if len(payload) != cfg.message_bytes or (expected is not None and payload != expected):
                    logger.error('Trial %d, t=%d: decoded message of %s does not match' % (trial, t, x))
                    stats.decode_failures += 1

        if cfg.trace:
            logger.debug('Trial %d: requests %s, queries %s' %
                         (trial, ''.join(requests), ','.join(symbol_name(q) for q in queries)))
        if cfg.keep_transcripts:
            stats.transcripts.append((tuple(requests), tuple(queries)))

    elapsed = timeit.default_timer() - start_time
    logger.info('Ran %d trials up to t=%d in %0.5f s, %d decode failures' %
                (cfg.trials, cfg.horizon, elapsed, stats.decode_failures))
    return stats


def empirical_leakage(cfg, t, encoder=None, stats=None):
    """
    Plug-in estimate, in bits, of the mutual information between (X_{F-(t)}, X_{t+1}) and Q_[t] from the trial
    counts. Add-one smoothing is applied over the observed contexts times the observed query prefixes.

    :param cfg: object of class :class:`SessionConfig`
    :param t: time, at most cfg.horizon
    :param encoder: query encoder, the optimal one if not given
    :param stats: stats with transcripts of a previous run of cfg; runs the sessions if not given
    """
    if stats is None:
        recording = copy.copy(cfg)
        recording.keep_transcripts = True
        stats = run_session(recording, encoder)
    elif len(stats.transcripts) < cfg.trials:
        raise ValueError('Leakage needs the transcripts of all %d trials, got %d; run with keep_transcripts' %
                         (cfg.trials, len(stats.transcripts)))

    last_on = cfg.pattern.last_on(t)
    counts = Counter((requests[last_on], requests[t + 1], queries[:t + 1])
                     for requests, queries in stats.transcripts)
    contexts = sorted(set(key[:2] for key in counts))
    prefixes = sorted(set(key[2] for key in counts), key=lambda prefix: [QUERY_SYMBOLS.index(q) for q in prefix])
    if len(contexts) < 2 or len(prefixes) < 2:
        return 0.0

    table = np.ones((len(contexts), len(prefixes)))
    for (a, b, prefix), n in counts.items():
        table[contexts.index((a, b)), prefixes.index(prefix)] += n

    leakage = entropy(table.sum(axis=1), base=2) + entropy(table.sum(axis=0), base=2) - \
        entropy(table.ravel(), base=2)
    return max(0.0, float(leakage))


def goodness_of_fit(stats, matrix, pattern, t):
    """
    Chi-square p-value of the query histogram at time t against the marginal of the optimal scheme. Symbols the
    scheme never sends must not have been observed.

    :param stats: object of class :class:`SessionStats`
    :param matrix: object of class :class:`~onoffprivacy.markov.TransitionMatrix`
    :param pattern: object of class :class:`~onoffprivacy.scheme.PrivacyPattern`
    :param t: time
    """
    marginal = query_marginal(matrix, pattern.gap(t))
    counts = stats.query_histogram[t]
    total = sum(counts.values())

    if any(counts[q] > 0 for q in QUERY_SYMBOLS if marginal[q] == 0):
        return 0.0

    observed = [counts[q] for q in QUERY_SYMBOLS if marginal[q] > 0]
    expected = [float(marginal[q]) * total for q in QUERY_SYMBOLS if marginal[q] > 0]
    if len(observed) < 2:
        return 1.0
    return float(chisquare(observed, expected).pvalue)


def report_rows(cfg, stats):
    """
    Per-time rows comparing the empirical download with the optimum

    :param cfg: object of class :class:`SessionConfig`
    :param stats: object of class :class:`SessionStats`
    """
    rows = []
    for t in range(cfg.horizon + 1):
        gap = cfg.pattern.gap(t)
        rows.append({
            't': t,
            'gap': gap,
            'theory_inverse_rate': optimal_inverse_rate(cfg.matrix, gap),
            'empirical_inverse_rate': stats.empirical_inverse_rate(t, cfg.message_bits),
            'stderr': stats.stderr(t),
            'trials': stats.per_t_bytes[t][1],
        })
    return rows
