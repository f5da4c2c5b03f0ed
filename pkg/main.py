import os
import logging
import logging.config
import json
import sys
import argparse

from onoffprivacy.commands.basecommand import BaseCommand
from onoffprivacy.config import Config, ConfigValidationException
from onoffprivacy.converse import GRIDS, GRID_PINNED
from onoffprivacy.encoders.baseencoder import BaseEncoder
from onoffprivacy.netproto.server import DEFAULT_PORT
from onoffprivacy.onoffprivacy import OnOffPrivacy
from onoffprivacy.simulator import DEFAULT_MESSAGE_BITS, DEFAULT_TRIALS


def setup_logging(default_path=os.path.dirname(os.path.realpath(__file__))+"/loggerConfiguration.json",
                  default_level=logging.INFO):
        """
        Setup logging configuration

        :param default_path: path to the logger configuration
        :param default_level: defines the default logging level if configuration file is not found(default:logging.INFO)
        """
        path = default_path
        if os.path.exists(path):
            with open(path, 'rt') as f:
                config = json.load(f)
            logging.config.dictConfig(config)
        else:
            logging.basicConfig(level=default_level)


def get_argparser(command_choices, encoder_choices):
    """
    Builds the command line parser

    :param command_choices: identifiers of all commands
    :param encoder_choices: identifiers of all query encoders
    """
    parser = argparse.ArgumentParser(description='Computes, verifies and runs rate-optimal ON-OFF private '
                                                 'retrieval of correlated requests.')
    parser.add_argument('-v', '--version', help='Shows the version', action='version', version='1.0.0')
    parser.add_argument('command', help='Command to run.', choices=sorted(command_choices))
    parser.add_argument('-m', '--matrix', help='Transition matrix as four fractions, row-major, e.g. '
                                               '"3/4 1/4 1/4 3/4".', default=None)
    parser.add_argument('-a', '--alpha', help='Switching probability of a symmetric chain (default: 1/4).',
                        default=None)
    parser.add_argument('-p', '--pattern', help='Privacy modes, e.g. ON,OFF,OFF.', default=None)
    parser.add_argument('-g', '--gap', help='Single gap to evaluate.', type=int, default=None)
    parser.add_argument('--gap-max', help='Evaluate all gaps from 0 to this value.', type=int, default=None)
    parser.add_argument('--alpha-steps', help='Sweep symmetric chains with alpha from 0 to 1/2 in this many steps.',
                        type=int, default=None)
    parser.add_argument('--t-max', help='Last time to verify (at most 8).', type=int, default=None)
    parser.add_argument('-T', '--horizon', help='Last query time of a session.', type=int, default=None)
    parser.add_argument('-n', '--trials', help='Number of sessions.', type=int, default=DEFAULT_TRIALS)
    parser.add_argument('-s', '--seed', help='Base seed.', type=int, default=0)
    parser.add_argument('-L', '--bits', help='Message length in bits.', type=int, default=DEFAULT_MESSAGE_BITS)
    parser.add_argument('--grid-n', help='Grid points per axis for the brute force search.', type=int, default=11)
    parser.add_argument('--grid', help='Grid of the brute force search.', default=GRID_PINNED, choices=GRIDS)
    parser.add_argument('--initial', help='Law of the first request.', default='uniform',
                        choices=['uniform', 'stationary'])
    parser.add_argument('-e', '--encoder', help='Query encoder to use.', default='onoff',
                        choices=sorted(encoder_choices))
    parser.add_argument('-H', '--host', help='Address of the retrieval server.', default='127.0.0.1')
    parser.add_argument('-P', '--port', help='Port of the retrieval server.', type=int, default=DEFAULT_PORT)
    parser.add_argument('--sweep', help='Verify the whole acceptance grid.', action='store_true')
    parser.add_argument('--float', help='Add float columns next to rational ones.', action='store_true')
    parser.add_argument('--trace', help='Log requests and queries of every trial.', action='store_true')
    parser.add_argument('-o', '--out', help='CSV output file (default: stdout).', default=None)
    parser.add_argument('--debug', help='Sets the debug level.', default='INFO',
                        choices=['DEBUG', 'INFO', 'WARNING', 'ERROR', 'CRITICAL'])
    return parser


def start():
    """
    Starts the application. First parses the different command line arguments and then it gives these to
    :class:`~onoffprivacy.onoffprivacy.OnOffPrivacy`
    """
    setup_logging()
    logger = logging.getLogger("main")
    logger.info("Starting onoffPRIVACY...")

    try:
        command_choices = BaseCommand.get_all_possible_command_options()
        encoder_choices = BaseEncoder.get_all_possible_encoder_options()
    except Exception as e:
        logger.exception("Failed to instantiate commands or encoders.")
        sys.exit(1)

    logger.debug("Found the following commands: %s" % ', '.join(sorted(command_choices)))
    logger.debug("Found the following encoders: %s" % ', '.join(sorted(encoder_choices)))

    parser = get_argparser(command_choices, encoder_choices)

    try:
        args = parser.parse_args()
        cfg = Config(args)
    except ConfigValidationException as e:
        logger.error(e)
        sys.exit(1)

    logger.debug(cfg)

    onoffprivacy = OnOffPrivacy()
    sys.exit(onoffprivacy.start(cfg))

if __name__ == "__main__":
    start()
