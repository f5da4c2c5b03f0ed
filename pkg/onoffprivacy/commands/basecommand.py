import abc
import contextlib
import csv
import importlib
import logging
import os
import sys
from fractions import Fraction


class BaseCommand(metaclass=abc.ABCMeta):
    """
    BaseCommand from which all commands must inherit
    """

    @abc.abstractproperty
    def identifier(self):
        """
        Identifier of the command, as given on the command line

        .. WARNING:: Must be unique among all commands
        """
        return

    #: CSV columns written by the command, in order
    columns = ()

    def __init__(self, cfg):
        """
        Initialization of the command

        :param cfg: holds all configuration. Object of class :class:`~onoffprivacy.config.Config`
        """
        self.config = cfg
        self.debug_level = logging.DEBUG

        if self.config is not None:
            self.debug_level = self.config.get_debug_level()

    @abc.abstractmethod
    def process(self):
        """
        Method that is called to run the command

        :return: process exit status, 0 on success
        """
        pass

    def write_rows(self, rows):
        """
        Writes rows as CSV to the configured output (stdout if none is set). Rationals are written as p/q; with
        the float option every rational column gets a <column>_float companion.

        :param rows: list of dictionaries keyed by :attr:`columns`
        """
        header = list(self.columns)
        use_float = self.config is not None and self.config.float_columns
        if use_float:
            header += ['%s_float' % column for column in self.columns
                       if rows and isinstance(rows[0].get(column), Fraction)]

        with self._open_output() as out:
            writer = csv.writer(out, lineterminator='\n')
            writer.writerow(header)
            for row in rows:
                values = [_render(row[column]) for column in self.columns]
                if use_float:
                    values += [repr(float(row[column[:-len('_float')]])) for column in header[len(self.columns):]]
                writer.writerow(values)

    def _open_output(self):
        if self.config is not None and self.config.out:
            return open(self.config.out, 'w', newline='')
        return contextlib.nullcontext(sys.stdout)

    @staticmethod
    def _import_commands():
        """
        Imports all commands that are in the commands folder
        """
        command_files = [x[:-3] for x in os.listdir(os.path.dirname(os.path.realpath(__file__)))
                         if x.endswith(".py") and not x.startswith('__')]
        for command in command_files:
            importlib.import_module('onoffprivacy.commands.%s' % command)

    @staticmethod
    def find_fitting_command(cfg):
        """
        Finds a fitting command by first importing all commands and checking if the identifier of the command
        matches the identifier given by the user

        :param cfg: holds all configuration. Object of class :class:`~onoffprivacy.config.Config`
        """
        BaseCommand._import_commands()

        for sc in BaseCommand.__subclasses__():
            command = sc(cfg)
            if command.identifier == cfg.identifier:
                return command

        return None

    @staticmethod
    def get_all_possible_command_options():
        """
        Returns all possible command options by importing the commands and getting their identifier
        """
        BaseCommand._import_commands()

        choices = set()
        for sc in BaseCommand.__subclasses__():
            command = sc(None)
            choices.add(command.identifier)

        return choices


def _render(value):
    if isinstance(value, bool):
        return 'true' if value else 'false'
    if isinstance(value, float):
        return repr(value)
    return str(value)
