import abc
import importlib
import os


class BaseEncoder(metaclass=abc.ABCMeta):
    """
    BaseEncoder from which all query encoders must inherit
    """

    @abc.abstractproperty
    def identifier(self):
        """
        Identifier of the encoder

        .. WARNING:: Must be unique among all encoders
        """
        return

    @abc.abstractmethod
    def distribution(self, matrix, gap, x, u):
        """
        Returns the query distribution for request x in context u

        :param matrix: object of class :class:`~onoffprivacy.markov.TransitionMatrix`
        :param gap: t - F-(t), 0 if privacy is ON at time t
        :param x: current request (source label)
        :param u: object of class :class:`~onoffprivacy.markov.UContext`
        :return: object of class :class:`~onoffprivacy.scheme.EncoderDistribution`
        """
        pass

    @staticmethod
    def _import_encoders():
        """
        Imports all encoders that are in the encoders folder
        """
        encoder_files = [x[:-3] for x in os.listdir(os.path.dirname(os.path.realpath(__file__)))
                         if x.endswith(".py") and not x.startswith('__')]
        for encoder in encoder_files:
            importlib.import_module('onoffprivacy.encoders.%s' % encoder)

    @staticmethod
    def find_fitting_encoder(identifier):
        """
        Finds a fitting encoder by first importing all encoders and checking if the identifier of the encoder
        matches the identifier given by the user

        :param identifier: identifier chosen by the user (e.g., onoff)
        """
        BaseEncoder._import_encoders()

        for sc in BaseEncoder.__subclasses__():
            encoder = sc()
            if encoder.identifier == identifier:
                return encoder

        return None

    @staticmethod
    def get_all_possible_encoder_options():
        """
        Returns all possible encoder options by importing the encoders and getting their identifier
        """
        BaseEncoder._import_encoders()

        return set(sc().identifier for sc in BaseEncoder.__subclasses__())
