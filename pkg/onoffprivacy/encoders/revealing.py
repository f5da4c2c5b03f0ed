from onoffprivacy.encoders.baseencoder import BaseEncoder
from onoffprivacy.scheme import EncoderDistribution, singleton


class RevealingEncoder(BaseEncoder):
    """
    Always asks for the desired message only. Used as negative control: the query is the request.
    """
    @property
    def identifier(self):
        return 'revealing'

    def distribution(self, matrix, gap, x, u):
        return EncoderDistribution({singleton(x): 1})
