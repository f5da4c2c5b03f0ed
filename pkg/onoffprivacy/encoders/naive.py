from onoffprivacy.encoders.baseencoder import BaseEncoder
from onoffprivacy.scheme import EncoderDistribution, QUERY_AB, singleton


class NaiveEncoder(BaseEncoder):
    """
    Downloads both messages while privacy is ON and only the desired one while it is OFF. Ignores the correlation
    between requests, so OFF-time queries leak earlier ON-time requests.
    """
    @property
    def identifier(self):
        return 'naive'

    def distribution(self, matrix, gap, x, u):
        if gap == 0:
            return EncoderDistribution({QUERY_AB: 1})
        return EncoderDistribution({singleton(x): 1})
