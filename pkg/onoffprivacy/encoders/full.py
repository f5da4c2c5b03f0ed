from onoffprivacy.encoders.baseencoder import BaseEncoder
from onoffprivacy.scheme import EncoderDistribution, QUERY_AB


class FullDownloadEncoder(BaseEncoder):
    """
    Always downloads both messages. Private, but never better than inverse rate 2.
    """
    @property
    def identifier(self):
        return 'full'

    def distribution(self, matrix, gap, x, u):
        return EncoderDistribution({QUERY_AB: 1})
