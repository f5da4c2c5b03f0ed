from onoffprivacy import scheme
from onoffprivacy.encoders.baseencoder import BaseEncoder


class OnOffEncoder(BaseEncoder):
    """
    Rate-optimal encoder that keeps past ON requests and all future requests private
    """
    @property
    def identifier(self):
        return 'onoff'

    def distribution(self, matrix, gap, x, u):
        return scheme.encoder(matrix, gap, x, u)
