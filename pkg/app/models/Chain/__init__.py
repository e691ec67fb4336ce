# Chain package
from .ChainInstance import UNKNOWN, ChainInstance, chain_argmax, chain_enumerate, chain_feature_dim

__all__ = ['UNKNOWN', 'ChainInstance', 'chain_argmax', 'chain_enumerate', 'chain_feature_dim']
