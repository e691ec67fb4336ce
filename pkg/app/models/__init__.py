# Models package
# Import main classes for convenience
from .Core import Dataset, GenericLossSpec, LossKind
from .Chain import ChainInstance
from .Tracking import TrackingInstance

__all__ = ['Dataset', 'GenericLossSpec', 'LossKind', 'ChainInstance', 'TrackingInstance']
