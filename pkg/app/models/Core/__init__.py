# Core package: feature algebra, dataset and the generic loss family
from .Algebra import as_vector, score, zero_weights
from .Dataset import Dataset
from .GenericLoss import (GenericLossSpec, LossKind, SampleLossReport, generic_loss,
                          loss_subgradient, objective)

__all__ = ['as_vector', 'score', 'zero_weights', 'Dataset', 'GenericLossSpec', 'LossKind',
           'SampleLossReport', 'generic_loss', 'loss_subgradient', 'objective']
