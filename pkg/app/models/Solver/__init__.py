# Solver package: bundle bookkeeping, CCCP variants and the perceptron baseline
from .Bundle import (Bound, Bundle, LossOracle, approximation_gap, compute_bound, compute_v, inner_solve,
                     solution_from_alpha)
from .CCCPSolver import (SolverConfig, TrainTrace, train_cccp, train_lesion_variant,
                         train_vanilla_cccp)
from .Perceptron import train_perceptron

__all__ = ['Bound', 'Bundle', 'LossOracle', 'approximation_gap', 'compute_bound', 'compute_v', 'inner_solve',
           'solution_from_alpha',
           'SolverConfig', 'TrainTrace', 'train_cccp', 'train_lesion_variant', 'train_vanilla_cccp',
           'train_perceptron']
