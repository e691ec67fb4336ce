# QP package
from .SimplexQP import SimplexPoint, SimplexQP, kkt_residual, solve_simplex_qp

__all__ = ['SimplexPoint', 'SimplexQP', 'kkt_residual', 'solve_simplex_qp']
