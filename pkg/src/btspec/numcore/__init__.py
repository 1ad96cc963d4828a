"""Complex sparse linear algebra used by every discrete operator."""
from .arnoldi import RitzSet, arnoldi, start_vector
from .rng import RngStream, rng_stream
from .solvers import SolveInfo, SolverError, solve
from .sparse import SparseMatrix, TripletPattern, spmv

__all__ = ["RitzSet", "arnoldi", "start_vector", "RngStream", "rng_stream",
           "SolveInfo", "SolverError", "solve", "SparseMatrix", "TripletPattern", "spmv"]
