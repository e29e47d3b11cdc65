"""Ising ground states on Chimera graphs: exact solvers, the subgraph-sampling
heuristic, problem transformations, instance generators and a benchmark harness."""

__version__ = "0.1.0"
