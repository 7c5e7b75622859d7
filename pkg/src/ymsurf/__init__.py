"""Heat-kernel character sums, partition functions and Wilson loops for
two-dimensional Yang-Mills theory with classical structure groups."""

__version__ = "0.1.0"
