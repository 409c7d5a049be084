"""Hamiltonicity of randomly perturbed graphs: generators, exact checkers,
constructive pipelines and Monte Carlo threshold estimation."""

__version__ = "0.1.0"
