"""Profunctor model of differential linear logic on small finite categories."""

from .fincat import FinCat, build_fincat, builtin, test_family
from .prof import Profunctor, compose, iso_check
from .freesmc import Bang
from .catsym import SymSeq, derivative, kleisli_compose
from .analytic import Species

__version__ = "0.1.0"

__all__ = ["FinCat", "build_fincat", "builtin", "test_family", "Profunctor", "compose",
           "iso_check", "Bang", "SymSeq", "derivative", "kleisli_compose", "Species"]
