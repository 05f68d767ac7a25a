"""Difference type theory: parser, checker, rewriter and denotational backends."""

__version__ = "0.1.0"
