"""Morphological reinflection: data handling, baselines and evaluation."""

from .data import MSD, AnnotatedSentence, Dataset, FormatError, Token, Triple

__version__ = "0.1.0"

__all__ = ["MSD", "AnnotatedSentence", "Dataset", "FormatError", "Token", "Triple"]
