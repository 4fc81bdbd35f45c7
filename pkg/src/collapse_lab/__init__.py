"""Factor, abelian and k-binomial complexities of infinite words, with
generators for the classical families and runnable verification scenarios."""

__version__ = "0.1.0"

from .words import (  # noqa: E402
    Alphabet,
    BinomialSignature,
    ColorExhaustionError,
    CountOverflowError,
    DomainError,
    FiniteWord,
    WordsError,
    abelian_equivalent,
    binomial,
    binomial_signature,
    color_finite,
    k_binomial_equivalent,
    project,
    signature_extend,
    word,
)
from .generators import PRESETS, GeneratorSpec, prefix  # noqa: E402
from .analysis import complexity_report, find_collisions, imbalance, reconstruct  # noqa: E402
