"""Exception hierarchy shared across the package."""


class PitchlistError(Exception):
    """Base class for all errors raised by this package."""


class InputFileError(PitchlistError):
    """A required input file is missing, unreadable, or malformed beyond repair."""


class NonEnglishTextError(PitchlistError):
    """Text was rejected by the English-language filter."""

    def __init__(self, score: float, threshold: float):
        self.score = score
        self.threshold = threshold
        super().__init__(
            f"text scored {score:.3f} against the English trigram profile "
            f"(threshold {threshold})"
        )


class NoSignalError(PitchlistError):
    """A query produced no usable features (cleans to empty or fully out-of-vocabulary)."""
