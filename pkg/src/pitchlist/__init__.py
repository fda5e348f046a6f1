"""pitchlist: recommend journalists to pitch a press release to.

The pipeline indexes journalist-authored articles with TF-IDF vectors and
answers queries by cosine k-nearest-neighbor search, with supporting tools
for text cleaning, fuzzy profile matching, email record linkage, sentiment
profiling, and a 4-tier multilabel topic classifier.
"""

from .errors import (
    InputFileError,
    NonEnglishTextError,
    NoSignalError,
    PitchlistError,
)

__version__ = "0.1.0"

__all__ = [
    "InputFileError",
    "NonEnglishTextError",
    "NoSignalError",
    "PitchlistError",
    "__version__",
]
