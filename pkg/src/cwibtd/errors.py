"""Exception types shared across the package.

The CLI maps these onto exit codes: data-shaped problems (parsing, label
alignment, vocabulary issues) exit with 2, numerical corruption with 3.
"""


class CwibtdError(Exception):
    """Base class for every error raised by this package."""


class ParseError(CwibtdError):
    """An input file did not match its declared format."""

    def __init__(self, path, line_no: int, message: str):
        super().__init__(f"{path}:{line_no}: {message}")
        self.path = str(path)
        self.line_no = line_no


class LabelMismatch(CwibtdError):
    """Documents and labels do not align."""


class EmptyVocabulary(CwibtdError):
    """No token survived frequency and stopword filtering."""


class InsufficientClassSize(CwibtdError):
    """A class has fewer documents than the requested subset size."""


class EmptyInput(CwibtdError):
    """An operation received no data to work on."""


class UndefinedActivity(CwibtdError):
    """PMI requested for a word pair that never co-occurred."""


class InvalidScale(CwibtdError):
    """Pseudo-document scale factor must be strictly positive."""


class NumericalError(CwibtdError):
    """A sampling weight vector summed to a non-finite or non-positive
    value, which signals corrupted count matrices."""


class LengthMismatch(CwibtdError):
    """Two label sequences that must align have different lengths."""


class UnknownClass(CwibtdError):
    """A designated class id or name is not present in the corpus."""


class VocabularyMismatch(CwibtdError):
    """A model and a prepared corpus were built over different vocabularies."""


class InferenceError(CwibtdError):
    """The model cannot produce topic distributions for this input."""
