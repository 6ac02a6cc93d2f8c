"""Exception types shared across the pipeline."""


class XprobError(Exception):
    """Base class for all errors raised by this package."""


class ConfigError(XprobError):
    """Invalid run configuration (bad flag value, out-of-range parameter)."""


class CorpusError(XprobError):
    """Corpus file missing, unreadable, or empty."""


class TrainingDataError(XprobError):
    """Labeled data unfit for training the builtin classifier."""


class ClassifierProtocolError(XprobError):
    """External classifier process crashed, timed out, or broke the wire protocol."""


class NoPrototypesError(XprobError):
    """The corpus contains no counterfactual of the explicand's predicted class."""


class PerturbationError(XprobError):
    """The explicand is too short to perturb by word dropping."""


class SurrogateFitError(XprobError):
    """The weighted ridge system could not be solved."""
