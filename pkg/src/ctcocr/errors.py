"""Exception types shared across the package."""


class CtcOcrError(Exception):
    """Base class for all errors raised by this package."""


class InvalidInputError(CtcOcrError, ValueError):
    """An argument violates a documented precondition."""


class CapacityError(CtcOcrError):
    """The requested computation is too large to run exactly."""


class FormatError(CtcOcrError, ValueError):
    """A file or byte stream could not be parsed."""


class ConfigError(CtcOcrError, ValueError):
    """Inconsistent or incomplete configuration."""


class TrainingError(CtcOcrError, RuntimeError):
    """Training cannot proceed (non-finite loss, no usable samples, ...)."""


class MissingGlyphError(CtcOcrError, KeyError):
    """The glyph renderer has no glyph for one or more characters."""

    def __init__(self, chars):
        self.chars = sorted(set(chars))
        super().__init__("no glyph for character(s): " + ", ".join(repr(c) for c in self.chars))
