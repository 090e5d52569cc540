"""Error taxonomy shared by the library and the CLI.

Each class maps to a fixed process exit code so that scripted callers can
distinguish "you asked wrong" from "this would not fit on a desk".
"""


class HaltlabError(Exception):
    """Base class for all haltlab errors."""

    exit_code = 1


class ConfigError(HaltlabError):
    """Malformed machine descriptor, distribution file, or parameter combination."""

    exit_code = 2


class UndefinedConditionalError(ConfigError):
    """Conditioning event has measure zero; the requested ratio does not exist."""


class ResourceLimitError(HaltlabError):
    """An enumeration, output buffer, or precision request exceeded its cap.

    Caps are refusals, never silent truncation; raise the cap explicitly to
    proceed (e.g. via HALTLAB_ENUM_CAP).
    """

    exit_code = 3


class DegenerateDistributionError(HaltlabError):
    """No halting program was found, so the runtime distribution has no mass."""

    exit_code = 4


class InvariantViolation(HaltlabError):
    """An internally certified inequality failed; indicates a haltlab bug."""

    exit_code = 5
