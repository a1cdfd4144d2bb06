"""Exception types shared across the pipeline.

Exit codes: 2 for validation problems (bad data, schema, or parameters),
3 for algorithmic failures on well-formed input.
"""


class OpinionNetError(Exception):
    exit_code = 1


class ValidationError(OpinionNetError):
    """Invalid input data, schema, or parameters."""

    exit_code = 2


class AlgorithmError(OpinionNetError):
    """A well-formed request the algorithm cannot satisfy."""

    exit_code = 3


class NoGiantComponentError(AlgorithmError):
    """No sweep level produced a large enough component.

    Carries the partial sweep so callers can report it.
    """

    def __init__(self, message, sweep):
        super().__init__(message)
        self.sweep = sweep
