"""Exception hierarchy.

Every error carries the CLI exit code it maps to: 1 for bad input or a
violated precondition, 2 for file problems, 3 for numerical guards.
"""


class HorolabError(Exception):
    exit_code = 1


class PreconditionError(HorolabError, ValueError):
    pass


class NotHyperbolic(PreconditionError):
    pass


class NotSchottky(PreconditionError):
    pass


class WrongSpecKind(PreconditionError):
    pass


class EmptyBall(PreconditionError):
    pass


class LoopTooLong(PreconditionError):
    pass


class ConfigError(PreconditionError):
    pass


class NumericalGuardError(HorolabError, ArithmeticError):
    exit_code = 3


class DegenerateMatrix(NumericalGuardError):
    pass


class NumericUnderflow(NumericalGuardError):
    pass


class FlowOverflow(NumericalGuardError):
    pass


class BallTooLarge(NumericalGuardError):
    pass


class RelatorCheckFailed(NumericalGuardError):
    pass


class CacheError(HorolabError):
    exit_code = 2


class FormatError(CacheError):
    pass


class SpecMismatch(CacheError):
    pass
