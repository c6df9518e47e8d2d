"""Exception hierarchy shared by every module of the package."""


class RecurrencePowerError(Exception):
    pass


class DegenerateSequence(RecurrencePowerError):
    """The seeds (P, Q, U0, U1) violate a standing hypothesis."""

    def __init__(self, message, failures=None):
        super().__init__(message)
        self.failures = list(failures or [])


class ZeroProduct(RecurrencePowerError):
    pass


class ZeroInput(RecurrencePowerError):
    pass


class InvalidInput(RecurrencePowerError):
    pass


class HypothesisViolated(RecurrencePowerError):
    pass


class ZeroTerm(RecurrencePowerError):
    pass


class FactorizationTimeout(RecurrencePowerError):
    """Raised when the factorization budget runs out.

    `partial` holds whatever was computed before the deadline (a
    `Factorization` or an `AbcTriple` marked incomplete).
    """

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class ZeroEncountered(RecurrencePowerError):
    def __init__(self, message, witness):
        super().__init__(message)
        self.witness = witness


class IdentityMismatch(RecurrencePowerError):
    pass


class SequenceParseError(RecurrencePowerError):
    pass


class ConfigError(RecurrencePowerError):
    pass
