"""Domain errors. `exit_code` is what the command line reports for each kind."""


class OGFError(Exception):
    exit_code = 3

    def __init__(self, detail: str):
        super().__init__(detail)
        self.detail = detail


class ConfigError(OGFError):
    exit_code = 2


class DomainError(OGFError):
    exit_code = 2


class PoleError(DomainError):
    pass


class RangeError(DomainError):
    pass


class UnsupportedFunctionError(DomainError):
    pass


class RegionSafetyError(DomainError):
    pass


class LimitOverflowError(OGFError):
    """Required sieve length exceeds the memory cap"""

    def __init__(self, required: int, cap: int, what: str = "sieve"):
        super().__init__(f"{what} needs N={required} entries, above the memory cap {cap}")
        self.required = required
        self.cap = cap


class QuadratureError(OGFError):
    pass


class ZeroDivisionOnPathError(OGFError):
    """zeta vanished on the integration path: the contour is misconfigured"""
    pass
