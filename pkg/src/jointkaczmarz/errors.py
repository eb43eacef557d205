"""Exception types raised across the package."""


class ContractError(ValueError):
    """An operation was called with inconsistent shapes or invalid arguments."""


class ParameterDomainError(ContractError):
    """A regularization parameter is negative or not finite."""


class DegenerateHyperplaneError(ContractError):
    """A projection was requested onto a hyperplane with a zero normal."""


class EmptySelectionError(RuntimeError):
    """No successful sweep record was available to select from."""


class FormatError(ValueError):
    """A binary matrix file is malformed.

    Attributes:
        offset: byte offset at which the problem was detected.
    """

    def __init__(self, message, offset):
        super().__init__(f"{message} (at byte offset {offset})")
        self.offset = offset


class ConfigError(ValueError):
    """A run configuration failed validation.

    Attributes:
        violations: every problem found, not just the first.
    """

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("invalid configuration:\n  " + "\n  ".join(self.violations))
