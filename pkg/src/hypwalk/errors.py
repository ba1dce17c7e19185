"""Exception types shared across the package."""


class HypwalkError(Exception):
    """Base class for all package errors."""


class PreconditionError(HypwalkError):
    """An operation was called on inputs violating its stated precondition."""


class UnsatisfiableConfigError(HypwalkError):
    """No valid instance exists at the requested parameters."""


class ElementaryDistributionError(HypwalkError):
    """The step distribution generates an elementary subgroup, so decay
    experiments that assume two independent loxodromic elements are invalid."""


class ConfigError(HypwalkError):
    """Experiment configuration is malformed; carries every violation found."""

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))
