"""Exception types shared across the simulator."""


class SailsimError(Exception):
    """Base class for all simulator errors."""


class ConfigurationError(SailsimError):
    """Invalid parameters or config file. Carries the full violation list."""

    def __init__(self, violations):
        if isinstance(violations, str):
            violations = [violations]
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


class GimbalLockError(SailsimError):
    """Pitch too close to +/-90 deg for the Euler-rate transform."""


class IntegrationBlowupError(SailsimError):
    """Integrator produced a non-finite state; carries the offending values."""

    def __init__(self, message, state=None):
        super().__init__(message)
        self.state = state


class EpisodeContractError(SailsimError):
    """Episode API misuse (step before reset, step after terminal, ...)."""


class ProtocolError(SailsimError):
    """Wire-protocol violation. `code` matches the error code sent on the wire."""

    def __init__(self, code, message):
        self.code = code
        super().__init__(message)
