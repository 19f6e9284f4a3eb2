"""Exception hierarchy for jcsim."""


class JCSimError(Exception):
    """Base class for every error raised by jcsim."""


class DimensionError(JCSimError, ValueError):
    """Operand shapes do not match the expected Hilbert space."""


class NormalizationError(JCSimError, ValueError):
    """A state or distribution violates its normalization contract."""


class TruncationError(JCSimError):
    """The truncated Fock space is too small for the requested state."""


class RegimeError(JCSimError):
    """The operation is not defined for these parameters (e.g. off resonance)."""


class ImpossibleOutcomeError(JCSimError):
    """A measurement outcome has vanishing probability."""


class ProtocolError(JCSimError):
    """Invalid multi-atom sequence."""


class ConfigError(JCSimError, ValueError):
    """Invalid scenario configuration."""
