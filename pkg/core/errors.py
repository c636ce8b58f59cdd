"""Exception hierarchy for fracstego.

Every error is a ``ValueError`` so callers that only know about
``ValueError`` keep working; the ``category`` and ``exit_code`` attributes
drive the command-line surface.
"""

from typing import Optional


class StegoError(ValueError):
    """Base class for all domain errors."""

    category = "error"
    exit_code = 1


class ParamsError(StegoError):
    """Invalid quality factor, key, map parameters, mode or usage."""

    category = "params"
    exit_code = 2


class ChaosError(ParamsError):
    """The fractional map produced a non-finite value or degenerated."""


class CapacityError(StegoError):
    """The framed payload does not fit into the cover."""

    category = "capacity"
    exit_code = 3

    def __init__(self, capacity_bits: int, requested_bits: int, message: Optional[str] = None):
        self.capacity_bits = capacity_bits
        self.requested_bits = requested_bits
        super().__init__(
            message or f"Payload of {requested_bits} bits exceeds capacity of {capacity_bits} bits"
        )


class FormatError(StegoError):
    """Unsupported or corrupt image/record, or an I/O failure."""

    category = "format"
    exit_code = 4


class IntegrityError(StegoError):
    """Extracted data is inconsistent (wrong key, parameters or corruption)."""

    category = "integrity"
    exit_code = 5
