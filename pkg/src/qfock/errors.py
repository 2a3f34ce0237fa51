"""Exception hierarchy shared by all qfock modules."""


class QFockError(Exception):
    """Base class for all library errors."""


class UsageError(QFockError):
    """Caller violated a precondition (bad arguments, mode mismatch, ...)."""


class ModeMismatchError(UsageError):
    """Exact and float scalars (or different pinned q values) were mixed."""


class DepthExceededError(QFockError):
    """A creation operator would push a tensor word past the Fock truncation.

    Raised instead of silently truncating: exact identity checks are only
    meaningful when the full result fits under the configured depth.
    """


class CutoffExceededError(QFockError):
    """A letter product or gauge action would exceed the polynomial degree cutoff."""


class DegeneracyError(QFockError):
    """A moment / Hankel system is singular (measure supported on too few points)."""


class ResourceBudgetError(QFockError):
    """A combinatorial budget (symmetric-group or Bell-number cap) was exceeded."""
