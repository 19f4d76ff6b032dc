"""Exception taxonomy shared across the package.

Three failure classes are distinguished because the command-line surface
maps them to different exit codes:

* :class:`PreconditionError` — the caller handed us invalid input
  (dimension mismatch, missing precondition, malformed file).  CLI exit 2.
* :class:`SizeGuardError` — the requested enumeration exceeds a guard
  bound; a subtype of precondition failure.  CLI exit 2.
* :class:`InvariantViolationError` — an internal mathematical invariant
  failed.  These are raised where a wrong answer would silently falsify a
  theorem the library is built on (e.g. a uniqueness count that is not 1).
  CLI exit 1.
"""

from __future__ import annotations


class PreconditionError(ValueError):
    """Invalid input or violated operation precondition."""


class SizeGuardError(PreconditionError):
    """An enumeration guard (projective points, group order) was exceeded."""


class InvariantViolationError(RuntimeError):
    """A mathematical invariant the library relies on failed to hold."""
