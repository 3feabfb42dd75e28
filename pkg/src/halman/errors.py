"""Exception types shared across the package."""

from __future__ import annotations


class HalmanError(Exception):
    """Base class for all errors raised by this package."""


class UsageError(HalmanError, ValueError):
    """Bad argument (axis out of range, wrong dimension, ...)."""


class HypothesisViolated(HalmanError):
    """The input fails an intersection hypothesis.

    ``transversal`` is a tuple of box indices, one per family (or, for a
    single-family hypothesis, a tuple of box indices inside that family),
    whose trace intersection is too small. It can be re-checked with
    :func:`halman.traces.transversal_count`.
    """

    def __init__(self, message: str, transversal: tuple[int, ...], count: int | None = None):
        super().__init__(message)
        self.transversal = tuple(transversal)
        self.count = count


class StructureViolated(HypothesisViolated):
    """Per-axis split structure is impossible under the colorful hypothesis."""


class SelfCheckFailed(HalmanError):
    """A generator's output failed its own property check."""


class GenerationFailed(HalmanError):
    """Random generation gave up after the retry budget."""


class MalformedInput(HalmanError):
    """An instance or report file does not follow the JSON schema."""
