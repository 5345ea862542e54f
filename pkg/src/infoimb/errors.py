"""Exception hierarchy. The CLI maps each family to an exit code."""

from __future__ import annotations


class InfoImbError(Exception):
    """Base class for all package errors."""

    exit_code = 1


class DataError(InfoImbError, ValueError):
    """Input data violates a contract (bad CSV, empty intersection, ...)."""

    exit_code = 3


class LoadError(DataError):
    pass


class AlignmentError(DataError):
    pass


class NumericalError(InfoImbError, RuntimeError):
    """A numerical routine failed (non-PD matrix, no surviving fold, ...)."""

    exit_code = 4


class GPFitError(NumericalError):
    pass
