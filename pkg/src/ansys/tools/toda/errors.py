# Copyright (C) 2025 ANSYS, Inc. and/or its affiliates.
# SPDX-License-Identifier: MIT
#
#
# Permission is hereby granted, free of charge, to any person obtaining a copy
# of this software and associated documentation files (the "Software"), to deal
# in the Software without restriction, including without limitation the rights
# to use, copy, modify, merge, publish, distribute, sublicense, and/or sell
# copies of the Software, and to permit persons to whom the Software is
# furnished to do so, subject to the following conditions:
#
# The above copyright notice and this permission notice shall be included in all
# copies or substantial portions of the Software.
#
# THE SOFTWARE IS PROVIDED "AS IS", WITHOUT WARRANTY OF ANY KIND, EXPRESS OR
# IMPLIED, INCLUDING BUT NOT LIMITED TO THE WARRANTIES OF MERCHANTABILITY,
# FITNESS FOR A PARTICULAR PURPOSE AND NONINFRINGEMENT. IN NO EVENT SHALL THE
# AUTHORS OR COPYRIGHT HOLDERS BE LIABLE FOR ANY CLAIM, DAMAGES OR OTHER
# LIABILITY, WHETHER IN AN ACTION OF CONTRACT, TORT OR OTHERWISE, ARISING FROM,
# OUT OF OR IN CONNECTION WITH THE SOFTWARE OR THE USE OR OTHER DEALINGS IN THE
# SOFTWARE.

"""Exceptions raised by ansys-tools-toda."""

import logging

LOG = logging.getLogger(__name__)


class TodaError(Exception):
    """Base class of all errors raised by this package."""


class DomainError(TodaError, ValueError):
    """Input outside the domain of an operation.

    Raised for invalid simple types, elements in the wrong graded piece, degrees that are not
    congruent to one modulo the Coxeter number, and fields violating the reality condition.
    """


class ConstructionError(TodaError, RuntimeError):
    """A construction that must succeed for valid input did not."""


class CertificationError(TodaError):
    """A certification check failed.

    Parameters
    ----------
    message : str
        Human readable summary.
    report : object, optional
        The report that failed, kept for inspection by callers.
    """

    def __init__(self, message: str, report=None):
        super().__init__(message)
        self.report = report


class BlowUpError(TodaError):
    """Flow integration left the configured norm bound."""

    def __init__(self, message: str, location=None):
        super().__init__(message)
        self.location = location


class GridFormatError(DomainError):
    """Malformed binary grid file."""
