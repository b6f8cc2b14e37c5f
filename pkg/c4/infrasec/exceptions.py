"""
Copyright (c) IBM 2015-2017. All Rights Reserved.
Project name: c4-infrasec
This project is licensed under the MIT License, see LICENSE

This library contains the exception hierarchy shared by all infrasec modules.

Every exception carries a human readable ``message`` and, when it was raised
while processing a scenario, the ``path`` of the offending field, e.g.,
``gas.pipes[P2].constant``. The command line tool maps the three branches of
the hierarchy onto exit codes.

.. code-block:: python

    try:
        system = scenario.buildSystem()
    except InvalidSpecificationError as e:
        print(e.path, e.message)

Functionality
-------------
"""


class InfrasecError(Exception):
    """
    Base exception for all infrasec errors

    :param message: message
    :type message: str
    :param path: field path inside the scenario
    :type path: str
    """
    exitCode = 1

    def __init__(self, message, path=None):
        super(InfrasecError, self).__init__(message)
        self.message = message
        self.path = path

    def withPath(self, path):
        """
        Attach a scenario field path if none has been set yet

        :param path: field path
        :type path: str
        :returns: the exception itself
        """
        if not self.path:
            self.path = path
        return self

    def __str__(self):
        if self.path:
            return "%s: %s" % (self.path, self.message)
        return self.message

class InvalidSpecificationError(InfrasecError):
    """
    Input that violates a documented precondition or invariant
    """
    exitCode = 2

class NumericalError(InfrasecError):
    """
    A numerical procedure could not produce a trustworthy result
    """
    exitCode = 3

class CapExceededError(InfrasecError):
    """
    A strategy space is larger than the configured cap

    :param message: message
    :type message: str
    :param size: size of the strategy space
    :type size: int
    :param cap: configured cap
    :type cap: int
    :param guidance: what to change to get below the cap
    :type guidance: str
    """
    exitCode = 4

    def __init__(self, message, size, cap, guidance=None, path=None):
        super(CapExceededError, self).__init__(message, path=path)
        self.size = size
        self.cap = cap
        self.guidance = guidance

    def __str__(self):
        string = "%s (%d > cap %d)" % (super(CapExceededError, self).__str__(), self.size, self.cap)
        if self.guidance:
            string = "%s\n%s" % (string, self.guidance)
        return string

class ScenarioError(InvalidSpecificationError):
    """
    A scenario document could not be parsed or validated

    :param message: message
    :type message: str
    :param path: field path
    :type path: str
    :param line: line number in the scenario file
    :type line: int
    """
    def __init__(self, message, path=None, line=None):
        super(ScenarioError, self).__init__(message, path=path)
        self.line = line

    def __str__(self):
        string = super(ScenarioError, self).__str__()
        if self.line is not None:
            string = "line %d: %s" % (self.line, string)
        return string

class ZeroPressureDropError(InvalidSpecificationError):
    """
    Operating point heads are equal across a pipe or compressor
    """

class CompressorSingularError(InvalidSpecificationError):
    """
    Compressor flow law denominator vanishes at the operating point
    """

class PartitionMismatchError(InvalidSpecificationError):
    """
    Subsystem partition does not cover the state vector exactly once
    """

class KExceedsPoolError(InvalidSpecificationError):
    """
    Attacker may attack more states than the pool holds
    """

class InfeasibleBudgetError(InvalidSpecificationError):
    """
    Budget cannot give every subsystem its minimum allocation
    """

class ZeroConnectionsError(InvalidSpecificationError):
    """
    A subsystem without connections has no detection time
    """

class HorizonNonpositiveError(InvalidSpecificationError):
    """
    Simulation horizon or step is not positive
    """

class WindowExceedsHorizonError(InvalidSpecificationError):
    """
    A cost integration window extends beyond the simulated horizon
    """

class MeasurementGridMismatchError(InvalidSpecificationError):
    """
    Measurements are not sampled on the filter grid
    """

class NotHurwitzError(InvalidSpecificationError):
    """
    Filter pencil is singular or has an eigenvalue outside the open left half plane

    :param message: message
    :type message: str
    :param eigenvalue: offending eigenvalue
    :type eigenvalue: complex
    """
    def __init__(self, message, eigenvalue=None, path=None):
        super(NotHurwitzError, self).__init__(message, path=path)
        self.eigenvalue = eigenvalue

class IrregularPencilError(NumericalError):
    """
    The pencil ``sE - A`` is singular for every ``s``
    """

class UnstableSystemError(NumericalError):
    """
    The unattacked system is not asymptotically stable

    :param message: message
    :type message: str
    :param eigenvalue: offending eigenvalue
    :type eigenvalue: complex
    """
    def __init__(self, message, eigenvalue, path=None):
        super(UnstableSystemError, self).__init__(message, path=path)
        self.eigenvalue = eigenvalue

    def __str__(self):
        return "%s (eigenvalue %s)" % (super(UnstableSystemError, self).__str__(), self.eigenvalue)

class SingularStepMatrixError(NumericalError):
    """
    The implicit step matrix is not invertible for the chosen step
    """

class PoleEvaluationError(NumericalError):
    """
    A transfer function was evaluated at a pencil eigenvalue
    """

class DegenerateLPError(NumericalError):
    """
    The minimax program produced mixtures that fail the equilibrium certificate
    """

class PayoffError(NumericalError):
    """
    A payoff entry could not be evaluated

    :param attack: attacked state labels
    :type attack: tuple
    :param allocation: connection counts
    :type allocation: tuple
    :param cause: underlying exception
    :type cause: :class:`InfrasecError`
    """
    def __init__(self, attack, allocation, cause):
        super(PayoffError, self).__init__("payoff for attack %s under allocation %s failed: %s" % (attack, allocation, cause))
        self.attack = attack
        self.allocation = allocation
        self.cause = cause
