"""
Copyright (c) IBM 2015-2017. All Rights Reserved.
Project name: c4-infrasec
This project is licensed under the MIT License, see LICENSE

This library contains the attack detection filter

.. math::

    E \\dot{z} = (A + G C) z - G y, \\quad r = C z - y

in its centralized form and in the distributed form where every subsystem integrates
its local filter and exchanges its trajectory with its neighbors until the waveform
relaxation iteration converges.

Usage
-----

.. code-block:: python

    config = FilterConfig.fromSystem(system, window=5.0)
    measurements = Measurements.fromTrajectory(system, simulate(system, x0, attack))
    residue = centralizedFilter(config, measurements, x0)
    run = relaxDistributed(config, measurements, x0)

With the known initial state the residue vanishes if and only if there is no attack.

Functionality
-------------
"""

import logging

import numpy
import pandas

import c4.infrasec.jsonutil
import c4.infrasec.logutil
import c4.infrasec.model
from c4.infrasec.dynamics import ImplicitStepper
from c4.infrasec.exceptions import (HorizonNonpositiveError,
                                    InvalidSpecificationError,
                                    MeasurementGridMismatchError,
                                    NotHurwitzError,
                                    ZeroConnectionsError)


log = logging.getLogger(__name__)

DEFAULT_THRESHOLD = 1e-5
DEFAULT_TOLERANCE = 1e-8
DEFAULT_MAX_ITERATIONS = 100
MAX_GAMMA = 1e6

@c4.infrasec.logutil.ClassLogger
class FilterConfig(c4.infrasec.jsonutil.JSONSerializable):
    """
    Attack detection filter configuration

    :param system: descriptor system
    :type system: :class:`~c4.infrasec.model.DescriptorSystem`
    :param gain: gain matrix ``G`` of shape ``(n, p)``, block-diagonal per subsystem
    :param window: relaxation window ``T`` in s
    :type window: float
    :param maxIterations: maximum relaxation iterations
    :type maxIterations: int
    :param threshold: residue detection threshold
    :type threshold: float
    :param tolerance: relaxation convergence tolerance
    :type tolerance: float
    :param gamma: gain scale if the gain was chosen as ``-gamma C^T``
    :type gamma: float
    :raises NotHurwitzError: if ``(E, A + G C)`` is singular or not Hurwitz
    """
    def __init__(self, system, gain, window, maxIterations=DEFAULT_MAX_ITERATIONS,
                 threshold=DEFAULT_THRESHOLD, tolerance=DEFAULT_TOLERANCE, gamma=None):
        self.system = system
        self.gain = numpy.array(gain, dtype=float)
        self.window = float(window)
        self.maxIterations = int(maxIterations)
        self.threshold = float(threshold)
        self.tolerance = float(tolerance)
        self.gamma = gamma
        p = system.C.shape[0]
        if self.gain.shape != (system.n, p):
            raise InvalidSpecificationError("gain must have shape (%d, %d), got %s" % (system.n, p, self.gain.shape))
        if not self.window > 0:
            raise HorizonNonpositiveError("filter window must be positive, got %r" % self.window)
        if self.maxIterations < 1:
            raise InvalidSpecificationError("at least one relaxation iteration is needed")
        if not (self.threshold > 0 and self.tolerance > 0):
            raise InvalidSpecificationError("threshold and tolerance must be positive")

        outputSubsystems = numpy.array([system.partition[numpy.flatnonzero(row)[0]] for row in system.C], dtype=int)
        rows, columns = numpy.nonzero(self.gain)
        if numpy.any(system.partition[rows] != outputSubsystems[columns]):
            raise InvalidSpecificationError("gain couples states and outputs of different subsystems")

        closed = self.closedLoop
        if not c4.infrasec.model.isRegularPencil(system.E, closed):
            raise NotHurwitzError("filter pencil (E, A + GC) is singular")
        eigenvalues = c4.infrasec.model.pencilEigenvalues(system.E, closed)
        if eigenvalues.size and eigenvalues[0].real >= c4.infrasec.model.STABILITY_THRESHOLD:
            raise NotHurwitzError("filter pencil (E, A + GC) has eigenvalue %s outside the open left half plane"
                                  % eigenvalues[0], eigenvalue=complex(eigenvalues[0]))

    @classmethod
    def fromSystem(cls, system, window, gamma=1.0, maxGamma=MAX_GAMMA, **keyValueArguments):
        """
        Choose the gain ``G = -gamma C^T`` with ``gamma`` doubled until the filter is Hurwitz

        :param system: descriptor system
        :type system: :class:`~c4.infrasec.model.DescriptorSystem`
        :param window: relaxation window in s
        :type window: float
        :param gamma: initial gain scale
        :type gamma: float
        :param maxGamma: largest gain scale to try
        :type maxGamma: float
        :rtype: :class:`FilterConfig`
        :raises NotHurwitzError: if no gain scale up to ``maxGamma`` works
        """
        gamma = float(gamma)
        if not 0 < gamma <= maxGamma:
            raise InvalidSpecificationError("gain scale must be in (0, %g], got %r" % (maxGamma, gamma))
        lastError = None
        while gamma <= maxGamma:
            try:
                config = cls(system, -gamma * system.C.T, window, gamma=gamma, **keyValueArguments)
                cls.log.debug("filter gain scale %g", gamma)
                return config
            except NotHurwitzError as e:
                lastError = e
                gamma *= 2.0
        raise NotHurwitzError("no gain scale up to %g makes the filter Hurwitz: %s" % (maxGamma, lastError.message),
                              eigenvalue=lastError.eigenvalue)

    @property
    def closedLoop(self):
        """
        Filter matrix ``A + G C``
        """
        return self.system.A + self.gain.dot(self.system.C)

    def toJSONSerializable(self):
        serializableDict = {
            "gamma": self.gamma,
            "window": self.window,
            "maxIterations": self.maxIterations,
            "threshold": self.threshold,
            "tolerance": self.tolerance,
        }
        return serializableDict

class Measurements(object):
    """
    Measurement stream ``y`` sampled on a uniform grid starting at ``0``

    :param times: time grid
    :param values: samples of shape ``(len(times), p)``
    :raises MeasurementGridMismatchError: if the grid is not uniform
    """
    def __init__(self, times, values):
        self.times = numpy.asarray(times, dtype=float)
        self.values = numpy.asarray(values, dtype=float)
        if self.times.ndim != 1 or self.times.size < 2 or self.times[0] != 0:
            raise MeasurementGridMismatchError("measurements must start at t = 0 and have at least two samples")
        if self.values.ndim != 2 or self.values.shape[0] != self.times.size:
            raise MeasurementGridMismatchError("measurement samples do not match the time grid")
        spacing = numpy.diff(self.times)
        if numpy.any(numpy.abs(spacing - spacing[0]) > 1e-9 * spacing[0]) or not spacing[0] > 0:
            raise MeasurementGridMismatchError("measurements must be sampled on a uniform grid")

    @classmethod
    def fromTrajectory(cls, system, trajectory):
        """
        Measurements ``y = C x`` of a simulated trajectory

        :param system: descriptor system
        :type system: :class:`~c4.infrasec.model.DescriptorSystem`
        :param trajectory: trajectory
        :type trajectory: :class:`~c4.infrasec.dynamics.Trajectory`
        :rtype: :class:`Measurements`
        """
        return cls(trajectory.times, trajectory.outputs(system))

    @property
    def step(self):
        """
        Sampling step
        """
        return float(self.times[1] - self.times[0])

    def truncated(self, horizon):
        """
        Measurements on ``[0, horizon]``

        :param horizon: horizon in s
        :type horizon: float
        :rtype: :class:`Measurements`
        :raises MeasurementGridMismatchError: if the stream is shorter than the horizon
        """
        if self.times[-1] < horizon * (1.0 - 1e-12):
            raise MeasurementGridMismatchError("measurements end at %r before the window %r" % (float(self.times[-1]), horizon))
        count = int(numpy.searchsorted(self.times, horizon * (1.0 + 1e-12), side="right"))
        return Measurements(self.times[:count], self.values[:count])

class Residue(object):
    """
    Residue ``r = C z - y`` of a filter

    :param times: time grid
    :param values: samples of shape ``(len(times), p)``
    :param labels: measured state labels
    :type labels: [str]
    """
    def __init__(self, times, values, labels):
        self.times = times
        self.values = values
        self.labels = tuple(labels)

    @property
    def supNorm(self):
        """
        Infinity norm of the residue at every grid point
        """
        if self.values.shape[1] == 0:
            return numpy.zeros(self.times.size)
        return numpy.abs(self.values).max(axis=1)

    @property
    def maximum(self):
        """
        Largest residue magnitude over the whole window
        """
        return float(self.supNorm.max())

    def toDataFrame(self):
        """
        Residue as a table with a ``t`` column followed by one column per output

        :rtype: :class:`pandas.DataFrame`
        """
        frame = pandas.DataFrame(self.values, columns=["r.%s" % label for label in self.labels])
        frame.insert(0, "t", self.times)
        return frame

def _rowForcing(samples, differential):
    # step average of the linearly interpolated samples on differential rows, end point on algebraic rows
    return numpy.where(differential[None, :], 0.5 * (samples[:-1] + samples[1:]), samples[1:])

def _outputLabels(system):
    return [system.labels[numpy.flatnonzero(row)[0]] for row in system.C]

def _checkMeasurements(config, measurements, x0):
    system = config.system
    if measurements.values.shape[1] != system.C.shape[0]:
        raise MeasurementGridMismatchError("expected %d measured outputs, got %d" % (system.C.shape[0], measurements.values.shape[1]))
    x0 = numpy.asarray(x0, dtype=float)
    if x0.shape != (system.n,):
        raise InvalidSpecificationError("initial state must have %d entries" % system.n)
    return x0

def centralizedFilter(config, measurements, x0):
    """
    Run the centralized attack detection filter from ``z(0) = x0``

    :param config: filter configuration
    :type config: :class:`FilterConfig`
    :param measurements: measurement stream
    :type measurements: :class:`Measurements`
    :param x0: initial state of the monitored system
    :returns: residue on the measurement grid
    :rtype: :class:`Residue`
    :raises MeasurementGridMismatchError: if the measurements do not fit the system
    """
    system = config.system
    x0 = _checkMeasurements(config, measurements, x0)
    differential = numpy.diag(system.E) != 0
    inputs = -measurements.values.dot(config.gain.T)
    stepper = ImplicitStepper(system.E, config.closedLoop, measurements.step)
    z = stepper.run(x0, _rowForcing(inputs, differential))
    residue = Residue(measurements.times, z.dot(system.C.T) - measurements.values, _outputLabels(system))
    log.debug("centralized filter residue maximum %g", residue.maximum)
    return residue

def firstDetection(residue, threshold):
    """
    First time the residue magnitude exceeds the threshold

    :param residue: residue
    :type residue: :class:`Residue`
    :param threshold: detection threshold
    :type threshold: float
    :returns: detection time in s or ``None`` if the residue stays below the threshold
    :rtype: float
    """
    exceeded = numpy.flatnonzero(residue.supNorm > threshold)
    if exceeded.size == 0:
        return None
    return float(residue.times[exceeded[0]])

@c4.infrasec.logutil.ClassLogger
class RelaxationRun(object):
    """
    Result of the distributed filter waveform relaxation

    :param config: filter configuration
    :type config: :class:`FilterConfig`
    :param measurements: measurements on the relaxation window
    :type measurements: :class:`Measurements`
    :param iterates: state trajectory of every iteration
    :type iterates: [:class:`numpy.ndarray`]
    :param history: per iteration the coupling and state deltas
    :type history: [dict]
    :param converged: whether the coupling delta fell below the tolerance
    :type converged: bool
    """
    def __init__(self, config, measurements, iterates, history, converged):
        self.config = config
        self.measurements = measurements
        self.iterates = iterates
        self.history = history
        self.converged = converged

    @property
    def times(self):
        """
        Time grid of the relaxation window
        """
        return self.measurements.times

    @property
    def iterations(self):
        """
        Number of iterations performed
        """
        return len(self.history)

    @property
    def final(self):
        """
        Final iterate
        """
        return self.iterates[-1]

    def residue(self, iteration=-1):
        """
        Combined residue of an iterate

        :param iteration: iterate position, the last one by default
        :type iteration: int
        :rtype: :class:`Residue`
        """
        system = self.config.system
        z = self.iterates[iteration]
        return Residue(self.times, z.dot(system.C.T) - self.measurements.values, _outputLabels(system))

    def localResidues(self, iteration=-1):
        """
        Residues ``r_i = C_i z_i - y_i`` of the local filters

        :param iteration: iterate position, the last one by default
        :type iteration: int
        :returns: residue by subsystem name
        :rtype: dict
        """
        system = self.config.system
        combined = self.residue(iteration)
        labels = _outputLabels(system)
        residues = {}
        for subsystem, name in enumerate(system.subsystemNames):
            rows = system.subsystemOutputs(subsystem)
            residues[name] = Residue(self.times, combined.values[:, rows], [labels[row] for row in rows])
        return residues

    def toDataFrame(self, iteration=-1):
        """
        Filter states of an iterate as a table

        :param iteration: iterate position, the last one by default
        :type iteration: int
        :rtype: :class:`pandas.DataFrame`
        """
        frame = pandas.DataFrame(self.iterates[iteration], columns=["z.%s" % label for label in self.config.system.labels])
        frame.insert(0, "t", self.times)
        return frame

    def historyDataFrame(self):
        """
        Convergence history as a table

        :rtype: :class:`pandas.DataFrame`
        """
        return pandas.DataFrame(self.history, columns=["iteration", "couplingDelta", "stateDelta"])

def relaxDistributed(config, measurements, x0, initialGuess=None, keepIterates=True):
    """
    Run the distributed filters with waveform relaxation on ``[0, T]``

    In iteration ``k`` every subsystem integrates

    .. math::

        E_i \\dot{z}_i^{(k)} = (A_i + G_i C_i) z_i^{(k)} + \\sum_j A_{ij} z_j^{(k-1)} - G_i y_i

    using the trajectories its neighbors computed in iteration ``k - 1``, then sends
    its own trajectory to the subsystems depending on it. Iterations stop when the
    exchanged coupling waveforms ``A_C z`` change by less than the tolerance.

    :param config: filter configuration
    :type config: :class:`FilterConfig`
    :param measurements: measurement stream covering the window
    :type measurements: :class:`Measurements`
    :param x0: initial state of the monitored system
    :param initialGuess: initial trajectories of shape ``(samples, n)``, defaults to ``x0`` held constant
    :param keepIterates: keep every iterate instead of only the last one
    :type keepIterates: bool
    :rtype: :class:`RelaxationRun`
    """
    system = config.system
    x0 = _checkMeasurements(config, measurements, x0)
    window = measurements.truncated(config.window)
    split = c4.infrasec.model.splitBlockDiagonal(system)
    differential = numpy.diag(system.E) != 0
    gain = config.gain

    local = []
    for subsystem in range(system.subsystemCount):
        states = system.subsystemStates(subsystem)
        rows = system.subsystemOutputs(subsystem)
        localGain = gain[numpy.ix_(states, rows)]
        localMatrix = split.AD[numpy.ix_(states, states)] + localGain.dot(system.C[numpy.ix_(rows, states)])
        stepper = ImplicitStepper(numpy.diag(system.E)[states], localMatrix, window.step)
        measurementInput = -window.values[:, rows].dot(localGain.T)
        local.append((states, stepper, measurementInput))

    if initialGuess is None:
        previous = numpy.tile(x0, (window.times.size, 1))
    else:
        previous = numpy.array(initialGuess, dtype=float)
        if previous.shape != (window.times.size, system.n):
            raise MeasurementGridMismatchError("initial guess must have shape (%d, %d)" % (window.times.size, system.n))

    iterates = []
    history = []
    converged = False
    coupling = previous.dot(split.AC.T)
    for iteration in range(1, config.maxIterations + 1):
        current = numpy.empty_like(previous)
        for states, stepper, measurementInput in local:
            samples = coupling[:, states] + measurementInput
            current[:, states] = stepper.run(x0[states], _rowForcing(samples, differential[states]))
        newCoupling = current.dot(split.AC.T)
        couplingDelta = float(numpy.abs(newCoupling - coupling).max()) if system.n else 0.0
        stateDelta = float(numpy.abs(current - previous).max()) if system.n else 0.0
        history.append({"iteration": iteration, "couplingDelta": couplingDelta, "stateDelta": stateDelta})
        RelaxationRun.log.debug("relaxation iteration %d coupling delta %g state delta %g", iteration, couplingDelta, stateDelta)
        if keepIterates or not iterates:
            iterates.append(current)
        else:
            iterates[-1] = current
        previous = current
        coupling = newCoupling
        if couplingDelta < config.tolerance:
            converged = True
            break

    if not converged:
        RelaxationRun.log.warning("waveform relaxation did not converge after %d iterations, last coupling delta %g",
                                  config.maxIterations, history[-1]["couplingDelta"])
    return RelaxationRun(config, window, iterates, history, converged)

def detectionTime(allocation, subsystem, window):
    """
    Time a subsystem stays blind to an attack, ``T / m_i``

    :param allocation: connection count per subsystem
    :type allocation: [int]
    :param subsystem: subsystem index
    :type subsystem: int
    :param window: communication window ``T`` in s
    :type window: float
    :rtype: float
    :raises ZeroConnectionsError: if the subsystem has no connections
    """
    connections = allocation[subsystem]
    if connections < 1:
        raise ZeroConnectionsError("subsystem %d has no connections, its detection time is undefined" % subsystem)
    return float(window) / connections
