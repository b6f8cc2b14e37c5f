"""
Copyright (c) IBM 2015-2017. All Rights Reserved.
Project name: c4-infrasec
This project is licensed under the MIT License, see LICENSE

This library integrates descriptor systems under state attack

.. math::

    E \\dot{\\tilde{x}} = A \\tilde{x} + b v

and evaluates the power generation cost deviation the attack causes.

Integration
-----------

:class:`ImplicitStepper` uses a fixed step. Differential rows follow the trapezoidal
rule with the forcing averaged over the step, algebraic rows are enforced at the end
of every step. Algebraic constraints therefore hold exactly at every grid point and
the scheme is A-stable.

.. code-block:: python

    attack = AttackScenario([system.index("gas.S1")], Waveform("pulse", 1.0, 1.0, 4.0), horizon=10.0)
    trajectory = integrateAttacked(system, attack, step=1e-3)
    cost = costDeviation(system, attack, windows=4.0)

Cost deviation
--------------

Each attacked state ``j`` contributes ``sum_i c_i int_0^w_j |dx_i^(j)(t)| dt`` where
``dx^(j)`` is the deviation caused by attacking ``j`` alone and ``w_j`` its integration
window. :class:`CostProfile` holds the cumulative integral for one attacked state so
that any window up to the horizon can be evaluated without integrating again.

Functionality
-------------
"""

import logging
import math

import numpy
import pandas
import scipy.integrate
import scipy.linalg

import c4.infrasec.jsonutil
import c4.infrasec.logutil
from c4.infrasec.exceptions import (HorizonNonpositiveError,
                                    InvalidSpecificationError,
                                    PoleEvaluationError,
                                    SingularStepMatrixError,
                                    WindowExceedsHorizonError)


log = logging.getLogger(__name__)

DEFAULT_STEP = 1e-3
SCHEME = "trapezoidal/implicit-algebraic"
WAVEFORM_KINDS = ("step", "pulse", "sinusoid")

class Waveform(c4.infrasec.jsonutil.JSONSerializable):
    """
    Scalar attack waveform ``v(t)``

    - ``step``: ``magnitude`` from ``start`` on
    - ``pulse``: ``magnitude`` on ``[start, end)``
    - ``sinusoid``: ``magnitude sin(2 pi frequency (t - start))`` from ``start``,
      until ``end`` if given

    :param kind: waveform kind
    :type kind: str
    :param magnitude: magnitude ``v_0``
    :type magnitude: float
    :param start: onset time in s
    :type start: float
    :param end: end time in s
    :type end: float
    :param frequency: frequency in Hz, sinusoid only
    :type frequency: float
    """
    def __init__(self, kind="step", magnitude=1.0, start=0.0, end=None, frequency=None):
        if kind not in WAVEFORM_KINDS:
            raise InvalidSpecificationError("unknown waveform kind '%s', expected one of %s" % (kind, ", ".join(WAVEFORM_KINDS)))
        self.kind = kind
        self.magnitude = float(magnitude)
        self.start = float(start)
        self.end = None if end is None else float(end)
        self.frequency = None if frequency is None else float(frequency)
        if not (math.isfinite(self.magnitude) and math.isfinite(self.start)):
            raise InvalidSpecificationError("waveform magnitude and start must be finite")
        if self.kind == "pulse" and self.end is None:
            raise InvalidSpecificationError("pulse waveform needs an end time")
        if self.end is not None and not self.end > self.start:
            raise InvalidSpecificationError("waveform end %r must be after start %r" % (self.end, self.start))
        if self.kind == "step" and self.end is not None:
            raise InvalidSpecificationError("step waveform has no end time, use a pulse")
        if self.kind == "sinusoid" and not (self.frequency and self.frequency > 0 and math.isfinite(self.frequency)):
            raise InvalidSpecificationError("sinusoid waveform needs a positive frequency")

    @property
    def isNull(self):
        """
        ``True`` if the waveform is identically zero
        """
        return self.magnitude == 0

    def _clip(self, t):
        upper = numpy.inf if self.end is None else self.end
        return numpy.clip(numpy.asarray(t, dtype=float), self.start, upper)

    def integral(self, t):
        """
        Exact integral of the waveform from ``0`` to ``t``

        :param t: time or array of times
        :rtype: :class:`numpy.ndarray`
        """
        elapsed = self._clip(t) - self.start
        if self.kind == "sinusoid":
            omega = 2 * math.pi * self.frequency
            return self.magnitude * (1.0 - numpy.cos(omega * elapsed)) / omega
        return self.magnitude * elapsed

    def value(self, t):
        """
        Waveform value at ``t``

        :param t: time or array of times
        :rtype: :class:`numpy.ndarray`
        """
        t = numpy.asarray(t, dtype=float)
        active = t >= self.start
        if self.end is not None:
            active &= t < self.end
        if self.kind == "sinusoid":
            return numpy.where(active, self.magnitude * numpy.sin(2 * math.pi * self.frequency * (t - self.start)), 0.0)
        return numpy.where(active, self.magnitude, 0.0)

    def average(self, t0, t1):
        """
        Exact average of the waveform over ``[t0, t1]``

        :param t0: interval starts
        :param t1: interval ends
        :rtype: :class:`numpy.ndarray`
        """
        t0 = numpy.asarray(t0, dtype=float)
        t1 = numpy.asarray(t1, dtype=float)
        return (self.integral(t1) - self.integral(t0)) / (t1 - t0)

    def scaled(self, factor):
        """
        Copy of the waveform with the magnitude scaled

        :param factor: factor
        :type factor: float
        :rtype: :class:`Waveform`
        """
        return Waveform(self.kind, factor * self.magnitude, self.start, self.end, self.frequency)

    def rowSignal(self, times, differential):
        """
        Per-step forcing for each row of the stepper: the step average for
        differential rows and the value at the end of the step for algebraic rows

        :param times: time grid
        :param differential: boolean mask of differential rows
        :returns: array of shape ``(steps, n)``
        """
        averages = self.average(times[:-1], times[1:])
        points = self.value(times[1:])
        return numpy.where(numpy.asarray(differential)[None, :], averages[:, None], points[:, None])

    def __eq__(self, other):
        return isinstance(other, Waveform) and self.toJSONSerializable() == other.toJSONSerializable()

    def __ne__(self, other):
        return not self == other

    def __hash__(self):
        return hash((self.kind, self.magnitude, self.start, self.end, self.frequency))

    def __repr__(self):
        return "Waveform(%r, magnitude=%r, start=%r, end=%r, frequency=%r)" % (
            self.kind, self.magnitude, self.start, self.end, self.frequency)

class AttackScenario(c4.infrasec.jsonutil.JSONSerializable):
    """
    State attack on the index set ``kappa`` with a common waveform

    :param states: attacked state indices
    :type states: [int]
    :param waveform: attack waveform, defaults to a unit step at ``0``
    :type waveform: :class:`Waveform`
    :param horizon: maximum horizon in s
    :type horizon: float
    :param maxStates: maximum number of attacked states ``K``
    :type maxStates: int
    :param null: explicitly request the null attack
    :type null: bool
    """
    def __init__(self, states, waveform=None, horizon=1.0, maxStates=None, null=False):
        self.states = tuple(sorted(set(int(state) for state in states)))
        self.waveform = waveform if waveform is not None else Waveform()
        self.horizon = float(horizon)
        if not self.states and not null:
            raise InvalidSpecificationError("an attack needs at least one state, use AttackScenario.null for the null attack")
        if any(state < 0 for state in self.states):
            raise InvalidSpecificationError("attacked state indices must not be negative")
        if maxStates is not None and len(self.states) > maxStates:
            raise InvalidSpecificationError("%d attacked states exceed the maximum of %d" % (len(self.states), maxStates))
        if not self.horizon > 0:
            raise HorizonNonpositiveError("attack horizon must be positive, got %r" % self.horizon)

    @classmethod
    def null(cls, horizon=1.0):
        """
        The attack that attacks nothing

        :param horizon: horizon in s
        :type horizon: float
        :rtype: :class:`AttackScenario`
        """
        return cls([], Waveform(magnitude=0.0), horizon, null=True)

    @property
    def isNull(self):
        """
        ``True`` if the attack has no effect
        """
        return not self.states or self.waveform.isNull

    def inputVector(self, n):
        """
        Attack input vector ``b``

        :param n: number of states
        :type n: int
        :rtype: :class:`numpy.ndarray`
        """
        if self.states and self.states[-1] >= n:
            raise InvalidSpecificationError("attacked state %d does not exist in a system with %d states" % (self.states[-1], n))
        b = numpy.zeros(n)
        b[list(self.states)] = 1.0
        return b

def timeGrid(horizon, step):
    """
    Uniform time grid on ``[0, horizon]``

    :param horizon: horizon in s
    :type horizon: float
    :param step: step in s
    :type step: float
    :rtype: :class:`numpy.ndarray`
    :raises HorizonNonpositiveError: if horizon or step are not positive
    """
    if not (horizon > 0 and step > 0):
        raise HorizonNonpositiveError("horizon %r and step %r must be positive" % (horizon, step))
    steps = int(round(horizon / step))
    if steps < 1 or abs(steps * step - horizon) > 1e-9 * horizon:
        raise InvalidSpecificationError("horizon %r is not a multiple of the step %r" % (horizon, step))
    return numpy.linspace(0.0, horizon, steps + 1)

@c4.infrasec.logutil.ClassLogger
class ImplicitStepper(object):
    """
    Fixed step integrator for ``E dx/dt = A x + f(t)`` with diagonal ``E``

    Every step solves

    .. math::

        (E/h - \\Theta A) x_{k+1} = (E/h + (I - \\Theta) A) x_k + f_k

    with ``Theta = 1/2`` on differential rows and ``Theta = 1`` on algebraic rows.
    The step matrix is factorized once.

    :param E: diagonal matrix ``E`` or its diagonal
    :param A: system matrix
    :param step: step in s
    :type step: float
    :raises SingularStepMatrixError: if the step matrix is not invertible
    """
    def __init__(self, E, A, step):
        e = numpy.diag(E) if numpy.ndim(E) == 2 else numpy.asarray(E, dtype=float)
        A = numpy.asarray(A, dtype=float)
        n = A.shape[0]
        self.step = float(step)
        self.differential = e != 0
        theta = numpy.where(self.differential, 0.5, 1.0)
        left = numpy.diag(e / self.step) - theta[:, None] * A
        right = numpy.diag(e / self.step) + (1.0 - theta)[:, None] * A
        if n and numpy.linalg.cond(left) > 1e12:
            raise SingularStepMatrixError("step matrix E/h - A is not invertible for step %r, reduce the step" % self.step)
        if n:
            factorization = scipy.linalg.lu_factor(left)
            self.transition = scipy.linalg.lu_solve(factorization, right)
            self.inputMatrix = scipy.linalg.lu_solve(factorization, numpy.eye(n))
        else:
            self.transition = numpy.zeros((0, 0))
            self.inputMatrix = numpy.zeros((0, 0))

    def run(self, x0, forcing):
        """
        Integrate from ``x0`` with per-step forcing

        :param x0: initial state
        :param forcing: array of shape ``(steps, n)``, row ``k`` is the forcing of
            step ``k`` as seen by each state equation
        :returns: states of shape ``(steps + 1, n)``
        :rtype: :class:`numpy.ndarray`
        """
        forcing = numpy.asarray(forcing, dtype=float)
        increments = forcing.dot(self.inputMatrix.T)
        states = numpy.empty((forcing.shape[0] + 1, self.transition.shape[0]))
        x = numpy.array(x0, dtype=float)
        states[0] = x
        transition = self.transition
        for k in range(forcing.shape[0]):
            x = transition.dot(x) + increments[k]
            states[k + 1] = x
        return states

    def runUnitInputs(self, columns, signal, observe=None):
        """
        Integrate one zero-initial trajectory per column, each forced on a single row

        :param columns: forced rows, one trajectory each
        :type columns: [int]
        :param signal: array of shape ``(steps, n)`` with the per-row forcing
        :param observe: function reducing the ``(n, m)`` state block of a grid point,
            if ``None`` the full states are returned
        :returns: observations of shape ``(steps + 1, ...)``
        :rtype: :class:`numpy.ndarray`
        """
        columns = list(columns)
        observe = observe or (lambda block: block.copy())
        inputs = self.inputMatrix[:, columns]
        signal = numpy.asarray(signal, dtype=float)[:, columns]
        X = numpy.zeros((self.transition.shape[0], len(columns)))
        observations = [observe(X)]
        transition = self.transition
        for k in range(signal.shape[0]):
            X = transition.dot(X) + inputs * signal[k]
            observations.append(observe(X))
        return numpy.array(observations)

class Trajectory(c4.infrasec.jsonutil.JSONSerializable):
    """
    Sampled state trajectory

    :param times: time grid
    :param states: samples of shape ``(len(times), n)``
    :param labels: state labels
    :type labels: [str]
    :param step: step in s
    :type step: float
    """
    def __init__(self, times, states, labels, step):
        self.times = times
        self.states = states
        self.labels = tuple(labels)
        self.step = step
        self.scheme = SCHEME

    def component(self, label):
        """
        Samples of a single state

        :param label: state label
        :type label: str
        :rtype: :class:`numpy.ndarray`
        """
        return self.states[:, self.labels.index(label)]

    def outputs(self, system):
        """
        Measurements ``y = C x`` on the trajectory grid

        :param system: descriptor system
        :type system: :class:`~c4.infrasec.model.DescriptorSystem`
        :returns: array of shape ``(len(times), p)``
        """
        return self.states.dot(system.C.T)

    def toDataFrame(self):
        """
        Trajectory as a table with a ``t`` column followed by one column per state

        :rtype: :class:`pandas.DataFrame`
        """
        frame = pandas.DataFrame(self.states, columns=list(self.labels))
        frame.insert(0, "t", self.times)
        return frame

class DeviationTrajectory(Trajectory):
    """
    Deviation ``dx(t) = x_attacked(t) - x(t)`` caused by an attack

    :param times: time grid
    :param deviations: samples of shape ``(len(times), n)``
    :param labels: state labels
    :type labels: [str]
    :param step: step in s
    :type step: float
    :param attack: the attack
    :type attack: :class:`AttackScenario`
    """
    def __init__(self, times, deviations, labels, step, attack=None):
        super(DeviationTrajectory, self).__init__(times, deviations, labels, step)
        self.attack = attack

    @property
    def deviations(self):
        """
        Deviation samples
        """
        return self.states

class CostProfile(object):
    """
    Cumulative cost ``int_0^tau sum_i c_i |dx_i(t)| dt`` of attacking a single state

    The integrand is linear between grid points, so every window up to the
    horizon is integrated exactly by the trapezoidal rule.

    :param state: attacked state index
    :type state: int
    :param label: attacked state label
    :type label: str
    :param times: time grid
    :param integrand: cost rate samples
    """
    def __init__(self, state, label, times, integrand):
        self.state = state
        self.label = label
        self.times = numpy.asarray(times, dtype=float)
        self.integrand = numpy.asarray(integrand, dtype=float)
        self.cumulative = scipy.integrate.cumulative_trapezoid(self.integrand, self.times, initial=0.0)

    @property
    def horizon(self):
        """
        Largest window that can be evaluated
        """
        return float(self.times[-1])

    def evaluate(self, window):
        """
        Cost accumulated on ``[0, window]``

        :param window: window upper limit in s
        :type window: float
        :rtype: float
        :raises WindowExceedsHorizonError: if the window is longer than the horizon
        """
        if not window > 0:
            raise InvalidSpecificationError("cost window must be positive, got %r" % window)
        if window > self.horizon * (1.0 + 1e-12):
            raise WindowExceedsHorizonError("window %r exceeds the simulated horizon %r" % (window, self.horizon))
        if window >= self.horizon:
            return float(self.cumulative[-1])
        k = int(numpy.searchsorted(self.times, window, side="right")) - 1
        start = self.times[k]
        fraction = (window - start) / (self.times[k + 1] - start)
        rate = self.integrand[k] + (self.integrand[k + 1] - self.integrand[k]) * fraction
        return float(self.cumulative[k] + 0.5 * (self.integrand[k] + rate) * (window - start))

class CostDeviation(c4.infrasec.jsonutil.JSONSerializable):
    """
    Power generation cost deviation of an attack

    :param total: cost deviation ``dp``
    :type total: float
    :param windows: integration window per attacked state label
    :type windows: dict
    :param breakdown: contribution per attacked state label
    :type breakdown: dict
    """
    def __init__(self, total, windows, breakdown):
        self.total = total
        self.windows = windows
        self.breakdown = breakdown

def attackSignal(system, attack, times):
    """
    Per-step forcing ``b v`` of an attack as seen by each state equation

    :param system: descriptor system
    :type system: :class:`~c4.infrasec.model.DescriptorSystem`
    :param attack: the attack
    :type attack: :class:`AttackScenario`
    :param times: time grid
    :returns: array of shape ``(len(times) - 1, n)``
    """
    differential = numpy.diag(system.E) != 0
    return attack.waveform.rowSignal(times, differential) * attack.inputVector(system.n)[None, :]

def integrateAttacked(system, attack, step=DEFAULT_STEP):
    """
    Integrate ``E d(dx)/dt = A dx + b v(t)`` from ``dx(0) = 0``

    :param system: descriptor system
    :type system: :class:`~c4.infrasec.model.DescriptorSystem`
    :param attack: the attack
    :type attack: :class:`AttackScenario`
    :param step: step in s
    :type step: float
    :rtype: :class:`DeviationTrajectory`
    :raises HorizonNonpositiveError: if the horizon or step are not positive
    :raises SingularStepMatrixError: if the step matrix is singular
    """
    times = timeGrid(attack.horizon, step)
    forcing = attackSignal(system, attack, times)
    if attack.isNull:
        deviations = numpy.zeros((times.size, system.n))
    else:
        deviations = ImplicitStepper(system.E, system.A, step).run(numpy.zeros(system.n), forcing)
    log.debug("integrated attack on %s over %d steps", [system.labels[state] for state in attack.states], times.size - 1)
    return DeviationTrajectory(times, deviations, system.labels, step, attack)

def consistentState(system, differentialValues):
    """
    Complete differential state values with algebraic values satisfying the constraints

    :param system: descriptor system
    :type system: :class:`~c4.infrasec.model.DescriptorSystem`
    :param differentialValues: values of the differential states in state order
    :returns: full state vector
    :rtype: :class:`numpy.ndarray`
    """
    differential = system.differentialStates
    algebraic = system.algebraicStates
    x = numpy.zeros(system.n)
    x[differential] = differentialValues
    if algebraic.size:
        x[algebraic] = -numpy.linalg.solve(system.A[numpy.ix_(algebraic, algebraic)],
                                           system.A[numpy.ix_(algebraic, differential)].dot(x[differential]))
    return x

def simulate(system, x0, attack=None, horizon=None, step=DEFAULT_STEP):
    """
    Integrate the absolute state ``E dx/dt = A x + b v(t)`` from ``x0``

    :param system: descriptor system
    :type system: :class:`~c4.infrasec.model.DescriptorSystem`
    :param x0: initial state, should satisfy the algebraic constraints
    :param attack: optional attack
    :type attack: :class:`AttackScenario`
    :param horizon: horizon in s, defaults to the attack horizon
    :type horizon: float
    :param step: step in s
    :type step: float
    :rtype: :class:`Trajectory`
    """
    if horizon is None:
        if attack is None:
            raise HorizonNonpositiveError("simulation needs a horizon or an attack")
        horizon = attack.horizon
    times = timeGrid(horizon, step)
    x0 = numpy.asarray(x0, dtype=float)
    algebraic = system.algebraicStates
    if algebraic.size:
        violation = numpy.abs(system.A[algebraic].dot(x0)).max()
        if violation > 1e-9:
            log.warning("initial state violates algebraic constraints by %g", violation)
    if attack is None or attack.isNull:
        forcing = numpy.zeros((times.size - 1, system.n))
    else:
        forcing = attackSignal(system, attack, times)
    states = ImplicitStepper(system.E, system.A, step).run(x0, forcing)
    return Trajectory(times, states, system.labels, step)

def costRate(system, trajectory):
    """
    Cost rate ``sum_i c_i |dx_i(t)|`` along a deviation trajectory

    :param system: descriptor system
    :type system: :class:`~c4.infrasec.model.DescriptorSystem`
    :param trajectory: deviation trajectory
    :type trajectory: :class:`DeviationTrajectory`
    :rtype: :class:`numpy.ndarray`
    """
    return numpy.abs(trajectory.states).dot(system.costs)

def runningCost(system, trajectory):
    """
    Running cost deviation ``dp(t)`` of the combined deviation of all attacked states

    :param system: descriptor system
    :type system: :class:`~c4.infrasec.model.DescriptorSystem`
    :param trajectory: deviation trajectory
    :type trajectory: :class:`DeviationTrajectory`
    :rtype: :class:`numpy.ndarray`
    """
    return scipy.integrate.cumulative_trapezoid(costRate(system, trajectory), trajectory.times, initial=0.0)

def costProfiles(system, states, waveform, horizon, step=DEFAULT_STEP):
    """
    Cost profiles of attacking each of the given states alone

    :param system: descriptor system
    :type system: :class:`~c4.infrasec.model.DescriptorSystem`
    :param states: attacked state indices
    :type states: [int]
    :param waveform: attack waveform
    :type waveform: :class:`Waveform`
    :param horizon: horizon in s
    :type horizon: float
    :param step: step in s
    :type step: float
    :returns: profile by state index
    :rtype: dict
    """
    states = [int(state) for state in states]
    for state in states:
        if not 0 <= state < system.n:
            raise InvalidSpecificationError("attacked state %d does not exist in a system with %d states" % (state, system.n))
    times = timeGrid(horizon, step)
    if not states:
        return {}
    if waveform.isNull:
        integrands = numpy.zeros((times.size, len(states)))
    else:
        stepper = ImplicitStepper(system.E, system.A, step)
        signal = waveform.rowSignal(times, stepper.differential)
        costs = system.costs
        integrands = stepper.runUnitInputs(states, signal, lambda block: costs.dot(numpy.abs(block)))
    log.debug("computed cost profiles of %d states over %d steps", len(states), times.size - 1)
    return {state: CostProfile(state, system.labels[state], times, integrands[:, position])
            for position, state in enumerate(states)}

def costDeviation(system, attack, windows, step=DEFAULT_STEP, profiles=None):
    """
    Cost deviation of an attack where every attacked state is integrated over its own window

    :param system: descriptor system
    :type system: :class:`~c4.infrasec.model.DescriptorSystem`
    :param attack: the attack
    :type attack: :class:`AttackScenario`
    :param windows: window upper limit per attacked state, either a single value,
        a sequence aligned with ``attack.states`` or a dictionary by state index
    :param step: step in s
    :type step: float
    :param profiles: precomputed cost profiles by state index
    :type profiles: dict
    :rtype: :class:`CostDeviation`
    :raises WindowExceedsHorizonError: if a window is longer than the attack horizon
    """
    if isinstance(windows, dict):
        limits = [float(windows[state]) for state in attack.states]
    elif numpy.ndim(windows) == 0:
        limits = [float(windows)] * len(attack.states)
    else:
        limits = [float(window) for window in windows]
        if len(limits) != len(attack.states):
            raise InvalidSpecificationError("%d windows given for %d attacked states" % (len(limits), len(attack.states)))
    for window in limits:
        if not window > 0:
            raise InvalidSpecificationError("cost window must be positive, got %r" % window)
        if window > attack.horizon * (1.0 + 1e-12):
            raise WindowExceedsHorizonError("window %r exceeds the attack horizon %r" % (window, attack.horizon))

    attack.inputVector(system.n)
    labels = [system.labels[state] for state in attack.states]
    if attack.isNull:
        return CostDeviation(0.0, dict(zip(labels, limits)), {label: 0.0 for label in labels})
    if profiles is None:
        profiles = costProfiles(system, attack.states, attack.waveform, attack.horizon, step)
    breakdown = {}
    for state, label, window in zip(attack.states, labels, limits):
        breakdown[label] = profiles[state].evaluate(window)
    total = float(sum(breakdown[label] for label in labels))
    return CostDeviation(total, dict(zip(labels, limits)), breakdown)

def transferDeviation(system, j, i, s):
    """
    Transfer from an attack on state ``j`` to the deviation of state ``i``
    by Cramer's rule, the entry ``(i, j)`` of ``(sE - A)^-1``

    :param system: descriptor system
    :type system: :class:`~c4.infrasec.model.DescriptorSystem`
    :param j: attacked state index
    :type j: int
    :param i: observed state index
    :type i: int
    :param s: Laplace variable
    :type s: complex
    :rtype: complex
    :raises PoleEvaluationError: if ``s`` is a pencil eigenvalue
    """
    pencil = complex(s) * system.E - system.A
    if numpy.linalg.cond(pencil) > 1e12:
        raise PoleEvaluationError("s = %s is a generalized eigenvalue of the pencil" % s)
    determinant = numpy.linalg.det(pencil)
    minor = numpy.delete(numpy.delete(pencil, j, axis=0), i, axis=1)
    return complex((-1) ** (i + j) * numpy.linalg.det(minor) / determinant)
