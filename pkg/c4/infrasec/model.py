"""
Copyright (c) IBM 2015-2017. All Rights Reserved.
Project name: c4-infrasec
This project is licensed under the MIT License, see LICENSE

This library assembles the interconnected gas-power-water descriptor system

.. math::

    E \\dot{x} = A x, \\quad y = C x

from declarative component specifications.

The electric system follows the linear swing model with phase angles ``delta``,
angular speeds ``omega`` and algebraic bus angles ``theta``. Gas and water networks
contribute one head pressure state per storage unit (differential, charging ratio
on the diagonal of ``E``) and per junction (algebraic). Supplies such as gas wells
and reservoirs have constant heads and are boundary conditions, not states.

The nonlinear pipe and compressor flow laws enter the system through their first
order Taylor coefficients around the operating point heads.

.. code-block:: python

    system = assemble(power, gas, water, coupling, partition, costs)
    split = splitBlockDiagonal(system)

State ordering
--------------

States are ordered as generator angles, generator speeds (gas-fired generators
first in both), compressor bus angles, treatment bus angles, other bus angles, gas
storages, gas junctions, water storages and water junctions. Labels are
``delta.<generator>``, ``omega.<generator>``, ``theta.<bus>``, ``gas.<node>`` and
``water.<node>``.

Functionality
-------------
"""

import collections
import enum
import logging

import numpy
import scipy.linalg

import c4.infrasec.jsonutil
import c4.infrasec.logutil
from c4.infrasec.exceptions import (CompressorSingularError,
                                    InvalidSpecificationError,
                                    IrregularPencilError,
                                    PartitionMismatchError,
                                    UnstableSystemError,
                                    ZeroPressureDropError)


log = logging.getLogger(__name__)

GAS_EXPONENT = 2.0
WATER_EXPONENT = 1.85
STABILITY_THRESHOLD = -1e-9
FINITE_DIFFERENCE_STEP = 1e-6
FINITE_DIFFERENCE_TOLERANCE = 1e-5
ELECTRIC_CLASSES = ("delta", "omega", "theta")

class FuelClass(enum.Enum):
    """
    Fuel class of a generator
    """
    GAS = "gas"
    OTHER = "other"

class BusClass(enum.Enum):
    """
    Load bus class, ordered as the bus angle blocks of the state vector
    """
    COMPRESSOR = "compressor"
    TREATMENT = "treatment"
    LOAD = "load"

class FluidKind(enum.Enum):
    """
    Kind of fluid network
    """
    GAS = "gas"
    WATER = "water"

def _positive(value, what):
    value = float(value)
    if not numpy.isfinite(value) or value <= 0:
        raise InvalidSpecificationError("%s must be positive and finite, got %r" % (what, value))
    return value

def _finite(value, what):
    value = float(value)
    if not numpy.isfinite(value):
        raise InvalidSpecificationError("%s must be finite, got %r" % (what, value))
    return value

class Generator(object):
    """
    Synchronous generator of the swing model

    :param name: name
    :type name: str
    :param inertia: inertia constant, diagonal entry of ``M`` in s^2 pu
    :type inertia: float
    :param damping: damping coefficient, diagonal entry of ``D`` in pu
    :type damping: float
    :param fuel: fuel class
    :type fuel: :class:`FuelClass`
    """
    def __init__(self, name, inertia, damping, fuel=FuelClass.OTHER):
        self.name = name
        self.inertia = _positive(inertia, "inertia of generator '%s'" % name)
        self.damping = _finite(damping, "damping of generator '%s'" % name)
        if self.damping < 0:
            raise InvalidSpecificationError("damping of generator '%s' must not be negative" % name)
        self.fuel = FuelClass(fuel)

class Bus(object):
    """
    Load bus

    :param name: name
    :type name: str
    :param kind: bus class
    :type kind: :class:`BusClass`
    """
    def __init__(self, name, kind=BusClass.LOAD):
        self.name = name
        self.kind = BusClass(kind)

class PowerSpec(object):
    """
    Electric power system of the linear swing model

    Susceptance blocks are given in the declaration order of ``generators``
    and ``buses``.

    :param generators: generators
    :type generators: [:class:`Generator`]
    :param buses: load buses
    :type buses: [:class:`Bus`]
    :param Lgg: generator to generator susceptance
    :param Lgl: generator to load susceptance
    :param Llg: load to generator susceptance
    :param Lll: load to load susceptance
    :raises InvalidSpecificationError: if names repeat or blocks are inconsistent
    """
    def __init__(self, generators, buses=None, Lgg=None, Lgl=None, Llg=None, Lll=None):
        self.generators = list(generators)
        self.buses = list(buses or [])
        names = [generator.name for generator in self.generators] + [bus.name for bus in self.buses]
        duplicates = sorted(name for name, count in collections.Counter(names).items() if count > 1)
        if duplicates:
            raise InvalidSpecificationError("duplicate electric component names %s" % duplicates)
        g = len(self.generators)
        l = len(self.buses)
        self.Lgg = self._block(Lgg, (g, g), "Lgg")
        self.Lgl = self._block(Lgl, (g, l), "Lgl")
        self.Llg = self._block(Llg, (l, g), "Llg")
        self.Lll = self._block(Lll, (l, l), "Lll")

    @staticmethod
    def _block(matrix, shape, name):
        if matrix is None:
            if 0 in shape:
                return numpy.zeros(shape)
            raise InvalidSpecificationError("susceptance block %s of shape %s is missing" % (name, shape))
        block = numpy.array(matrix, dtype=float)
        if block.size == 0 and 0 in shape:
            return numpy.zeros(shape)
        if block.shape != shape:
            raise InvalidSpecificationError("susceptance block %s has shape %s, expected %s" % (name, block.shape, shape))
        if not numpy.all(numpy.isfinite(block)):
            raise InvalidSpecificationError("susceptance block %s has non-finite entries" % name)
        return block

    @property
    def orderedGenerators(self):
        """
        Generators in state order, gas-fired first
        """
        return ([generator for generator in self.generators if generator.fuel == FuelClass.GAS] +
                [generator for generator in self.generators if generator.fuel != FuelClass.GAS])

    @property
    def orderedBuses(self):
        """
        Buses in state order, compressor then treatment then other load buses
        """
        return [bus for kind in BusClass for bus in self.buses if bus.kind == kind]

class SupplyNode(object):
    """
    Fixed head supply such as a gas well or reservoir

    :param name: name
    :type name: str
    :param head: constant head pressure
    :type head: float
    """
    def __init__(self, name, head):
        self.name = name
        self.head = _positive(head, "head of supply '%s'" % name)

class StorageNode(object):
    """
    Storage junction with head dynamics ``R_r dh/dt = inflow - outflow``

    :param name: name
    :type name: str
    :param head: operating point head pressure
    :type head: float
    :param chargingRatio: charging ratio ``R_r``
    :type chargingRatio: float
    """
    def __init__(self, name, head, chargingRatio):
        self.name = name
        self.head = _positive(head, "head of storage '%s'" % name)
        self.chargingRatio = _positive(chargingRatio, "charging ratio of storage '%s'" % name)

class JunctionNode(object):
    """
    Demand junction, an algebraic flow balance

    :param name: name
    :type name: str
    :param head: operating point head pressure
    :type head: float
    :param demand: static demand, folded into the operating point
    :type demand: float
    """
    def __init__(self, name, head, demand=0.0):
        self.name = name
        self.head = _positive(head, "head of junction '%s'" % name)
        self.demand = _finite(demand, "demand of junction '%s'" % name)

class Pipe(object):
    """
    Pipeline from ``source`` to ``target``, flow is positive from source to target

    :param name: name
    :type name: str
    :param source: source node name
    :type source: str
    :param target: target node name
    :type target: str
    :param constant: pipeline constant ``C_ij``
    :type constant: float
    """
    def __init__(self, name, source, target, constant):
        self.name = name
        self.source = source
        self.target = target
        self.constant = _positive(constant, "constant of pipe '%s'" % name)

class Compressor(object):
    """
    Gas compressor between ``source`` and ``target``

    :param name: name
    :type name: str
    :param source: source node name
    :type source: str
    :param target: target node name
    :type target: str
    :param power: power demand ``P_c`` at the operating point
    :type power: float
    :param k1: design parameter
    :type k1: float
    :param k2: design parameter
    :type k2: float
    :param alpha: design exponent
    :type alpha: float
    """
    def __init__(self, name, source, target, power, k1, k2, alpha):
        self.name = name
        self.source = source
        self.target = target
        self.power = _finite(power, "power of compressor '%s'" % name)
        self.k1 = _finite(k1, "k1 of compressor '%s'" % name)
        self.k2 = _finite(k2, "k2 of compressor '%s'" % name)
        self.alpha = _finite(alpha, "alpha of compressor '%s'" % name)

class TreatmentPlant(object):
    """
    Water treatment plant drawing electric power proportional to the head at its node

    :param name: name
    :type name: str
    :param node: water node name
    :type node: str
    :param powerPerHead: electric power per unit head
    :type powerPerHead: float
    """
    def __init__(self, name, node, powerPerHead):
        self.name = name
        self.node = node
        self.powerPerHead = _finite(powerPerHead, "power per head of treatment plant '%s'" % name)

class FluidSpec(object):
    """
    Gas or water network

    :param kind: fluid kind
    :type kind: :class:`FluidKind`
    :param supplies: fixed head supplies
    :type supplies: [:class:`SupplyNode`]
    :param storages: storage junctions
    :type storages: [:class:`StorageNode`]
    :param junctions: demand junctions
    :type junctions: [:class:`JunctionNode`]
    :param pipes: pipelines
    :type pipes: [:class:`Pipe`]
    :param compressors: compressors, gas only
    :type compressors: [:class:`Compressor`]
    :param treatmentPlants: treatment plants, water only
    :type treatmentPlants: [:class:`TreatmentPlant`]
    :param exponent: flow exponent, ``2`` for gas and ``1.85`` for water by default
    :type exponent: float
    :raises InvalidSpecificationError: if references are dangling or names repeat
    """
    def __init__(self, kind, supplies=None, storages=None, junctions=None, pipes=None,
                 compressors=None, treatmentPlants=None, exponent=None):
        self.kind = FluidKind(kind)
        self.supplies = list(supplies or [])
        self.storages = list(storages or [])
        self.junctions = list(junctions or [])
        self.pipes = list(pipes or [])
        self.compressors = list(compressors or [])
        self.treatmentPlants = list(treatmentPlants or [])
        if exponent is None:
            exponent = GAS_EXPONENT if self.kind == FluidKind.GAS else WATER_EXPONENT
        self.exponent = _positive(exponent, "%s flow exponent" % self.kind.value)

        if self.compressors and self.kind != FluidKind.GAS:
            raise InvalidSpecificationError("compressors are only supported in gas networks")
        if self.treatmentPlants and self.kind != FluidKind.WATER:
            raise InvalidSpecificationError("treatment plants are only supported in water networks")

        names = [node.name for node in self.nodes] + [element.name for element in self.elements + self.treatmentPlants]
        duplicates = sorted(name for name, count in collections.Counter(names).items() if count > 1)
        if duplicates:
            raise InvalidSpecificationError("duplicate %s component names %s" % (self.kind.value, duplicates))
        nodes = self.nodesByName
        for element in self.elements:
            for endpoint in (element.source, element.target):
                if endpoint not in nodes:
                    raise InvalidSpecificationError("'%s' references unknown %s node '%s'" % (element.name, self.kind.value, endpoint))
            if element.source == element.target:
                raise InvalidSpecificationError("'%s' connects node '%s' to itself" % (element.name, element.source))
        for plant in self.treatmentPlants:
            if plant.node not in nodes:
                raise InvalidSpecificationError("treatment plant '%s' references unknown water node '%s'" % (plant.name, plant.node))

    @property
    def elements(self):
        """
        Pipes and compressors
        """
        return self.pipes + self.compressors

    @property
    def nodes(self):
        """
        All nodes, supplies first
        """
        return self.supplies + self.storages + self.junctions

    @property
    def nodesByName(self):
        """
        Node by name mapping
        """
        return {node.name: node for node in self.nodes}

    @property
    def stateNodes(self):
        """
        Nodes that carry a head pressure state, storages then junctions
        """
        return self.storages + self.junctions

class CouplingEntry(object):
    """
    A single proportional coupling between infrastructures

    :param source: coupled element, a fluid node, compressor or treatment plant
    :type source: str
    :param target: generator or bus name
    :type target: str
    :param coefficient: proportionality coefficient
    :type coefficient: float
    """
    def __init__(self, source, target, coefficient):
        self.source = source
        self.target = target
        self.coefficient = _finite(coefficient, "coupling coefficient of '%s' -> '%s'" % (source, target))

class CouplingSpec(object):
    """
    Interdependence between the electric system and the gas and water networks

    :param gasToGenerator: gas node feeding each gas-fired generator
    :type gasToGenerator: [:class:`CouplingEntry`]
    :param waterToGenerator: water node feeding generators
    :type waterToGenerator: [:class:`CouplingEntry`]
    :param compressorToBus: bus powering each compressor
    :type compressorToBus: [:class:`CouplingEntry`]
    :param treatmentToBus: bus powering each treatment plant
    :type treatmentToBus: [:class:`CouplingEntry`]
    """
    def __init__(self, gasToGenerator=None, waterToGenerator=None, compressorToBus=None, treatmentToBus=None):
        self.gasToGenerator = list(gasToGenerator or [])
        self.waterToGenerator = list(waterToGenerator or [])
        self.compressorToBus = list(compressorToBus or [])
        self.treatmentToBus = list(treatmentToBus or [])

    @property
    def isEmpty(self):
        """
        ``True`` if there is no coupling entry at all
        """
        return not (self.gasToGenerator or self.waterToGenerator or self.compressorToBus or self.treatmentToBus)

    def scaled(self, factor):
        """
        Copy of the coupling with all coefficients scaled, ``scaled(0)`` decouples
        the infrastructures while keeping the structure

        :param factor: scale factor
        :type factor: float
        :rtype: :class:`CouplingSpec`
        """
        def scale(entries):
            return [CouplingEntry(entry.source, entry.target, factor * entry.coefficient) for entry in entries]
        return CouplingSpec(scale(self.gasToGenerator), scale(self.waterToGenerator),
                            scale(self.compressorToBus), scale(self.treatmentToBus))

    def validate(self, power, gas, water):
        """
        Validate the coupling against the component specifications

        Each map is either empty or complete: every gas-fired generator has exactly
        one gas supply entry, every compressor and treatment plant exactly one bus.

        :raises InvalidSpecificationError: on dangling references or incomplete maps
        """
        generators = {generator.name: generator for generator in power.generators}
        buses = {bus.name: bus for bus in power.buses}

        def checkNodes(entries, fluid, what):
            stateNodes = {node.name for node in fluid.stateNodes}
            for entry in entries:
                if entry.source not in stateNodes:
                    raise InvalidSpecificationError("%s coupling references '%s' which is not a %s storage or junction"
                                                    % (what, entry.source, fluid.kind.value))
                if entry.target not in generators:
                    raise InvalidSpecificationError("%s coupling references unknown generator '%s'" % (what, entry.target))

        checkNodes(self.gasToGenerator, gas, "gas")
        checkNodes(self.waterToGenerator, water, "water")
        for entry in self.gasToGenerator:
            if generators[entry.target].fuel != FuelClass.GAS:
                raise InvalidSpecificationError("generator '%s' receives gas but is not gas-fired" % entry.target)
        if self.gasToGenerator:
            counts = collections.Counter(entry.target for entry in self.gasToGenerator)
            for generator in power.generators:
                if generator.fuel == FuelClass.GAS and counts[generator.name] != 1:
                    raise InvalidSpecificationError("gas-fired generator '%s' needs exactly one gas supply entry, found %d"
                                                    % (generator.name, counts[generator.name]))

        def checkBuses(entries, elements, what):
            names = {element.name for element in elements}
            for entry in entries:
                if entry.source not in names:
                    raise InvalidSpecificationError("unknown %s '%s' in bus coupling" % (what, entry.source))
                if entry.target not in buses:
                    raise InvalidSpecificationError("%s '%s' references unknown bus '%s'" % (what, entry.source, entry.target))
            if entries:
                counts = collections.Counter(entry.source for entry in entries)
                for name in sorted(names):
                    if counts[name] != 1:
                        raise InvalidSpecificationError("%s '%s' needs exactly one bus entry, found %d" % (what, name, counts[name]))

        checkBuses(self.compressorToBus, gas.compressors, "compressor")
        checkBuses(self.treatmentToBus, water.treatmentPlants, "treatment plant")

class FlowLinearization(c4.infrasec.jsonutil.JSONSerializable):
    """
    First order Taylor coefficients of a pipe or compressor flow law

    :param name: element name
    :type name: str
    :param kind: ``pipe`` or ``compressor``
    :type kind: str
    :param source: source node
    :type source: str
    :param target: target node
    :type target: str
    :param flow: operating point flow from source to target
    :type flow: float
    :param flowPartials: ``(dQ/dh_source, dQ/dh_target)``
    :type flowPartials: tuple
    :param powerPartials: compressor electric demand partials ``(dP/dh_source, dP/dh_target)``
    :type powerPartials: tuple
    """
    def __init__(self, name, kind, source, target, flow, flowPartials, powerPartials=None):
        self.name = name
        self.kind = kind
        self.source = source
        self.target = target
        self.flow = flow
        self.flowPartials = tuple(flowPartials)
        self.powerPartials = tuple(powerPartials) if powerPartials is not None else None

def _pipeFlow(constant, exponent, squared, hi, hj):
    drop = hi * hi - hj * hj if squared else hi - hj
    return numpy.sign(drop) * constant * abs(drop) ** (1.0 / exponent)

def _compressorDenominator(compressor, hi, hj):
    ratio = max(hi, hj) / min(hi, hj)
    return compressor.k2 - compressor.k1 * ratio ** compressor.alpha

def _compressorFlow(compressor, hi, hj):
    sign = 1.0 if hi >= hj else -1.0
    return sign * compressor.power / _compressorDenominator(compressor, hi, hj)

def _centralDifference(function, hi, hj):
    stepI = FINITE_DIFFERENCE_STEP * max(1.0, abs(hi))
    stepJ = FINITE_DIFFERENCE_STEP * max(1.0, abs(hj))
    return ((function(hi + stepI, hj) - function(hi - stepI, hj)) / (2 * stepI),
            (function(hi, hj + stepJ) - function(hi, hj - stepJ)) / (2 * stepJ))

def _verify(name, analytic, numeric):
    for a, b in zip(analytic, numeric):
        if abs(a - b) > FINITE_DIFFERENCE_TOLERANCE * max(abs(a), 1e-12):
            log.warning("linearization of '%s' differs from central differences: %r vs %r", name, analytic, numeric)
            return False
    return True

def linearizeCoupling(fluid, kind=None):
    """
    Linearize the pipe and compressor flow laws of a network around its operating point

    Gas pipes follow ``Q = sgn C sqrt(|h_i^2 - h_j^2|)``, water pipes
    ``Q = sgn C |h_i - h_j|^(1/1.85)`` and compressors
    ``Q = sgn P_c / (k_2 - k_1 (max/min)^alpha)``. Compressors additionally report
    the partials of their electric demand ``P_c = Q (k_2 - k_1 (max/min)^alpha)``
    at constant operating flow. All coefficients are checked against central
    differences and a warning is logged on mismatch.

    :param fluid: network specification
    :type fluid: :class:`FluidSpec`
    :param kind: fluid kind, defaults to the kind of ``fluid``
    :type kind: :class:`FluidKind`
    :returns: one record per pipe followed by one per compressor
    :rtype: [:class:`FlowLinearization`]
    :raises ZeroPressureDropError: if an element has equal operating heads
    :raises CompressorSingularError: if a compressor denominator vanishes
    """
    kind = FluidKind(kind) if kind is not None else fluid.kind
    squared = kind == FluidKind.GAS
    heads = {node.name: node.head for node in fluid.nodes}
    linearizations = []

    for pipe in fluid.pipes:
        hi = heads[pipe.source]
        hj = heads[pipe.target]
        drop = hi * hi - hj * hj if squared else hi - hj
        if drop == 0:
            raise ZeroPressureDropError("pipe '%s' has equal operating heads %r at both ends" % (pipe.name, hi))
        scale = pipe.constant * (1.0 / fluid.exponent) * abs(drop) ** (1.0 / fluid.exponent - 1.0)
        if squared:
            partials = (scale * 2.0 * hi, -scale * 2.0 * hj)
        else:
            partials = (scale, -scale)
        flow = _pipeFlow(pipe.constant, fluid.exponent, squared, hi, hj)
        _verify(pipe.name, partials,
                _centralDifference(lambda a, b, pipe=pipe: _pipeFlow(pipe.constant, fluid.exponent, squared, a, b), hi, hj))
        linearizations.append(FlowLinearization(pipe.name, "pipe", pipe.source, pipe.target, flow, partials))

    for compressor in fluid.compressors:
        hi = heads[compressor.source]
        hj = heads[compressor.target]
        if hi == hj:
            raise ZeroPressureDropError("compressor '%s' has equal operating heads %r at both ends" % (compressor.name, hi))
        ratio = max(hi, hj) / min(hi, hj)
        denominator = _compressorDenominator(compressor, hi, hj)
        if abs(denominator) <= 1e-12 * max(abs(compressor.k2), abs(compressor.k1 * ratio ** compressor.alpha), 1e-300):
            raise CompressorSingularError("compressor '%s' flow law denominator vanishes at the operating point" % compressor.name)
        if hi > hj:
            sign = 1.0
            ratioPartials = (1.0 / hj, -hi / (hj * hj))
        else:
            sign = -1.0
            ratioPartials = (-hj / (hi * hi), 1.0 / hi)
        slope = compressor.k1 * compressor.alpha * ratio ** (compressor.alpha - 1.0)
        flowPartials = tuple(sign * compressor.power * slope * partial / denominator ** 2 for partial in ratioPartials)
        powerPartials = tuple(-(compressor.power / denominator) * slope * partial for partial in ratioPartials)
        flow = _compressorFlow(compressor, hi, hj)
        _verify(compressor.name, flowPartials,
                _centralDifference(lambda a, b, compressor=compressor: _compressorFlow(compressor, a, b), hi, hj))
        linearizations.append(FlowLinearization(compressor.name, "compressor", compressor.source, compressor.target,
                                                flow, flowPartials, powerPartials))
    return linearizations

def pencilEigenvalues(E, A):
    """
    Finite generalized eigenvalues of the pencil ``sE - A`` with diagonal ``E``

    If the algebraic block of ``A`` is invertible the system has index one and the
    eigenvalues are those of the Schur complement, otherwise the QZ algorithm is
    used and infinite eigenvalues are dropped.

    :param E: diagonal matrix ``E``
    :type E: :class:`numpy.ndarray`
    :param A: matrix ``A``
    :type A: :class:`numpy.ndarray`
    :returns: finite eigenvalues sorted by decreasing real part
    :rtype: :class:`numpy.ndarray`
    """
    e = numpy.diag(E)
    differential = numpy.flatnonzero(e != 0)
    algebraic = numpy.flatnonzero(e == 0)
    if differential.size == 0:
        return numpy.zeros(0, dtype=complex)
    if algebraic.size == 0:
        eigenvalues = scipy.linalg.eigvals(A / e[:, None])
    else:
        Aaa = A[numpy.ix_(algebraic, algebraic)]
        if numpy.linalg.cond(Aaa) < 1e12:
            reduced = (A[numpy.ix_(differential, differential)] -
                       A[numpy.ix_(differential, algebraic)].dot(
                           numpy.linalg.solve(Aaa, A[numpy.ix_(algebraic, differential)])))
            eigenvalues = scipy.linalg.eigvals(reduced / e[differential][:, None])
        else:
            alpha, beta = scipy.linalg.eig(A, E, right=False, homogeneous_eigvals=True)
            finite = numpy.abs(beta) > 1e-12 * numpy.maximum(numpy.abs(alpha), 1.0)
            eigenvalues = alpha[finite] / beta[finite]
    eigenvalues = numpy.asarray(eigenvalues, dtype=complex)
    return eigenvalues[numpy.lexsort((eigenvalues.imag, -eigenvalues.real))]

def isRegularPencil(E, A):
    """
    Check whether ``det(sE - A)`` is not identically zero

    :param E: diagonal matrix ``E``
    :type E: :class:`numpy.ndarray`
    :param A: matrix ``A``
    :type A: :class:`numpy.ndarray`
    :rtype: bool
    """
    n = A.shape[0]
    if n == 0:
        return True
    for s in (0.37 + 1.1j, -1.3 + 0.4j, 2.9 - 0.7j):
        singularValues = numpy.linalg.svd(s * E - A, compute_uv=False)
        if singularValues[-1] > 1e-13 * max(singularValues[0], 1.0):
            return True
    return False

@c4.infrasec.logutil.ClassLogger
class DescriptorSystem(c4.infrasec.jsonutil.JSONSerializable):
    """
    Linear descriptor system ``E dx/dt = A x``, ``y = C x`` with labeled states,
    a partition into subsystems and per-state cost coefficients

    Instances are immutable, all arrays are read-only. Use :func:`assemble` or
    :meth:`fromMatrices` to construct systems, both check pencil regularity and
    asymptotic stability.

    :param E: diagonal matrix
    :param A: system matrix
    :param C: output matrix selecting the measured states
    :param labels: state labels
    :type labels: [str]
    :param stateClasses: per state ``delta``, ``omega``, ``theta``, ``gas`` or ``water``
    :type stateClasses: [str]
    :param subsystemNames: subsystem names
    :type subsystemNames: [str]
    :param partition: subsystem index per state
    :param costs: cost coefficient per state, zero outside the electric states
    """
    def __init__(self, E, A, C, labels, stateClasses, subsystemNames, partition, costs):
        self.E = self._frozen(E, float)
        self.A = self._frozen(A, float)
        self.C = self._frozen(C, float)
        self.labels = tuple(labels)
        self.stateClasses = tuple(stateClasses)
        self.subsystemNames = tuple(subsystemNames)
        self.partition = self._frozen(partition, int)
        self.costs = self._frozen(costs, float)

        n = self.A.shape[0]
        if self.A.shape != (n, n) or self.E.shape != (n, n):
            raise InvalidSpecificationError("E and A must be square of the same dimension")
        if numpy.count_nonzero(self.E - numpy.diag(numpy.diag(self.E))):
            raise InvalidSpecificationError("E must be diagonal")
        if self.C.ndim != 2 or self.C.shape[1] != n:
            raise InvalidSpecificationError("C must have %d columns" % n)
        if len(self.labels) != n or len(set(self.labels)) != n:
            raise InvalidSpecificationError("%d distinct state labels expected" % n)
        if len(self.stateClasses) != n or self.costs.shape != (n,):
            raise InvalidSpecificationError("state classes and costs must cover all %d states" % n)
        if self.partition.shape != (n,):
            raise PartitionMismatchError("partition must assign each of the %d states to a subsystem" % n)
        if n and (self.partition.min() < 0 or self.partition.max() >= len(self.subsystemNames)):
            raise PartitionMismatchError("partition references unknown subsystems")
        empty = [name for index, name in enumerate(self.subsystemNames) if not numpy.any(self.partition == index)]
        if empty:
            raise PartitionMismatchError("subsystems %s contain no states" % empty)
        measured = numpy.flatnonzero(numpy.any(self.C != 0, axis=0))
        for row in self.C:
            if len(set(self.partition[numpy.flatnonzero(row)])) > 1:
                raise InvalidSpecificationError("each output must measure states of a single subsystem")

        if not isRegularPencil(self.E, self.A):
            raise IrregularPencilError("the pencil sE - A is singular for all s")
        self.eigenvalues = self._frozen(pencilEigenvalues(self.E, self.A), complex)
        if self.eigenvalues.size and self.eigenvalues[0].real >= STABILITY_THRESHOLD:
            raise UnstableSystemError("the unattacked system is not asymptotically stable", complex(self.eigenvalues[0]))
        self.measuredStates = self._frozen(measured, int)
        self.log.debug("system with %d states, %d subsystems, stability margin %g", n, len(self.subsystemNames), self.stabilityMargin)

    @staticmethod
    def _frozen(array, dtype):
        frozen = numpy.array(array, dtype=dtype)
        frozen.setflags(write=False)
        return frozen

    @classmethod
    def fromMatrices(cls, E, A, C=None, labels=None, partition=None, subsystemNames=None,
                     costs=None, stateClasses=None):
        """
        Build a system directly from matrices

        :param E: diagonal matrix ``E``
        :param A: system matrix
        :param C: output matrix, defaults to the identity
        :param labels: state labels, default ``x0``, ``x1``, ...
        :param partition: subsystem index per state, defaults to one subsystem
        :param subsystemNames: subsystem names, default ``S0``, ``S1``, ...
        :param costs: cost coefficients, default ones
        :param stateClasses: state classes, default ``omega`` (electric) for all states
        :rtype: :class:`DescriptorSystem`
        """
        A = numpy.array(A, dtype=float)
        n = A.shape[0]
        if C is None:
            C = numpy.eye(n)
        if labels is None:
            labels = ["x%d" % index for index in range(n)]
        if partition is None:
            partition = numpy.zeros(n, dtype=int)
        partition = numpy.asarray(partition, dtype=int)
        if subsystemNames is None:
            subsystemNames = ["S%d" % index for index in range(int(partition.max()) + 1 if n else 0)]
        if costs is None:
            costs = numpy.ones(n)
        if stateClasses is None:
            stateClasses = ["omega"] * n
        return cls(E, A, C, labels, stateClasses, subsystemNames, partition, costs)

    @property
    def n(self):
        """
        Number of states
        """
        return self.A.shape[0]

    @property
    def subsystemCount(self):
        """
        Number of subsystems ``N``
        """
        return len(self.subsystemNames)

    @property
    def differentialStates(self):
        """
        Indices of states with a nonzero diagonal entry of ``E``
        """
        return numpy.flatnonzero(numpy.diag(self.E) != 0)

    @property
    def algebraicStates(self):
        """
        Indices of states with a zero diagonal entry of ``E``
        """
        return numpy.flatnonzero(numpy.diag(self.E) == 0)

    @property
    def electricStates(self):
        """
        Indices of the electric states
        """
        return numpy.array([index for index, stateClass in enumerate(self.stateClasses)
                            if stateClass in ELECTRIC_CLASSES], dtype=int)

    @property
    def stabilityMargin(self):
        """
        Negated largest real part of the finite pencil eigenvalues
        """
        if self.eigenvalues.size == 0:
            return numpy.inf
        return float(-self.eigenvalues[0].real)

    @property
    def pencilEigenvalues(self):
        """
        Finite pencil eigenvalues sorted by decreasing real part
        """
        return self.eigenvalues

    @property
    def couplingDensity(self):
        """
        Fraction of nonzero entries in the blocks of ``A`` that connect electric
        with gas or water states
        """
        electric = numpy.array([stateClass in ELECTRIC_CLASSES for stateClass in self.stateClasses], dtype=bool)
        if not electric.any() or electric.all():
            return 0.0
        fluid = ~electric
        blocks = [self.A[numpy.ix_(electric, fluid)], self.A[numpy.ix_(fluid, electric)]]
        size = sum(block.size for block in blocks)
        return float(sum(numpy.count_nonzero(block) for block in blocks)) / size

    def index(self, label):
        """
        State index of a label

        :param label: state label
        :type label: str
        :rtype: int
        :raises InvalidSpecificationError: if the label is unknown
        """
        try:
            return self.labels.index(label)
        except ValueError:
            raise InvalidSpecificationError("unknown state '%s'" % label)

    def subsystemStates(self, subsystem):
        """
        State indices of a subsystem

        :param subsystem: subsystem index
        :type subsystem: int
        :rtype: :class:`numpy.ndarray`
        """
        return numpy.flatnonzero(self.partition == subsystem)

    def subsystemOutputs(self, subsystem):
        """
        Output rows that measure states of a subsystem

        :param subsystem: subsystem index
        :type subsystem: int
        :rtype: :class:`numpy.ndarray`
        """
        states = set(self.subsystemStates(subsystem).tolist())
        return numpy.array([row for row in range(self.C.shape[0])
                            if set(numpy.flatnonzero(self.C[row]).tolist()) & states], dtype=int)

    def isElectricSubsystem(self, subsystem):
        """
        ``True`` if all states of the subsystem are electric

        :param subsystem: subsystem index
        :type subsystem: int
        :rtype: bool
        """
        return all(self.stateClasses[index] in ELECTRIC_CLASSES for index in self.subsystemStates(subsystem))

    def toJSONSerializable(self):
        serializableDict = {
            "n": self.n,
            "subsystems": {name: [self.labels[index] for index in self.subsystemStates(position)]
                           for position, name in enumerate(self.subsystemNames)},
            "labels": list(self.labels),
            "E": numpy.diag(self.E).tolist(),
            "A": self.A.tolist(),
            "C": self.C.tolist(),
            "costs": self.costs.tolist(),
            "stabilityMargin": self.stabilityMargin,
            "couplingDensity": self.couplingDensity,
            "eigenvalues": [{"real": float(value.real), "imag": float(value.imag)} for value in self.eigenvalues],
        }
        return serializableDict

class BlockSplit(object):
    """
    Split ``A = A_D + A_C`` into the block-diagonal subsystem part and the coupling

    :param AD: block-diagonal part
    :param AC: coupling part
    :param inNeighbors: per subsystem the subsystems it depends on
    :type inNeighbors: [set]
    :param outNeighbors: per subsystem the subsystems depending on it
    :type outNeighbors: [set]
    """
    def __init__(self, AD, AC, inNeighbors, outNeighbors):
        self.AD = AD
        self.AC = AC
        self.inNeighbors = inNeighbors
        self.outNeighbors = outNeighbors

def splitBlockDiagonal(system):
    """
    Split the system matrix into subsystem blocks and the coupling between subsystems

    :param system: descriptor system
    :type system: :class:`DescriptorSystem`
    :returns: split with ``AD + AC == A`` exactly
    :rtype: :class:`BlockSplit`
    """
    same = system.partition[:, None] == system.partition[None, :]
    AD = numpy.where(same, system.A, 0.0)
    AC = numpy.where(same, 0.0, system.A)
    inNeighbors = [set() for _ in range(system.subsystemCount)]
    outNeighbors = [set() for _ in range(system.subsystemCount)]
    for row, column in zip(*numpy.nonzero(AC)):
        i = int(system.partition[row])
        j = int(system.partition[column])
        inNeighbors[i].add(j)
        outNeighbors[j].add(i)
    for array in (AD, AC):
        array.setflags(write=False)
    return BlockSplit(AD, AC, inNeighbors, outNeighbors)

def stateLayout(power, gas, water):
    """
    State labels, classes and owning component names in state order

    :returns: list of ``(label, stateClass, component)`` tuples
    :rtype: list
    """
    layout = []
    generators = power.orderedGenerators
    for generator in generators:
        layout.append(("delta.%s" % generator.name, "delta", generator.name))
    for generator in generators:
        layout.append(("omega.%s" % generator.name, "omega", generator.name))
    for bus in power.orderedBuses:
        layout.append(("theta.%s" % bus.name, "theta", bus.name))
    for fluid in (gas, water):
        for node in fluid.stateNodes:
            layout.append(("%s.%s" % (fluid.kind.value, node.name), fluid.kind.value, node.name))
    return layout

def costVector(layout, delta=0.0, omega=0.0, theta=0.0, overrides=None):
    """
    Per-state cost coefficients from class defaults and per-label overrides

    :param layout: state layout from :func:`stateLayout`
    :param delta: default for generator angles
    :param omega: default for generator speeds
    :param theta: default for bus angles
    :param overrides: cost by state label
    :type overrides: dict
    :rtype: :class:`numpy.ndarray`
    :raises InvalidSpecificationError: for unknown labels or costs on gas or water states
    """
    defaults = {"delta": delta, "omega": omega, "theta": theta}
    costs = numpy.array([_finite(defaults.get(stateClass, 0.0), "%s cost" % stateClass) for _, stateClass, _ in layout])
    positions = {label: position for position, (label, _, _) in enumerate(layout)}
    for label, value in sorted((overrides or {}).items()):
        if label not in positions:
            raise InvalidSpecificationError("cost override for unknown state '%s'" % label)
        if layout[positions[label]][1] not in ELECTRIC_CLASSES:
            raise InvalidSpecificationError("cost coefficients are only allowed on electric states, not '%s'" % label)
        costs[positions[label]] = _finite(value, "cost of '%s'" % label)
    return costs

def assemble(power, gas, water, coupling, partition, costs, measured=None):
    """
    Assemble the interconnected descriptor system

    :param power: electric system
    :type power: :class:`PowerSpec`
    :param gas: gas network
    :type gas: :class:`FluidSpec`
    :param water: water network
    :type water: :class:`FluidSpec`
    :param coupling: interdependence
    :type coupling: :class:`CouplingSpec`
    :param partition: ordered mapping of subsystem name to component names
    :type partition: :class:`collections.OrderedDict`
    :param costs: cost coefficients, either a vector in state order or a dictionary
        with class defaults ``delta``, ``omega``, ``theta`` and ``overrides``
    :param measured: labels of the measured states, defaults to all states
    :type measured: [str]
    :rtype: :class:`DescriptorSystem`
    :raises PartitionMismatchError: if the partition does not cover each state exactly once
    :raises IrregularPencilError: if the pencil is singular
    :raises UnstableSystemError: if a finite pencil eigenvalue is not in the open left half plane
    """
    if gas.kind != FluidKind.GAS or water.kind != FluidKind.WATER:
        raise InvalidSpecificationError("expected a gas and a water network")
    electricNames = {generator.name for generator in power.generators} | {bus.name for bus in power.buses}
    fluidNames = ({node.name for node in gas.nodes} | {element.name for element in gas.elements} |
                  {node.name for node in water.nodes} | {element.name for element in water.elements + water.treatmentPlants})
    overlap = sorted((electricNames & fluidNames) |
                     ({node.name for node in gas.nodes} & {node.name for node in water.nodes}))
    if overlap:
        raise InvalidSpecificationError("component names must be unique across infrastructures, repeated: %s" % overlap)
    coupling.validate(power, gas, water)

    layout = stateLayout(power, gas, water)
    n = len(layout)
    labels = [label for label, _, _ in layout]
    index = {label: position for position, label in enumerate(labels)}
    E = numpy.zeros((n, n))
    A = numpy.zeros((n, n))

    # electric rows
    generators = power.orderedGenerators
    buses = power.orderedBuses
    generatorOrder = [power.generators.index(generator) for generator in generators]
    busOrder = [power.buses.index(bus) for bus in buses]
    g = len(generators)
    l = len(buses)
    delta = numpy.arange(g)
    omega = g + numpy.arange(g)
    theta = 2 * g + numpy.arange(l)
    E[delta, delta] = 1.0
    A[delta, omega] = 1.0
    E[omega, omega] = [generator.inertia for generator in generators]
    A[numpy.ix_(omega, delta)] = -power.Lgg[numpy.ix_(generatorOrder, generatorOrder)]
    A[omega, omega] = [-generator.damping for generator in generators]
    A[numpy.ix_(omega, theta)] = -power.Lgl[numpy.ix_(generatorOrder, busOrder)]
    A[numpy.ix_(theta, delta)] = -power.Llg[numpy.ix_(busOrder, generatorOrder)]
    A[numpy.ix_(theta, theta)] = -power.Lll[numpy.ix_(busOrder, busOrder)]

    # fluid rows depend only on their own pressures
    linearizations = {}
    for fluid in (gas, water):
        prefix = fluid.kind.value
        for storage in fluid.storages:
            position = index["%s.%s" % (prefix, storage.name)]
            E[position, position] = storage.chargingRatio
        for linearization in linearizeCoupling(fluid):
            linearizations[linearization.name] = linearization
            columns = [index.get("%s.%s" % (prefix, node)) for node in (linearization.source, linearization.target)]
            for node, sign in ((linearization.source, -1.0), (linearization.target, 1.0)):
                row = index.get("%s.%s" % (prefix, node))
                if row is None:
                    continue
                for column, partial in zip(columns, linearization.flowPartials):
                    if column is not None:
                        A[row, column] += sign * partial

    # power injections from gas and water, electric demand of compressors and treatment plants
    for entries, prefix in ((coupling.gasToGenerator, "gas"), (coupling.waterToGenerator, "water")):
        for entry in entries:
            A[index["omega.%s" % entry.target], index["%s.%s" % (prefix, entry.source)]] += entry.coefficient
    for entry in coupling.compressorToBus:
        linearization = linearizations[entry.source]
        row = index["theta.%s" % entry.target]
        for node, partial in zip((linearization.source, linearization.target), linearization.powerPartials):
            column = index.get("gas.%s" % node)
            if column is not None:
                A[row, column] -= entry.coefficient * partial
    plants = {plant.name: plant for plant in water.treatmentPlants}
    for entry in coupling.treatmentToBus:
        plant = plants[entry.source]
        column = index.get("water.%s" % plant.node)
        if column is not None:
            A[index["theta.%s" % entry.target], column] -= entry.coefficient * plant.powerPerHead

    # partition
    owners = collections.defaultdict(list)
    for position, (_, _, component) in enumerate(layout):
        owners[component].append(position)
    subsystemNames = list(partition.keys())
    assignment = numpy.full(n, -1, dtype=int)
    for subsystemIndex, name in enumerate(subsystemNames):
        for component in partition[name]:
            if component not in owners:
                raise PartitionMismatchError("subsystem '%s' references '%s' which owns no state" % (name, component))
            for position in owners[component]:
                if assignment[position] >= 0:
                    raise PartitionMismatchError("state '%s' is assigned to both '%s' and '%s'"
                                                 % (labels[position], subsystemNames[assignment[position]], name))
                assignment[position] = subsystemIndex
    missing = [labels[position] for position in numpy.flatnonzero(assignment < 0)]
    if missing:
        raise PartitionMismatchError("states %s are not assigned to a subsystem" % missing)

    if isinstance(costs, dict):
        costs = costVector(layout, **costs)
    costs = numpy.asarray(costs, dtype=float)
    if costs.shape != (n,):
        raise InvalidSpecificationError("%d cost coefficients expected, got %d" % (n, costs.size))
    stateClasses = [stateClass for _, stateClass, _ in layout]
    if numpy.any(costs[[position for position, stateClass in enumerate(stateClasses) if stateClass not in ELECTRIC_CLASSES]] != 0):
        raise InvalidSpecificationError("cost coefficients must be zero outside the electric states")

    if measured is None:
        measuredIndices = list(range(n))
    else:
        unknown = [label for label in measured if label not in index]
        if unknown:
            raise InvalidSpecificationError("unknown measured states %s" % unknown)
        measuredIndices = [index[label] for label in measured]
    # outputs grouped by subsystem keeps C block-diagonal
    measuredIndices = sorted(set(measuredIndices), key=lambda position: (assignment[position], position))
    C = numpy.zeros((len(measuredIndices), n))
    C[numpy.arange(len(measuredIndices)), measuredIndices] = 1.0

    system = DescriptorSystem(E, A, C, labels, stateClasses, subsystemNames, assignment, costs)
    log.info("assembled %d states in %d subsystems, stability margin %g", system.n, system.subsystemCount, system.stabilityMargin)
    return system
