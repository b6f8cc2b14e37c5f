"""
Copyright (c) IBM 2015-2017. All Rights Reserved.
Project name: c4-infrasec
This project is licensed under the MIT License, see LICENSE

This library contains the zero-sum game between an attacker choosing which states
to attack and a defender allocating communication connections to the distributed
attack detection filters.

Strategies
----------

The attacker picks a set of at most ``K`` states, the defender picks connection
counts ``m_1..m_N`` on a granularity grid that use up the communication budget.
A state of subsystem ``i`` stays undetected for ``T / m_i`` seconds, so the payoff
of an attack is the sum of the single-state cost profiles evaluated at the detection
times of the attacked subsystems.

.. code-block:: python

    setup = GameSetup(system, Waveform("step"), window=5.0, budget=1200, granularity=100, maxStates=5)
    payoff = setup.payoff()
    equilibrium = lpMinimax(payoff)
    learned = fictitiousPlay(payoff, maxIterations=20000, tolerance=1e-3)
    baseline = equalAllocationBaseline(payoff, equilibrium)

Solvers
-------

:func:`fictitiousPlay` lets both players best respond to the empirical mixture of
the other one. :func:`lpMinimax` solves the minimax linear programs of both players
and certifies the result, it is the reference the learned equilibrium is checked
against. Both solvers return pure saddle points directly.

Functionality
-------------
"""

import itertools
import logging
import math

import numpy
import scipy.optimize

import c4.infrasec.jsonutil
import c4.infrasec.logutil
import c4.infrasec.util
from c4.infrasec.detection import detectionTime
from c4.infrasec.dynamics import DEFAULT_STEP, costProfiles
from c4.infrasec.exceptions import (CapExceededError,
                                    DegenerateLPError,
                                    InfeasibleBudgetError,
                                    InfrasecError,
                                    InvalidSpecificationError,
                                    KExceedsPoolError,
                                    PayoffError)


log = logging.getLogger(__name__)

DEFAULT_ATTACK_CAP = 5000
DEFAULT_ALLOCATION_CAP = 20000
DEFAULT_GRANULARITY = 100
CERTIFICATE_TOLERANCE = 1e-9
SUPPORT_THRESHOLD = 1e-9
LP_METHOD = "highs-ds"

ALL = "all"
ELECTRIC = "electric"

class AttackerStrategySet(object):
    """
    Attack sets the attacker can choose from

    :param pool: attackable state indices
    :type pool: [int]
    :param maxStates: largest number of simultaneously attacked states ``K``
    :type maxStates: int
    :param strategies: attack sets in lexicographic order
    :type strategies: [tuple]
    """
    def __init__(self, pool, maxStates, strategies):
        self.pool = tuple(pool)
        self.maxStates = maxStates
        self.strategies = tuple(tuple(strategy) for strategy in strategies)

    def __len__(self):
        return len(self.strategies)

    def __iter__(self):
        return iter(self.strategies)

    def __getitem__(self, index):
        return self.strategies[index]

    @property
    def states(self):
        """
        States that appear in at least one attack set
        """
        return sorted(set(itertools.chain.from_iterable(self.strategies)))

    def labels(self, system):
        """
        Attack sets expressed with state labels

        :param system: descriptor system
        :type system: :class:`~c4.infrasec.model.DescriptorSystem`
        :rtype: [tuple]
        """
        return [tuple(system.labels[state] for state in strategy) for strategy in self.strategies]

def _capGuidance(what):
    if what == "attacks":
        return "lower attacker.maxStates, restrict the attacker or set attacker.exactSize"
    return "raise defender.granularity, lower the budget or restrict the defender"

def enumerateAttacks(n, maxStates, restriction=None, includeEmpty=False, exactSize=False, cap=DEFAULT_ATTACK_CAP):
    """
    Enumerate all attack sets of at most ``maxStates`` states

    :param n: number of states
    :type n: int
    :param maxStates: largest attack set size ``K``
    :type maxStates: int
    :param restriction: attackable state indices, all states by default
    :type restriction: [int]
    :param includeEmpty: include the empty attack
    :type includeEmpty: bool
    :param exactSize: only keep sets of exactly ``maxStates`` states, smaller sets are
        weakly dominated because single-state costs are nonnegative and add up
    :type exactSize: bool
    :param cap: largest number of strategies to enumerate
    :type cap: int
    :rtype: :class:`AttackerStrategySet`
    :raises KExceedsPoolError: if ``maxStates`` is negative or larger than the pool
    :raises CapExceededError: if the number of attack sets exceeds the cap
    """
    pool = list(range(n)) if restriction is None else sorted(set(int(state) for state in restriction))
    for state in pool:
        if not 0 <= state < n:
            raise InvalidSpecificationError("attackable state %d does not exist in a system with %d states" % (state, n))
    if not 0 <= maxStates <= len(pool):
        raise KExceedsPoolError("cannot attack %d states out of a pool of %d" % (maxStates, len(pool)))

    sizes = [maxStates] if exactSize else list(range(1, maxStates + 1))
    sizes = [size for size in sizes if size > 0]
    size = sum(math.comb(len(pool), k) for k in sizes) + (1 if includeEmpty else 0)
    if size > cap:
        raise CapExceededError("%d attack sets exceed the cap" % size, size, cap, guidance=_capGuidance("attacks"))

    strategies = [()] if includeEmpty else []
    combinations = itertools.chain.from_iterable(itertools.combinations(pool, k) for k in sizes)
    strategies.extend(sorted(combinations))
    log.debug("enumerated %d attack sets of at most %d out of %d states", len(strategies), maxStates, len(pool))
    return AttackerStrategySet(pool, maxStates, strategies)

class Allocation(tuple):
    """
    Connection counts ``m_1..m_N`` of one defender strategy
    """
    def __new__(cls, counts):
        return super(Allocation, cls).__new__(cls, (int(count) for count in counts))

    @property
    def total(self):
        """
        Number of connections used
        """
        return sum(self)

    @property
    def spread(self):
        """
        Difference between the largest and the smallest count
        """
        return max(self) - min(self) if self else 0

    @property
    def isEqual(self):
        """
        Whether every subsystem gets the same number of connections
        """
        return self.spread == 0

def allocationCount(free, units, exactBudget=True):
    """
    Number of ways to split ``units`` granules over ``free`` subsystems with at least one each

    :param free: number of subsystems
    :type free: int
    :param units: number of granules
    :type units: int
    :param exactBudget: use every granule
    :type exactBudget: bool
    :rtype: int
    """
    if free == 0:
        return 1 if (units == 0 or not exactBudget) else 0
    if exactBudget:
        return math.comb(units - 1, free - 1) if units >= free else 0
    return math.comb(units, free) if units >= free else 0

def enumerateAllocations(subsystems, budget, granularity=DEFAULT_GRANULARITY, exactBudget=True, fixed=None,
                         cap=DEFAULT_ALLOCATION_CAP):
    """
    Enumerate the defender allocations on the granularity grid

    Every subsystem gets a positive multiple of the granularity. With ``exactBudget``
    the counts add up to the budget, allocations leaving connections unused are
    dominated because costs never grow with more connections.

    :param subsystems: number of subsystems ``N``
    :type subsystems: int
    :param budget: number of connections ``B``
    :type budget: int
    :param granularity: granularity ``g``
    :type granularity: int
    :param exactBudget: only enumerate allocations that use the whole budget
    :type exactBudget: bool
    :param fixed: counts of subsystems that are not allocated freely, by subsystem index
    :type fixed: dict
    :param cap: largest number of allocations to enumerate
    :type cap: int
    :returns: allocations in lexicographic order
    :rtype: [:class:`Allocation`]
    :raises InfeasibleBudgetError: if the budget cannot give every subsystem ``g`` connections
    :raises CapExceededError: if the number of allocations exceeds the cap
    """
    granularity = int(granularity)
    budget = int(budget)
    fixed = dict(fixed or {})
    if granularity < 1:
        raise InvalidSpecificationError("granularity must be a positive integer, got %r" % granularity)
    if subsystems < 1:
        raise InvalidSpecificationError("at least one subsystem is needed")
    if exactBudget and budget % granularity:
        raise InfeasibleBudgetError("budget %d is not a multiple of the granularity %d" % (budget, granularity))
    for subsystem, count in fixed.items():
        if not 0 <= subsystem < subsystems:
            raise InvalidSpecificationError("fixed subsystem %d does not exist" % subsystem)
        if count < granularity or count % granularity:
            raise InfeasibleBudgetError("fixed count %d of subsystem %d is not a positive multiple of %d"
                                        % (count, subsystem, granularity))

    units = budget // granularity - sum(fixed.values()) // granularity
    free = [subsystem for subsystem in range(subsystems) if subsystem not in fixed]
    if units < len(free) or (exactBudget and not free and units != 0) or units < 0:
        raise InfeasibleBudgetError("budget %d cannot give every subsystem at least %d connections"
                                    % (budget, granularity))
    size = allocationCount(len(free), units, exactBudget)
    if size > cap:
        raise CapExceededError("%d allocations exceed the cap" % size, size, cap, guidance=_capGuidance("allocations"))

    if not free:
        cuts = [()]
    elif exactBudget:
        cuts = (cut + (units,) for cut in itertools.combinations(range(1, units), len(free) - 1))
    else:
        cuts = itertools.combinations(range(1, units + 1), len(free))
    allocations = []
    for cut in cuts:
        counts = dict(fixed)
        previous = 0
        for subsystem, point in zip(free, cut):
            counts[subsystem] = (point - previous) * granularity
            previous = point
        allocations.append(Allocation(counts[subsystem] for subsystem in range(subsystems)))
    allocations.sort()
    log.debug("enumerated %d allocations of %d connections over %d subsystems", len(allocations), budget, subsystems)
    return allocations

class PayoffMatrix(c4.infrasec.jsonutil.JSONSerializable):
    """
    Attacker payoff ``u_a = dp`` over attack sets (rows) and allocations (columns)

    :param values: payoff entries
    :param attacks: attack sets of the rows
    :type attacks: [tuple]
    :param allocations: allocations of the columns
    :type allocations: [:class:`Allocation`]
    :param labels: attack sets expressed with state labels
    :type labels: [tuple]
    :param provenance: hash of the configuration the matrix was built from
    :type provenance: str
    """
    def __init__(self, values, attacks, allocations, labels=None, provenance=None):
        values = numpy.array(values, dtype=float)
        values.setflags(write=False)
        self.values = values
        self.attacks = tuple(tuple(attack) for attack in attacks)
        self.allocations = tuple(Allocation(allocation) for allocation in allocations)
        self.labels = tuple(labels) if labels is not None else tuple(tuple(str(state) for state in attack) for attack in self.attacks)
        self.provenance = provenance
        if values.shape != (len(self.attacks), len(self.allocations)):
            raise InvalidSpecificationError("payoff shape %s does not match %d attacks and %d allocations"
                                            % (values.shape, len(self.attacks), len(self.allocations)))
        if not numpy.all(numpy.isfinite(values)):
            raise InvalidSpecificationError("payoff entries must be finite")

    @classmethod
    def fromValues(cls, values):
        """
        Wrap a plain matrix, rows and columns are identified by their position

        :param values: payoff entries
        :rtype: :class:`PayoffMatrix`
        """
        values = numpy.asarray(values, dtype=float)
        rows, columns = values.shape
        return cls(values, [(row,) for row in range(rows)], [(column,) for column in range(columns)])

    @property
    def shape(self):
        """
        Number of attack sets and allocations
        """
        return self.values.shape

    @property
    def attackerPayoff(self):
        """
        Attacker utility ``u_a``
        """
        return self.values

    @property
    def defenderPayoff(self):
        """
        Defender utility ``u_d = -u_a``
        """
        return -self.values

    @property
    def scale(self):
        """
        Largest absolute payoff
        """
        return float(numpy.abs(self.values).max()) if self.values.size else 0.0

    def toJSONSerializable(self):
        serializableDict = {
            "values": self.values,
            "attacks": [list(labels) for labels in self.labels],
            "allocations": [list(allocation) for allocation in self.allocations],
            "provenance": self.provenance,
        }
        return serializableDict

def _payoffHorizon(window, smallestCount, step):
    # detection times never exceed T / min(m), rounded up to the integration grid
    return step * math.ceil(window / smallestCount / step * (1.0 - 1e-9))

def _profileChunk(system, states, waveform, horizon, step):
    return costProfiles(system, states, waveform, horizon, step)

def computeProfiles(system, states, waveform, horizon, step=DEFAULT_STEP, processes=1):
    """
    Cost profiles of the given states, distributed over worker processes

    :param system: descriptor system
    :type system: :class:`~c4.infrasec.model.DescriptorSystem`
    :param states: attacked state indices
    :type states: [int]
    :param waveform: attack waveform
    :type waveform: :class:`~c4.infrasec.dynamics.Waveform`
    :param horizon: horizon in s
    :type horizon: float
    :param step: integration step in s
    :type step: float
    :param processes: number of worker processes
    :type processes: int
    :returns: profile by state index
    :rtype: dict
    """
    states = list(states)
    chunks = max(1, min(int(processes or 1), len(states)))
    arguments = [(system, states[position::chunks], waveform, horizon, step) for position in range(chunks)]
    profiles = {}
    for result in c4.infrasec.util.mapTasks(_profileChunk, arguments, processes=processes):
        profiles.update(result)
    return profiles

def buildPayoff(system, attacks, allocations, waveform, window, step=DEFAULT_STEP, profiles=None, processes=1):
    """
    Build the payoff matrix ``dp(kappa, mu)``

    Each attacked state ``j`` of subsystem ``i`` contributes its cost profile evaluated
    at the detection time ``T / m_i``. Profiles are computed once per state and their
    values cached per connection count.

    :param system: descriptor system
    :type system: :class:`~c4.infrasec.model.DescriptorSystem`
    :param attacks: attack sets
    :type attacks: :class:`AttackerStrategySet` or [tuple]
    :param allocations: allocations
    :type allocations: [:class:`Allocation`]
    :param waveform: attack waveform used on every attacked state
    :type waveform: :class:`~c4.infrasec.dynamics.Waveform`
    :param window: communication window ``T`` in s
    :type window: float
    :param step: integration step in s
    :type step: float
    :param profiles: precomputed cost profiles by state index
    :type profiles: dict
    :param processes: number of worker processes for the cost profiles
    :type processes: int
    :rtype: :class:`PayoffMatrix`
    :raises PayoffError: if an entry cannot be evaluated
    """
    attacks = [tuple(attack) for attack in attacks]
    allocations = [Allocation(allocation) for allocation in allocations]
    if not attacks or not allocations:
        raise InvalidSpecificationError("payoff needs at least one attack set and one allocation")
    for allocation in allocations:
        if len(allocation) != system.subsystemCount:
            raise InvalidSpecificationError("allocation %s does not have %d entries" % (allocation, system.subsystemCount))
        if min(allocation) < 1:
            raise InvalidSpecificationError("allocation %s leaves a subsystem without connections" % (allocation,))

    states = sorted(set(itertools.chain.from_iterable(attacks)))
    profiles = dict(profiles or {})
    missing = [state for state in states if state not in profiles]
    if missing:
        horizon = _payoffHorizon(window, min(min(allocation) for allocation in allocations), step)
        profiles.update(computeProfiles(system, missing, waveform, horizon, step, processes))

    cache = {}
    contributions = numpy.zeros((len(states), len(allocations)))
    for column, allocation in enumerate(allocations):
        for row, state in enumerate(states):
            subsystem = int(system.partition[state])
            key = (state, allocation[subsystem])
            if key not in cache:
                try:
                    cache[key] = profiles[state].evaluate(detectionTime(allocation, subsystem, window))
                except InfrasecError as e:
                    attack = next(attack for attack in attacks if state in attack)
                    raise PayoffError(tuple(system.labels[s] for s in attack), tuple(allocation), e)
            contributions[row, column] = cache[key]

    position = {state: row for row, state in enumerate(states)}
    incidence = numpy.zeros((len(attacks), len(states)))
    for row, attack in enumerate(attacks):
        for state in attack:
            incidence[row, position[state]] = 1.0
    values = incidence.dot(contributions)

    provenance = c4.infrasec.util.configHash({
        "system": system.toJSONSerializable(),
        "waveform": waveform.toJSONSerializable(),
        "window": window,
        "step": step,
        "attacks": attacks,
        "allocations": allocations,
    })
    labels = [tuple(system.labels[state] for state in attack) for attack in attacks]
    log.info("built %d x %d payoff matrix from %d cost profiles", len(attacks), len(allocations), len(states))
    return PayoffMatrix(values, attacks, allocations, labels, provenance)

class EquilibriumResult(c4.infrasec.jsonutil.JSONSerializable):
    """
    Mixed strategies of both players

    :param attackerMixture: attacker probabilities ``p_a`` over the payoff rows
    :param defenderMixture: defender probabilities ``p_d`` over the payoff columns
    :param value: expected payoff ``p_a^T A p_d``
    :type value: float
    :param attackerExploitability: largest gain of an attacker deviating to a pure strategy
    :type attackerExploitability: float
    :param defenderExploitability: largest gain of a defender deviating to a pure strategy
    :type defenderExploitability: float
    :param iterations: solver iterations
    :type iterations: int
    :param method: solver name
    :type method: str
    :param converged: whether the solver reached its tolerance
    :type converged: bool
    """
    def __init__(self, attackerMixture, defenderMixture, value, attackerExploitability, defenderExploitability,
                 iterations, method, converged=True):
        self.attackerMixture = numpy.asarray(attackerMixture, dtype=float)
        self.defenderMixture = numpy.asarray(defenderMixture, dtype=float)
        self.value = float(value)
        self.attackerExploitability = float(attackerExploitability)
        self.defenderExploitability = float(defenderExploitability)
        self.iterations = int(iterations)
        self.method = method
        self.converged = converged

    @classmethod
    def fromMixtures(cls, payoff, attackerMixture, defenderMixture, iterations, method, converged=True):
        """
        Evaluate value and exploitability of a pair of mixtures

        :param payoff: payoff matrix
        :type payoff: :class:`PayoffMatrix`
        :param attackerMixture: attacker probabilities
        :param defenderMixture: defender probabilities
        :param iterations: solver iterations
        :type iterations: int
        :param method: solver name
        :type method: str
        :param converged: whether the solver reached its tolerance
        :type converged: bool
        :rtype: :class:`EquilibriumResult`
        """
        values = payoff.values
        attackerMixture = numpy.asarray(attackerMixture, dtype=float)
        defenderMixture = numpy.asarray(defenderMixture, dtype=float)
        rowValues = values.dot(defenderMixture)
        columnValues = attackerMixture.dot(values)
        value = float(attackerMixture.dot(rowValues))
        return cls(attackerMixture, defenderMixture, value,
                   max(0.0, float(rowValues.max()) - value),
                   max(0.0, value - float(columnValues.min())),
                   iterations, method, converged)

    @property
    def gap(self):
        """
        Total exploitability
        """
        return self.attackerExploitability + self.defenderExploitability

    def attackerSupport(self, threshold=SUPPORT_THRESHOLD):
        """
        Rows played with probability above the threshold
        """
        return numpy.flatnonzero(self.attackerMixture > threshold)

    def defenderSupport(self, threshold=SUPPORT_THRESHOLD):
        """
        Columns played with probability above the threshold
        """
        return numpy.flatnonzero(self.defenderMixture > threshold)

    def toJSONSerializable(self):
        serializableDict = {
            "attackerMixture": self.attackerMixture,
            "defenderMixture": self.defenderMixture,
            "value": self.value,
            "attackerExploitability": self.attackerExploitability,
            "defenderExploitability": self.defenderExploitability,
            "gap": self.gap,
            "iterations": self.iterations,
            "method": self.method,
            "converged": self.converged,
        }
        return serializableDict

def _asPayoff(payoff):
    if isinstance(payoff, PayoffMatrix):
        return payoff
    return PayoffMatrix.fromValues(payoff)

def saddlePoint(payoff):
    """
    Pure equilibrium of a game with a saddle point

    :param payoff: payoff matrix
    :type payoff: :class:`PayoffMatrix`
    :returns: the pure equilibrium or ``None`` if there is no saddle point
    :rtype: :class:`EquilibriumResult`
    """
    payoff = _asPayoff(payoff)
    values = payoff.values
    rowMinima = values.min(axis=1)
    columnMaxima = values.max(axis=0)
    row = int(numpy.argmax(rowMinima))
    column = int(numpy.argmin(columnMaxima))
    if rowMinima[row] != columnMaxima[column]:
        return None
    attackerMixture = numpy.zeros(values.shape[0])
    attackerMixture[row] = 1.0
    defenderMixture = numpy.zeros(values.shape[1])
    defenderMixture[column] = 1.0
    log.debug("saddle point at attack %d allocation %d", row, column)
    return EquilibriumResult.fromMixtures(payoff, attackerMixture, defenderMixture, 0, "saddle")

def fictitiousPlay(payoff, maxIterations=20000, tolerance=1e-3):
    """
    Approximate the mixed strategy Nash equilibrium by fictitious play

    Both players start from uniform beliefs of total weight one and best respond
    simultaneously to the empirical mixture of the other player, ties going to
    the lowest strategy index. Iterations stop once the exploitability gap of the
    empirical mixtures falls below ``tolerance`` relative to the largest payoff.

    :param payoff: payoff matrix
    :type payoff: :class:`PayoffMatrix`
    :param maxIterations: largest number of iterations
    :type maxIterations: int
    :param tolerance: relative gap tolerance
    :type tolerance: float
    :rtype: :class:`EquilibriumResult`
    """
    payoff = _asPayoff(payoff)
    saddle = saddlePoint(payoff)
    if saddle is not None:
        return saddle
    values = payoff.values
    rows, columns = values.shape
    attackerCounts = numpy.full(rows, 1.0 / rows)
    defenderCounts = numpy.full(columns, 1.0 / columns)
    rowTotals = values.dot(defenderCounts)
    columnTotals = attackerCounts.dot(values)
    threshold = tolerance * payoff.scale

    converged = False
    iteration = 0
    for iteration in range(1, maxIterations + 1):
        row = int(numpy.argmax(rowTotals))
        column = int(numpy.argmin(columnTotals))
        attackerCounts[row] += 1.0
        defenderCounts[column] += 1.0
        rowTotals += values[:, column]
        columnTotals += values[row, :]
        weight = iteration + 1.0
        gap = (rowTotals.max() - columnTotals.min()) / weight
        if gap < threshold:
            converged = True
            break

    weight = iteration + 1.0
    result = EquilibriumResult.fromMixtures(payoff, attackerCounts / weight, defenderCounts / weight,
                                            iteration, "fictitious-play", converged)
    if converged:
        log.info("fictitious play converged after %d iterations, value %g gap %g", iteration, result.value, result.gap)
    else:
        log.warning("fictitious play stopped after %d iterations with gap %g", iteration, result.gap)
    return result

def _linprog(objective, upperMatrix, size):
    equality = numpy.zeros((1, size + 1))
    equality[0, :size] = 1.0
    bounds = [(0.0, None)] * size + [(None, None)]
    result = scipy.optimize.linprog(objective, A_ub=upperMatrix, b_ub=numpy.zeros(upperMatrix.shape[0]),
                                    A_eq=equality, b_eq=[1.0], bounds=bounds, method=LP_METHOD)
    if result.status != 0:
        raise DegenerateLPError("minimax program failed: %s" % result.message)
    return result.x[:size]

def _normalized(mixture):
    mixture = numpy.clip(mixture, 0.0, None)
    return mixture / mixture.sum()

def _indifference(values, support, opponentSupport):
    """
    Mixture on ``support`` that makes every strategy of ``opponentSupport`` earn the same
    """
    size = len(support)
    system = numpy.zeros((len(opponentSupport) + 1, size + 1))
    system[:-1, :size] = values[numpy.ix_(support, opponentSupport)].T
    system[:-1, size] = -1.0
    system[-1, :size] = 1.0
    rightHandSide = numpy.zeros(len(opponentSupport) + 1)
    rightHandSide[-1] = 1.0
    if system.shape[0] == system.shape[1]:
        try:
            return numpy.linalg.solve(system, rightHandSide)[:size]
        except numpy.linalg.LinAlgError:
            pass
    return numpy.linalg.lstsq(system, rightHandSide, rcond=None)[0][:size]

def _polish(values, attackerMixture, defenderMixture):
    attackerSupport = numpy.flatnonzero(attackerMixture > SUPPORT_THRESHOLD)
    defenderSupport = numpy.flatnonzero(defenderMixture > SUPPORT_THRESHOLD)
    if len(attackerSupport) != len(defenderSupport):
        log.warning("degenerate minimax supports of sizes %d and %d", len(attackerSupport), len(defenderSupport))
    attacker = numpy.zeros_like(attackerMixture)
    attacker[attackerSupport] = _indifference(values, attackerSupport, defenderSupport)
    defender = numpy.zeros_like(defenderMixture)
    defender[defenderSupport] = _indifference(-values.T, defenderSupport, attackerSupport)
    if attacker.min() < -1e-12 or defender.min() < -1e-12 or not (attacker.sum() > 0 and defender.sum() > 0):
        return None
    return _normalized(attacker), _normalized(defender)

def lpMinimax(payoff):
    """
    Solve the game exactly with the minimax linear programs of both players

    The attacker maximizes ``v`` subject to ``A^T p_a >= v``, the defender minimizes
    ``w`` subject to ``A p_d <= w``. The mixtures are polished by solving the
    indifference equations on their supports and are certified: no pure attacker
    strategy earns more than the value against ``p_d`` and no pure defender strategy
    concedes less than the value against ``p_a``.

    :param payoff: payoff matrix
    :type payoff: :class:`PayoffMatrix`
    :rtype: :class:`EquilibriumResult`
    :raises DegenerateLPError: if the certificate does not hold
    """
    payoff = _asPayoff(payoff)
    saddle = saddlePoint(payoff)
    if saddle is not None:
        return saddle
    values = payoff.values
    rows, columns = values.shape

    attackerObjective = numpy.zeros(rows + 1)
    attackerObjective[-1] = -1.0
    attackerConstraints = numpy.hstack([-values.T, numpy.ones((columns, 1))])
    attackerMixture = _normalized(_linprog(attackerObjective, attackerConstraints, rows))

    defenderObjective = numpy.zeros(columns + 1)
    defenderObjective[-1] = 1.0
    defenderConstraints = numpy.hstack([values, -numpy.ones((rows, 1))])
    defenderMixture = _normalized(_linprog(defenderObjective, defenderConstraints, columns))

    candidates = [EquilibriumResult.fromMixtures(payoff, attackerMixture, defenderMixture, 0, "lp-minimax")]
    polished = _polish(values, attackerMixture, defenderMixture)
    if polished is not None:
        candidates.insert(0, EquilibriumResult.fromMixtures(payoff, polished[0], polished[1], 0, "lp-minimax"))
    result = min(candidates, key=lambda candidate: candidate.gap)

    tolerance = CERTIFICATE_TOLERANCE * max(1.0, payoff.scale)
    if result.attackerExploitability > tolerance or result.defenderExploitability > tolerance:
        raise DegenerateLPError("minimax certificate fails with exploitability %g and %g"
                                % (result.attackerExploitability, result.defenderExploitability))
    log.info("minimax value %g with supports of %d attacks and %d allocations",
             result.value, len(result.attackerSupport()), len(result.defenderSupport()))
    return result

class BaselineResult(c4.infrasec.jsonutil.JSONSerializable):
    """
    Attacker payoffs against the defender spreading connections equally

    :param allocation: the equal or most balanced allocation
    :type allocation: :class:`Allocation`
    :param column: payoff column of the allocation
    :type column: int
    :param equal: whether the allocation is exactly equal
    :type equal: bool
    :param equilibriumValue: attacker payoff playing its equilibrium mixture against the allocation
    :type equilibriumValue: float
    :param bestResponseValue: attacker payoff of the best pure response to the allocation
    :type bestResponseValue: float
    :param bestResponse: payoff row of the best response
    :type bestResponse: int
    :param gameValue: equilibrium value of the game
    :type gameValue: float
    """
    def __init__(self, allocation, column, equal, equilibriumValue, bestResponseValue, bestResponse, gameValue):
        self.allocation = allocation
        self.column = column
        self.equal = equal
        self.equilibriumValue = equilibriumValue
        self.bestResponseValue = bestResponseValue
        self.bestResponse = bestResponse
        self.gameValue = gameValue

    def toJSONSerializable(self):
        serializableDict = {
            "allocation": list(self.allocation),
            "column": self.column,
            "equal": self.equal,
            "equilibriumValue": self.equilibriumValue,
            "bestResponseValue": self.bestResponseValue,
            "bestResponse": self.bestResponse,
            "gameValue": self.gameValue,
        }
        return serializableDict

def equalAllocationBaseline(payoff, equilibrium=None):
    """
    Evaluate the defender spreading its connections equally over all subsystems

    If the budget does not split equally the most balanced allocation is used and
    the result is flagged.

    :param payoff: payoff matrix
    :type payoff: :class:`PayoffMatrix`
    :param equilibrium: equilibrium of the full game, solved with :func:`lpMinimax` if missing
    :type equilibrium: :class:`EquilibriumResult`
    :rtype: :class:`BaselineResult`
    """
    column = min(range(len(payoff.allocations)), key=lambda index: (payoff.allocations[index].spread, index))
    allocation = payoff.allocations[column]
    if not allocation.isEqual:
        log.warning("no equal allocation available, using the most balanced allocation %s", allocation)
    if equilibrium is None:
        equilibrium = lpMinimax(payoff)
    columnValues = payoff.values[:, column]
    bestResponse = int(numpy.argmax(columnValues))
    return BaselineResult(allocation, column, allocation.isEqual,
                          float(equilibrium.attackerMixture.dot(columnValues)),
                          float(columnValues[bestResponse]), bestResponse, equilibrium.value)

def solve(payoff, solver="lp", maxIterations=20000, tolerance=1e-3):
    """
    Solve a game with the named solver

    :param payoff: payoff matrix
    :type payoff: :class:`PayoffMatrix`
    :param solver: ``lp`` or ``fictitious-play``
    :type solver: str
    :param maxIterations: fictitious play iterations
    :type maxIterations: int
    :param tolerance: fictitious play tolerance
    :type tolerance: float
    :rtype: :class:`EquilibriumResult`
    """
    if solver == "lp":
        return lpMinimax(payoff)
    if solver == "fictitious-play":
        return fictitiousPlay(payoff, maxIterations, tolerance)
    raise InvalidSpecificationError("unknown solver '%s'" % solver)

@c4.infrasec.logutil.ClassLogger
class GameSetup(object):
    """
    Everything needed to build full and restricted games on one system

    Cost profiles are cached so restricted games and budget sweeps reuse them.

    :param system: descriptor system
    :type system: :class:`~c4.infrasec.model.DescriptorSystem`
    :param waveform: attack waveform
    :type waveform: :class:`~c4.infrasec.dynamics.Waveform`
    :param window: communication window ``T`` in s
    :type window: float
    :param budget: number of connections ``B``
    :type budget: int
    :param granularity: allocation granularity ``g``
    :type granularity: int
    :param maxStates: largest attack set size ``K``
    :type maxStates: int
    :param step: integration step of the cost profiles in s
    :type step: float
    :param exactBudget: only use allocations spending the whole budget
    :type exactBudget: bool
    :param exactSize: only use attack sets of exactly ``K`` states
    :type exactSize: bool
    :param includeEmpty: include the empty attack
    :type includeEmpty: bool
    :param attackCap: attack set cap
    :type attackCap: int
    :param allocationCap: allocation cap
    :type allocationCap: int
    :param processes: worker processes for cost profiles
    :type processes: int
    """
    def __init__(self, system, waveform, window, budget, granularity=DEFAULT_GRANULARITY, maxStates=5,
                 step=DEFAULT_STEP, exactBudget=True, exactSize=False, includeEmpty=False,
                 attackCap=DEFAULT_ATTACK_CAP, allocationCap=DEFAULT_ALLOCATION_CAP, processes=1):
        self.system = system
        self.waveform = waveform
        self.window = float(window)
        self.budget = int(budget)
        self.granularity = int(granularity)
        self.maxStates = int(maxStates)
        self.step = float(step)
        self.exactBudget = exactBudget
        self.exactSize = exactSize
        self.includeEmpty = includeEmpty
        self.attackCap = attackCap
        self.allocationCap = allocationCap
        self.processes = processes
        self._profiles = {}
        if not self.window > 0:
            raise InvalidSpecificationError("communication window must be positive, got %r" % self.window)

    @property
    def horizon(self):
        """
        Cost profile horizon, the detection time of a subsystem with ``g`` connections
        """
        return _payoffHorizon(self.window, self.granularity, self.step)

    def withBudget(self, budget):
        """
        Same setup with another budget, sharing the cost profile cache

        :param budget: number of connections
        :type budget: int
        :rtype: :class:`GameSetup`
        """
        setup = GameSetup(self.system, self.waveform, self.window, budget, self.granularity, self.maxStates,
                          self.step, self.exactBudget, self.exactSize, self.includeEmpty,
                          self.attackCap, self.allocationCap, self.processes)
        setup._profiles = self._profiles
        return setup

    def attackPool(self, restriction=None):
        """
        Attackable states

        :param restriction: ``all``, ``electric``, or a list of state indices or labels
        :returns: state indices
        :rtype: [int]
        """
        if restriction is None or restriction == ALL:
            return list(range(self.system.n))
        if restriction == ELECTRIC:
            return [int(state) for state in self.system.electricStates]
        if isinstance(restriction, str):
            raise InvalidSpecificationError("unknown attacker restriction '%s'" % restriction)
        return sorted(set(self.system.index(state) if isinstance(state, str) else int(state) for state in restriction))

    def attacks(self, restriction=None):
        """
        Attacker strategies under a restriction

        :param restriction: ``all``, ``electric``, or a list of state indices or labels
        :rtype: :class:`AttackerStrategySet`
        """
        pool = self.attackPool(restriction)
        return enumerateAttacks(self.system.n, min(self.maxStates, len(pool)), pool,
                                includeEmpty=self.includeEmpty, exactSize=self.exactSize, cap=self.attackCap)

    def allocations(self, restriction=None):
        """
        Defender strategies under a restriction

        :param restriction: ``all``, or ``electric`` to keep every other subsystem at ``g`` connections
        :rtype: [:class:`Allocation`]
        """
        fixed = None
        if restriction == ELECTRIC:
            fixed = {subsystem: self.granularity
                     for subsystem in range(self.system.subsystemCount)
                     if not self.system.isElectricSubsystem(subsystem)}
            if len(fixed) == self.system.subsystemCount:
                raise InvalidSpecificationError("the system has no electric subsystem to protect")
        elif restriction is not None and restriction != ALL:
            raise InvalidSpecificationError("unknown defender restriction '%s'" % restriction)
        return enumerateAllocations(self.system.subsystemCount, self.budget, self.granularity,
                                    exactBudget=self.exactBudget, fixed=fixed, cap=self.allocationCap)

    def profiles(self, states):
        """
        Cost profiles of the given states, computed once per state

        :param states: state indices
        :type states: [int]
        :rtype: dict
        """
        missing = [state for state in states if state not in self._profiles]
        if missing:
            self.log.debug("computing %d cost profiles over %g s", len(missing), self.horizon)
            self._profiles.update(computeProfiles(self.system, missing, self.waveform, self.horizon,
                                                  self.step, self.processes))
        return {state: self._profiles[state] for state in states}

    def payoff(self, attackRestriction=None, defenderRestriction=None):
        """
        Payoff matrix of the game under the given restrictions

        :param attackRestriction: attacker restriction
        :param defenderRestriction: defender restriction
        :rtype: :class:`PayoffMatrix`
        """
        attacks = self.attacks(attackRestriction)
        allocations = self.allocations(defenderRestriction)
        return buildPayoff(self.system, attacks, allocations, self.waveform, self.window, self.step,
                           profiles=self.profiles(attacks.states))

    def restrictedGame(self, attackRestriction=None, defenderRestriction=None, solver="lp",
                       maxIterations=20000, tolerance=1e-3):
        """
        Build and solve the game under the given restrictions

        :param attackRestriction: attacker restriction
        :param defenderRestriction: defender restriction
        :param solver: ``lp`` or ``fictitious-play``
        :type solver: str
        :param maxIterations: fictitious play iterations
        :type maxIterations: int
        :param tolerance: fictitious play tolerance
        :type tolerance: float
        :returns: payoff matrix and equilibrium
        :rtype: (:class:`PayoffMatrix`, :class:`EquilibriumResult`)
        """
        payoff = self.payoff(attackRestriction, defenderRestriction)
        return payoff, solve(payoff, solver, maxIterations, tolerance)
