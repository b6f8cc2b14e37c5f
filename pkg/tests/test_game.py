import logging
import math

import numpy
import pytest

from c4.infrasec.dynamics import AttackScenario, costDeviation
from c4.infrasec.exceptions import (CapExceededError,
                                    InfeasibleBudgetError,
                                    InvalidSpecificationError,
                                    KExceedsPoolError)
from c4.infrasec.game import (ELECTRIC,
                              Allocation,
                              EquilibriumResult,
                              GameSetup,
                              PayoffMatrix,
                              allocationCount,
                              buildPayoff,
                              computeProfiles,
                              enumerateAllocations,
                              enumerateAttacks,
                              equalAllocationBaseline,
                              fictitiousPlay,
                              lpMinimax,
                              saddlePoint,
                              solve)
from c4.infrasec.scenario import referenceScenario


log = logging.getLogger(__name__)

@pytest.fixture(scope="module")
def reference():
    return referenceScenario()

@pytest.fixture(scope="module")
def system(reference):
    return reference.buildSystem()

@pytest.fixture(scope="module")
def setup(reference, system):
    return GameSetup(system, reference.attackerWaveform, 5.0, 1200, granularity=100, maxStates=2, step=1e-4)

class TestAttacks():

    def test_referenceCount(self):
        attacks = enumerateAttacks(12, 5)
        assert len(attacks) == 12 + 66 + 220 + 495 + 792 == 1585
        assert () not in attacks.strategies

    def test_order(self):
        assert list(enumerateAttacks(3, 1)) == [(0,), (1,), (2,)]
        assert list(enumerateAttacks(3, 2)) == [(0,), (0, 1), (0, 2), (1,), (1, 2), (2,)]
        withEmpty = enumerateAttacks(3, 1, includeEmpty=True)
        assert withEmpty[0] == ()
        assert len(withEmpty) == 4

    def test_exactSize(self):
        attacks = enumerateAttacks(4, 2, exactSize=True)
        assert len(attacks) == 6
        assert all(len(attack) == 2 for attack in attacks)

    def test_restriction(self, system):
        attacks = enumerateAttacks(12, 2, restriction=[9, 8, 9])
        assert attacks.pool == (8, 9)
        assert list(attacks) == [(8,), (8, 9), (9,)]
        assert attacks.states == [8, 9]
        assert attacks.labels(system)[1] == ("gas.S1", "gas.S2")
        with pytest.raises(InvalidSpecificationError):
            enumerateAttacks(3, 1, restriction=[3])

    def test_kExceedsPool(self):
        with pytest.raises(KExceedsPoolError):
            enumerateAttacks(3, 4)
        with pytest.raises(KExceedsPoolError):
            enumerateAttacks(12, 2, restriction=[0])

    def test_cap(self):
        with pytest.raises(CapExceededError) as e:
            enumerateAttacks(59, 5, exactSize=True)
        assert e.value.size == math.comb(59, 5)
        assert e.value.cap == 5000
        assert "attacker.maxStates" in str(e.value)

class TestAllocations():

    def test_twoSubsystems(self):
        allocations = enumerateAllocations(2, 400, 100)
        assert allocations == [(100, 300), (200, 200), (300, 100)]
        assert all(isinstance(allocation, Allocation) for allocation in allocations)

    def test_referenceCount(self):
        allocations = enumerateAllocations(6, 1200, 100)
        assert len(allocations) == math.comb(11, 5) == 462
        assert allocationCount(6, 12) == 462
        assert all(allocation.total == 1200 for allocation in allocations)
        assert all(min(allocation) >= 100 for allocation in allocations)
        assert allocations == sorted(allocations)

    @pytest.mark.parametrize("budget", [500, 1250])
    def test_infeasible(self, budget):
        with pytest.raises(InfeasibleBudgetError):
            enumerateAllocations(6, budget, 100)

    def test_inexactBudget(self):
        allocations = enumerateAllocations(2, 300, 100, exactBudget=False)
        assert allocations == [(100, 100), (100, 200), (200, 100)]
        assert allocationCount(2, 3, exactBudget=False) == 3

    def test_fixed(self):
        allocations = enumerateAllocations(3, 500, 100, fixed={2: 100})
        assert allocations == [(100, 300, 100), (200, 200, 100), (300, 100, 100)]
        with pytest.raises(InfeasibleBudgetError):
            enumerateAllocations(3, 500, 100, fixed={2: 150})
        with pytest.raises(InvalidSpecificationError):
            enumerateAllocations(3, 500, 100, fixed={3: 100})

    def test_cap(self):
        with pytest.raises(CapExceededError) as e:
            enumerateAllocations(6, 1200, 100, cap=100)
        assert e.value.size == 462
        assert "defender.granularity" in str(e.value)

    def test_allocation(self):
        allocation = Allocation([300, 100, 200])
        assert allocation.total == 600
        assert allocation.spread == 200
        assert not allocation.isEqual
        assert Allocation([200, 200]).isEqual

class TestPayoffMatrix():

    def test_readOnly(self):
        payoff = PayoffMatrix.fromValues([[1.0, 2.0], [3.0, 4.0]])
        with pytest.raises(ValueError):
            payoff.values[0, 0] = 5.0
        assert payoff.shape == (2, 2)
        assert payoff.scale == 4.0
        assert numpy.array_equal(payoff.defenderPayoff, -payoff.attackerPayoff)

    def test_invalid(self):
        with pytest.raises(InvalidSpecificationError):
            PayoffMatrix([[1.0, 2.0]], [(0,), (1,)], [(100,), (200,)])
        with pytest.raises(InvalidSpecificationError):
            PayoffMatrix.fromValues([[1.0, numpy.nan]])

class TestSolvers():

    def test_matchingPennies(self):
        payoff = [[1.0, -1.0], [-1.0, 1.0]]
        assert saddlePoint(payoff) is None
        exact = lpMinimax(payoff)
        assert exact.value == pytest.approx(0.0, abs=1e-12)
        assert exact.attackerMixture == pytest.approx([0.5, 0.5])
        assert exact.defenderMixture == pytest.approx([0.5, 0.5])
        assert exact.method == "lp-minimax"
        approximate = fictitiousPlay(payoff)
        assert approximate.attackerMixture == pytest.approx([0.5, 0.5], abs=0.05)
        assert abs(approximate.value - exact.value) <= approximate.gap + 1e-12

    def test_saddlePoint(self):
        result = solve([[3.0, 1.0], [4.0, 2.0]])
        assert result.method == "saddle"
        assert result.value == 2.0
        assert list(result.attackerSupport()) == [1]
        assert list(result.defenderSupport()) == [1]
        assert result.gap == 0.0
        assert fictitiousPlay([[3.0, 1.0], [4.0, 2.0]]).method == "saddle"

    def test_dominatedRow(self):
        result = lpMinimax([[2.0, 0.0], [0.0, 1.0], [0.0, 0.0]])
        assert result.value == pytest.approx(2.0 / 3.0)
        assert result.attackerMixture == pytest.approx([1.0 / 3.0, 2.0 / 3.0, 0.0], abs=1e-9)
        assert result.defenderMixture == pytest.approx([1.0 / 3.0, 2.0 / 3.0], abs=1e-9)

    def test_randomGames(self):
        random = numpy.random.RandomState(11)
        for _ in range(100):
            values = random.rand(random.randint(2, 51), random.randint(2, 201))
            exact = lpMinimax(values)
            tolerance = 1e-9 * max(1.0, float(values.max()))
            assert exact.attackerExploitability <= tolerance
            assert exact.defenderExploitability <= tolerance
            assert exact.attackerMixture.sum() == pytest.approx(1.0)
            assert exact.attackerMixture.min() >= 0.0
            approximate = fictitiousPlay(values)
            assert abs(approximate.value - exact.value) <= approximate.gap + 1e-12
            if approximate.converged:
                assert abs(approximate.value - exact.value) <= 1e-3 * float(values.max())

    def test_additiveGames(self):
        random = numpy.random.RandomState(5)
        for _ in range(30):
            attacks = enumerateAttacks(4, 2)
            # single states are weakly dominated by the pairs containing them
            contributions = random.rand(4, 8)
            incidence = numpy.zeros((len(attacks), 4))
            for row, attack in enumerate(attacks):
                incidence[row, list(attack)] = 1.0
            values = incidence.dot(contributions)
            exact = lpMinimax(values)
            tolerance = 1e-9 * max(1.0, float(values.max()))
            assert exact.attackerExploitability <= tolerance
            assert exact.defenderExploitability <= tolerance

    def test_fictitiousPlayStops(self):
        result = fictitiousPlay([[1.0, -1.0], [-1.0, 1.0]], maxIterations=1)
        assert not result.converged
        assert result.iterations == 1
        assert result.attackerMixture == pytest.approx([0.75, 0.25])

    def test_fromMixtures(self):
        payoff = PayoffMatrix.fromValues([[2.0, 0.0], [0.0, 1.0]])
        result = EquilibriumResult.fromMixtures(payoff, [1.0, 0.0], [0.0, 1.0], 0, "test")
        assert result.value == 0.0
        assert result.attackerExploitability == 1.0
        assert result.defenderExploitability == 0.0
        assert result.toJSONSerializable()["gap"] == 1.0

    def test_unknownSolver(self):
        with pytest.raises(InvalidSpecificationError):
            solve([[1.0]], solver="simplex")

    def test_baselineUnequal(self):
        payoff = PayoffMatrix([[3.0, 1.0], [1.0, 2.0]], [(0,), (1,)], [(100, 200), (200, 100)])
        baseline = equalAllocationBaseline(payoff)
        assert not baseline.equal
        assert baseline.column == 0
        assert baseline.bestResponseValue == 3.0

class TestReferenceGame():

    def test_horizon(self, setup):
        assert setup.horizon == pytest.approx(0.05)

    def test_restrictions(self, setup):
        assert len(setup.attackPool(ELECTRIC)) == 8
        assert setup.attackPool(["gas.S2", "gas.S1"]) == [8, 9]
        assert len(setup.attacks(["gas.S1", "gas.S2"])) == 3
        allocations = setup.allocations(ELECTRIC)
        assert len(allocations) == 7
        assert all(allocation[2:] == (100, 100, 100, 100) for allocation in allocations)
        with pytest.raises(InvalidSpecificationError):
            setup.attackPool("water")
        with pytest.raises(InvalidSpecificationError):
            setup.allocations("water")

    def test_payoffEntry(self, setup, system):
        payoff = setup.payoff()
        assert payoff.shape == (78, 462)
        attack = (system.index("omega.G1"), system.index("gas.S1"))
        row = payoff.attacks.index(attack)
        allocation = Allocation([100, 300, 200, 200, 200, 200])
        column = payoff.allocations.index(allocation)
        windows = {attack[0]: 5.0 / 100, attack[1]: 5.0 / 200}
        expected = costDeviation(system, AttackScenario(attack, setup.waveform, horizon=setup.horizon), windows,
                                 step=setup.step)
        assert payoff.values[row, column] == pytest.approx(expected.total, rel=1e-12)
        assert payoff.labels[row] == ("omega.G1", "gas.S1")
        assert payoff.values.min() >= 0.0

    def test_moreConnectionsNeverHelpAttacker(self, reference, system):
        coarse = GameSetup(system, reference.attackerWaveform, 5.0, 1200, granularity=200, maxStates=1, step=1e-4)
        assert len(coarse.allocations()) == 1
        _, small = coarse.restrictedGame()
        _, large = coarse.withBudget(1600).restrictedGame()
        assert large.value <= small.value + 1e-12

    def test_baseline(self, setup):
        payoff = setup.payoff()
        equilibrium = lpMinimax(payoff)
        baseline = equalAllocationBaseline(payoff, equilibrium)
        assert baseline.equal
        assert baseline.allocation == (200,) * 6
        tolerance = 1e-9 * max(1.0, payoff.scale)
        assert baseline.bestResponseValue >= baseline.equilibriumValue
        assert baseline.equilibriumValue >= equilibrium.value - tolerance
        assert baseline.gameValue == equilibrium.value

    def test_profilesInParallel(self, reference, system):
        states = [0, 4, 8, 10]
        serial = computeProfiles(system, states, reference.attackerWaveform, 0.05, 1e-4, processes=1)
        parallel = computeProfiles(system, states, reference.attackerWaveform, 0.05, 1e-4, processes=2)
        assert sorted(parallel) == states
        for state in states:
            assert numpy.array_equal(serial[state].cumulative, parallel[state].cumulative)

    def test_invalidAllocations(self, setup, system):
        with pytest.raises(InvalidSpecificationError):
            buildPayoff(system, [(0,)], [(1200,)], setup.waveform, 5.0)
        with pytest.raises(InvalidSpecificationError):
            buildPayoff(system, [], [(200,) * 6], setup.waveform, 5.0)

@pytest.fixture(scope="module")
def referenceSetup(reference, system):
    return reference.gameSetup(system)

@pytest.fixture(scope="module")
def referenceGame(referenceSetup):
    return referenceSetup.restrictedGame()

class TestReferenceEquilibrium():

    def test_size(self, referenceGame):
        payoff, equilibrium = referenceGame
        assert payoff.shape == (1585, 462)
        tolerance = 1e-9 * max(1.0, payoff.scale)
        assert equilibrium.attackerExploitability <= tolerance
        assert equilibrium.defenderExploitability <= tolerance

    def test_fictitiousPlayAgrees(self, referenceGame):
        payoff, equilibrium = referenceGame
        approximate = fictitiousPlay(payoff)
        assert abs(approximate.value - equilibrium.value) <= 1e-3 * payoff.scale

    def test_equalAllocationLosesMore(self, referenceGame):
        payoff, equilibrium = referenceGame
        baseline = equalAllocationBaseline(payoff, equilibrium)
        assert baseline.allocation == (200,) * 6
        assert baseline.bestResponseValue > equilibrium.value
        assert baseline.bestResponseValue >= baseline.equilibriumValue

    def test_restrictedGames(self, referenceSetup, referenceGame):
        _, equilibrium = referenceGame
        _, electricAttacker = referenceSetup.restrictedGame(attackRestriction=ELECTRIC)
        _, electricDefender = referenceSetup.restrictedGame(defenderRestriction=ELECTRIC)
        assert electricAttacker.value < equilibrium.value < electricDefender.value

    def test_largerBudget(self, referenceSetup, referenceGame):
        _, equilibrium = referenceGame
        _, larger = referenceSetup.withBudget(1700).restrictedGame()
        assert larger.value < equilibrium.value

    def test_supportsIncludeFluidStates(self, system, referenceGame):
        payoff, equilibrium = referenceGame
        attacked = set(label for row in equilibrium.attackerSupport() for label in payoff.labels[row])
        assert any(label.split(".")[0] in ("gas", "water") for label in attacked)
        fluid = [subsystem for subsystem in range(system.subsystemCount) if not system.isElectricSubsystem(subsystem)]
        assert any(payoff.allocations[column][subsystem] > 100
                   for column in equilibrium.defenderSupport()
                   for subsystem in fluid)
