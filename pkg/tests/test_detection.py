import logging

import numpy
import pytest
import scipy.linalg

from c4.infrasec.detection import (FilterConfig,
                                   Measurements,
                                   Residue,
                                   centralizedFilter,
                                   detectionTime,
                                   firstDetection,
                                   relaxDistributed)
from c4.infrasec.dynamics import AttackScenario, Waveform, simulate
from c4.infrasec.exceptions import (InvalidSpecificationError,
                                    MeasurementGridMismatchError,
                                    NotHurwitzError,
                                    ZeroConnectionsError)
from c4.infrasec.model import DescriptorSystem
from c4.infrasec.scenario import referenceScenario


log = logging.getLogger(__name__)

@pytest.fixture(scope="module")
def system():
    return referenceScenario().buildSystem()

@pytest.fixture(scope="module")
def x0():
    return 0.1 * numpy.random.RandomState(0).randn(12)

@pytest.fixture(scope="module")
def unattacked(system, x0):
    return Measurements.fromTrajectory(system, simulate(system, x0, horizon=1.0, step=1e-3))

@pytest.fixture(scope="module")
def attacked(system, x0):
    attack = AttackScenario([system.index("gas.S1")], Waveform("pulse", 1.0, 0.2, 0.6), horizon=1.0)
    return Measurements.fromTrajectory(system, simulate(system, x0, attack, step=1e-3))

@pytest.fixture
def blockSystem():
    A = scipy.linalg.block_diag([[-1.0, 1.0], [0.0, -2.0]], [[-3.0, 0.0], [1.0, -1.0]])
    return DescriptorSystem.fromMatrices(numpy.eye(4), A, partition=[0, 0, 1, 1])

class TestFilterConfig():

    def test_fromSystem(self, system):
        config = FilterConfig.fromSystem(system, window=5.0)
        assert config.gamma == 1.0
        assert numpy.array_equal(config.gain, -system.C.T)
        assert numpy.array_equal(config.closedLoop, system.A - numpy.eye(12))
        assert config.toJSONSerializable()["window"] == 5.0

    def test_invalidGamma(self, system):
        with pytest.raises(InvalidSpecificationError):
            FilterConfig.fromSystem(system, window=5.0, gamma=0.0)
        with pytest.raises(InvalidSpecificationError):
            FilterConfig.fromSystem(system, window=5.0, gamma=4.0, maxGamma=2.0)

    def test_notHurwitz(self):
        system = DescriptorSystem.fromMatrices(numpy.eye(2), -numpy.eye(2))
        with pytest.raises(NotHurwitzError) as e:
            FilterConfig(system, 5.0 * numpy.eye(2), window=1.0)
        assert e.value.eigenvalue.real == pytest.approx(4.0)

    def test_gainAcrossSubsystems(self):
        system = DescriptorSystem.fromMatrices(numpy.eye(2), -numpy.eye(2), partition=[0, 1])
        with pytest.raises(InvalidSpecificationError):
            FilterConfig(system, [[-1.0, -1.0], [0.0, -1.0]], window=1.0)
        with pytest.raises(InvalidSpecificationError):
            FilterConfig(system, -numpy.eye(3), window=1.0)

    def test_invalidSettings(self, system):
        with pytest.raises(InvalidSpecificationError):
            FilterConfig.fromSystem(system, window=0.0)
        with pytest.raises(InvalidSpecificationError):
            FilterConfig.fromSystem(system, window=1.0, maxIterations=0)
        with pytest.raises(InvalidSpecificationError):
            FilterConfig.fromSystem(system, window=1.0, threshold=-1.0)

class TestMeasurements():

    def test_grid(self):
        measurements = Measurements([0.0, 0.5, 1.0], [[1.0], [2.0], [3.0]])
        assert measurements.step == 0.5
        truncated = measurements.truncated(0.5)
        assert list(truncated.times) == [0.0, 0.5]
        with pytest.raises(MeasurementGridMismatchError):
            measurements.truncated(2.0)

    @pytest.mark.parametrize("times,values", [
        ([0.0, 0.5, 1.5], [[1.0], [2.0], [3.0]]),
        ([0.1, 0.6, 1.1], [[1.0], [2.0], [3.0]]),
        ([0.0, 0.5, 1.0], [[1.0], [2.0]]),
        ([0.0], [[1.0]]),
    ])
    def test_invalid(self, times, values):
        with pytest.raises(MeasurementGridMismatchError):
            Measurements(times, values)

class TestCentralizedFilter():

    def test_unattackedResidueVanishes(self, system, x0, unattacked):
        residue = centralizedFilter(FilterConfig.fromSystem(system, window=1.0), unattacked, x0)
        assert residue.maximum < 1e-7
        assert firstDetection(residue, 1e-5) is None

    def test_attackDetected(self, system, x0, attacked):
        config = FilterConfig.fromSystem(system, window=1.0)
        residue = centralizedFilter(config, attacked, x0)
        assert residue.maximum > config.threshold
        detected = firstDetection(residue, config.threshold)
        assert 0.2 - 1e-9 <= detected <= 0.202
        # nothing before the attack starts
        assert residue.supNorm[residue.times < 0.2].max() < 1e-7

    @pytest.mark.parametrize("state", range(12))
    def test_everySingleStateAttackDetected(self, system, x0, state):
        attack = AttackScenario([state], Waveform("step", 1.0, 0.2), horizon=0.5)
        measurements = Measurements.fromTrajectory(system, simulate(system, x0, attack, step=1e-3))
        residue = centralizedFilter(FilterConfig.fromSystem(system, window=0.5), measurements, x0)
        detected = firstDetection(residue, 1e-5)
        # within the detection time of an equal split of 1200 connections
        blind = detectionTime((200,) * 6, int(system.partition[state]), 5.0)
        assert detected is not None, system.labels[state]
        assert 0.2 - 1e-9 <= detected <= 0.2 + blind

    def test_wrongInputs(self, system, x0, attacked):
        config = FilterConfig.fromSystem(system, window=1.0)
        with pytest.raises(InvalidSpecificationError):
            centralizedFilter(config, attacked, x0[:5])
        with pytest.raises(MeasurementGridMismatchError):
            centralizedFilter(config, Measurements(attacked.times, attacked.values[:, :3]), x0)

    def test_residueTable(self):
        residue = Residue(numpy.array([0.0, 1.0]), numpy.array([[0.5, -2.0], [0.0, 0.0]]), ["x0", "x1"])
        assert list(residue.supNorm) == [2.0, 0.0]
        assert residue.maximum == 2.0
        assert list(residue.toDataFrame().columns) == ["t", "r.x0", "r.x1"]

class TestRelaxation():

    def test_matchesCentralized(self, system, x0, attacked):
        config = FilterConfig.fromSystem(system, window=0.5)
        run = relaxDistributed(config, attacked, x0)
        assert run.converged
        assert run.iterations <= config.maxIterations
        assert run.history[-1]["couplingDelta"] < config.tolerance
        assert run.times[-1] == pytest.approx(0.5)
        centralized = centralizedFilter(config, attacked, x0)
        samples = run.times.size
        assert numpy.abs(run.residue().values - centralized.values[:samples]).max() < 1e-6
        assert firstDetection(run.residue(), config.threshold) == firstDetection(centralized, config.threshold)

    def test_localResidues(self, system, x0, attacked):
        run = relaxDistributed(FilterConfig.fromSystem(system, window=0.5), attacked, x0)
        local = run.localResidues()
        assert list(local) == list(system.subsystemNames)
        assert local["GS1"].labels == ("gas.S1",)
        assert sum(residue.values.shape[1] for residue in local.values()) == 12
        assert local["GS1"].maximum > 1e-5

    def test_keepIterates(self, system, x0, attacked):
        config = FilterConfig.fromSystem(system, window=0.5)
        every = relaxDistributed(config, attacked, x0)
        last = relaxDistributed(config, attacked, x0, keepIterates=False)
        assert len(every.iterates) == every.iterations
        assert len(last.iterates) == 1
        assert numpy.array_equal(every.final, last.final)
        assert list(every.toDataFrame().columns) == ["t"] + ["z.%s" % label for label in system.labels]
        history = every.historyDataFrame()
        assert list(history.columns) == ["iteration", "couplingDelta", "stateDelta"]
        assert list(history["iteration"]) == list(range(1, every.iterations + 1))

    def test_blockDiagonalConvergesAtOnce(self, blockSystem):
        attack = AttackScenario([1], Waveform("pulse", 1.0, 0.1, 0.3), horizon=1.0)
        x0 = numpy.array([1.0, -1.0, 0.5, 0.0])
        measurements = Measurements.fromTrajectory(blockSystem, simulate(blockSystem, x0, attack, step=1e-2))
        config = FilterConfig.fromSystem(blockSystem, window=1.0)
        run = relaxDistributed(config, measurements, x0)
        assert run.converged
        assert run.iterations == 1
        centralized = centralizedFilter(config, measurements, x0)
        assert numpy.allclose(run.residue().values, centralized.values, rtol=0, atol=1e-12)

    def test_notConverged(self, system, x0, attacked, caplog):
        config = FilterConfig.fromSystem(system, window=0.5, maxIterations=1)
        run = relaxDistributed(config, attacked, x0)
        assert not run.converged
        assert run.iterations == 1
        assert "did not converge" in caplog.text

    def test_initialGuess(self, system, x0, attacked):
        config = FilterConfig.fromSystem(system, window=0.5)
        with pytest.raises(MeasurementGridMismatchError):
            relaxDistributed(config, attacked, x0, initialGuess=numpy.zeros((3, 12)))
        converged = relaxDistributed(config, attacked, x0)
        # restarting from a converged trajectory needs hardly any work
        run = relaxDistributed(config, attacked, x0, initialGuess=converged.final)
        assert run.converged
        assert run.iterations <= 2

def test_detectionTime():
    assert detectionTime((200, 100), 1, 5.0) == pytest.approx(0.05)
    assert detectionTime((200, 100), 0, 5.0) == pytest.approx(0.025)
    with pytest.raises(ZeroConnectionsError):
        detectionTime((200, 0), 1, 5.0)
