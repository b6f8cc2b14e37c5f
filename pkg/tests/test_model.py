import collections
import logging
import math

import numpy
import pytest

from c4.infrasec.exceptions import (CompressorSingularError,
                                    InvalidSpecificationError,
                                    IrregularPencilError,
                                    PartitionMismatchError,
                                    UnstableSystemError,
                                    ZeroPressureDropError)
from c4.infrasec.model import (Bus,
                               BusClass,
                               Compressor,
                               CouplingEntry,
                               CouplingSpec,
                               DescriptorSystem,
                               FluidKind,
                               FluidSpec,
                               Generator,
                               JunctionNode,
                               Pipe,
                               PowerSpec,
                               StorageNode,
                               SupplyNode,
                               assemble,
                               costVector,
                               linearizeCoupling,
                               pencilEigenvalues,
                               splitBlockDiagonal,
                               stateLayout)
from c4.infrasec.scenario import referenceScenario


log = logging.getLogger(__name__)

REFERENCE_LABELS = ["delta.G1", "delta.G3", "delta.G2", "delta.G4",
                    "omega.G1", "omega.G3", "omega.G2", "omega.G4",
                    "gas.S1", "gas.S2", "water.T1", "water.T2"]

@pytest.fixture(scope="module")
def system():
    return referenceScenario().buildSystem()

def emptyWater():
    return FluidSpec(FluidKind.WATER)

def singleStorageGas():
    return FluidSpec(FluidKind.GAS,
                     supplies=[SupplyNode("well", 3.0), SupplyNode("gate", 1.0)],
                     storages=[StorageNode("S", 2.0, 0.01)],
                     pipes=[Pipe("P1", "well", "S", 1.0), Pipe("P2", "S", "gate", 1.0)])

def singleGenerator(fuel="gas"):
    return PowerSpec([Generator("G", 0.2, 0.5, fuel)], Lgg=[[1.0]])

class TestReferenceSystem():

    def test_dimensions(self, system):
        assert system.n == 12
        assert system.subsystemCount == 6
        assert list(system.labels) == REFERENCE_LABELS
        assert list(system.subsystemNames) == ["E1", "E2", "GS1", "GS2", "WT1", "WT2"]
        assert system.algebraicStates.size == 0

    def test_partition(self, system):
        assert [system.labels[state] for state in system.subsystemStates(0)] == ["delta.G1", "delta.G2", "omega.G1", "omega.G2"]
        assert [system.labels[state] for state in system.subsystemStates(2)] == ["gas.S1"]
        assert system.isElectricSubsystem(0)
        assert not system.isElectricSubsystem(4)
        assert list(system.electricStates) == list(range(8))

    def test_matrices(self, system):
        E = numpy.diag(system.E)
        assert list(E[:4]) == [1.0] * 4
        assert list(E[4:8]) == [0.2, 0.2, 0.25, 0.3]
        assert list(E[8:]) == [0.005] * 4
        for generator in range(4):
            assert system.A[generator, 4 + generator] == 1.0
        S1 = system.index("gas.S1")
        T1 = system.index("water.T1")
        assert system.A[system.index("omega.G1"), S1] == 2.0
        assert system.A[system.index("omega.G3"), system.index("gas.S2")] == 1.6
        assert system.A[system.index("omega.G2"), T1] == 0.5
        assert system.A[S1, S1] == pytest.approx(-2.0 / math.sqrt(5.0) - 2.0 / math.sqrt(3.0))
        assert system.A[T1, T1] == pytest.approx(-2.0 / 1.85)
        # fluid rows never depend on electric states
        assert not numpy.any(system.A[8:, :8])

    def test_stability(self, system):
        assert system.stabilityMargin > 0
        assert numpy.all(system.pencilEigenvalues.real < 0)
        assert system.pencilEigenvalues.size == 12
        assert system.couplingDensity == pytest.approx(6.0 / 64.0)

    def test_readOnly(self, system):
        with pytest.raises(ValueError):
            system.A[0, 0] = 1.0
        with pytest.raises(ValueError):
            system.costs[0] = 1.0

    def test_costs(self, system):
        assert list(system.costs) == [0.2] * 4 + [1.0] * 4 + [0.0] * 4

    def test_index(self, system):
        assert system.index("water.T2") == 11
        with pytest.raises(InvalidSpecificationError):
            system.index("gas.S3")

    def test_splitBlockDiagonal(self, system):
        split = splitBlockDiagonal(system)
        assert numpy.array_equal(split.AD + split.AC, system.A)
        same = system.partition[:, None] == system.partition[None, :]
        assert not numpy.any(split.AC[same])
        assert not numpy.any(split.AD[~same])
        assert split.inNeighbors[0] == {1, 2, 4}
        assert split.outNeighbors[2] == {0}
        assert split.inNeighbors[2] == set()

    def test_decoupled(self):
        decoupled = referenceScenario().buildSystem(couplingScale=0.0)
        assert not numpy.any(decoupled.A[4:8, 8:])
        assert decoupled.couplingDensity == 0.0

    def test_toJSON(self, system):
        summary = system.toJSONSerializable()
        assert summary["n"] == 12
        assert summary["subsystems"]["GS1"] == ["gas.S1"]
        assert len(summary["eigenvalues"]) == 12
        assert '"n":12' in system.toJSON()

class TestLinearization():

    def test_gasPipe(self):
        linearizations = linearizeCoupling(singleStorageGas())
        assert [linearization.name for linearization in linearizations] == ["P1", "P2"]
        inflow = linearizations[0]
        assert inflow.flow == pytest.approx(math.sqrt(5.0))
        assert inflow.flowPartials == pytest.approx((3.0 / math.sqrt(5.0), -2.0 / math.sqrt(5.0)))

    def test_waterPipe(self):
        water = FluidSpec(FluidKind.WATER,
                          supplies=[SupplyNode("reservoir", 3.0)],
                          junctions=[JunctionNode("J", 1.0)],
                          pipes=[Pipe("P", "reservoir", "J", 2.0)])
        linearization = linearizeCoupling(water)[0]
        slope = 2.0 / 1.85 * 2.0 ** (1.0 / 1.85 - 1.0)
        assert linearization.flow == pytest.approx(2.0 * 2.0 ** (1.0 / 1.85))
        assert linearization.flowPartials == pytest.approx((slope, -slope))

    def test_compressor(self):
        compressor = Compressor("C", "low", "high", power=1.0, k1=0.5, k2=3.0, alpha=0.5)
        gas = FluidSpec(FluidKind.GAS,
                        supplies=[SupplyNode("low", 2.0)],
                        storages=[StorageNode("high", 3.0, 0.01)],
                        compressors=[compressor])

        def flow(hi, hj):
            sign = 1.0 if hi >= hj else -1.0
            return sign * 1.0 / (3.0 - 0.5 * (max(hi, hj) / min(hi, hj)) ** 0.5)

        linearization = linearizeCoupling(gas)[0]
        h = 1e-6
        numeric = ((flow(2.0 + h, 3.0) - flow(2.0 - h, 3.0)) / (2 * h),
                   (flow(2.0, 3.0 + h) - flow(2.0, 3.0 - h)) / (2 * h))
        assert linearization.kind == "compressor"
        assert linearization.flow == pytest.approx(flow(2.0, 3.0))
        assert linearization.flowPartials == pytest.approx(numeric, rel=1e-6)
        assert len(linearization.powerPartials) == 2

    def test_zeroPressureDrop(self):
        gas = FluidSpec(FluidKind.GAS,
                        supplies=[SupplyNode("well", 2.0)],
                        storages=[StorageNode("S", 2.0, 0.01)],
                        pipes=[Pipe("P", "well", "S", 1.0)])
        with pytest.raises(ZeroPressureDropError):
            linearizeCoupling(gas)

    def test_compressorSingular(self):
        gas = FluidSpec(FluidKind.GAS,
                        supplies=[SupplyNode("low", 2.0)],
                        storages=[StorageNode("high", 3.0, 0.01)],
                        compressors=[Compressor("C", "low", "high", power=1.0, k1=1.0, k2=1.5, alpha=1.0)])
        with pytest.raises(CompressorSingularError):
            linearizeCoupling(gas)

class TestSpecifications():

    def test_invalidComponents(self):
        with pytest.raises(InvalidSpecificationError):
            Generator("G", -0.2, 0.5)
        with pytest.raises(InvalidSpecificationError):
            Pipe("P", "a", "b", 0.0)
        with pytest.raises(InvalidSpecificationError):
            PowerSpec([Generator("G", 0.2, 0.5), Generator("G", 0.2, 0.5)], Lgg=numpy.eye(2))
        with pytest.raises(InvalidSpecificationError):
            PowerSpec([Generator("G", 0.2, 0.5)], Lgg=numpy.eye(2))

    def test_danglingPipe(self):
        with pytest.raises(InvalidSpecificationError):
            FluidSpec(FluidKind.GAS, supplies=[SupplyNode("well", 2.0)], pipes=[Pipe("P", "well", "nowhere", 1.0)])

    def test_compressorInWater(self):
        with pytest.raises(InvalidSpecificationError):
            FluidSpec(FluidKind.WATER, compressors=[Compressor("C", "a", "b", 1.0, 0.5, 3.0, 0.5)])

    def test_gasToOtherFuel(self):
        coupling = CouplingSpec(gasToGenerator=[CouplingEntry("S", "G", 1.0)])
        with pytest.raises(InvalidSpecificationError):
            coupling.validate(singleGenerator("other"), singleStorageGas(), emptyWater())

    def test_scaled(self):
        coupling = CouplingSpec(gasToGenerator=[CouplingEntry("S", "G", 1.5)])
        assert coupling.scaled(2.0).gasToGenerator[0].coefficient == 3.0
        assert CouplingSpec().isEmpty
        assert not coupling.isEmpty

    def test_costVector(self):
        layout = stateLayout(singleGenerator(), singleStorageGas(), emptyWater())
        assert [label for label, _, _ in layout] == ["delta.G", "omega.G", "gas.S"]
        assert list(costVector(layout, delta=0.5, omega=2.0, overrides={"omega.G": 3.0})) == [0.5, 3.0, 0.0]
        with pytest.raises(InvalidSpecificationError):
            costVector(layout, overrides={"gas.S": 1.0})
        with pytest.raises(InvalidSpecificationError):
            costVector(layout, overrides={"omega.H": 1.0})

class TestAssemble():

    def assembleSmall(self, partition, measured=None):
        coupling = CouplingSpec(gasToGenerator=[CouplingEntry("S", "G", 1.0)])
        return assemble(singleGenerator(), singleStorageGas(), emptyWater(), coupling, partition,
                        {"delta": 0.0, "omega": 1.0}, measured)

    def test_small(self):
        system = self.assembleSmall(collections.OrderedDict([("E", ["G"]), ("GS", ["S"])]))
        assert system.n == 3
        assert system.A[1, 2] == 1.0
        assert list(system.partition) == [0, 0, 1]
        assert system.C.shape == (3, 3)

    def test_measured(self):
        system = self.assembleSmall(collections.OrderedDict([("E", ["G"]), ("GS", ["S"])]), measured=["gas.S", "omega.G"])
        assert system.C.shape == (2, 3)
        # outputs are grouped by subsystem
        assert list(numpy.flatnonzero(system.C[0])) == [1]
        assert list(numpy.flatnonzero(system.C[1])) == [2]
        assert list(system.subsystemOutputs(1)) == [1]

    def test_partitionMissing(self):
        with pytest.raises(PartitionMismatchError):
            self.assembleSmall(collections.OrderedDict([("E", ["G"])]))

    def test_partitionTwice(self):
        with pytest.raises(PartitionMismatchError):
            self.assembleSmall(collections.OrderedDict([("E", ["G"]), ("GS", ["S", "G"])]))

    def test_partitionUnknown(self):
        with pytest.raises(PartitionMismatchError):
            self.assembleSmall(collections.OrderedDict([("E", ["G"]), ("GS", ["S", "X"])]))

    def test_algebraicBus(self):
        power = PowerSpec([Generator("G", 0.2, 0.5)], [Bus("L", BusClass.LOAD)],
                          Lgg=[[2.0]], Lgl=[[-1.0]], Llg=[[-1.0]], Lll=[[2.0]])
        system = assemble(power, FluidSpec(FluidKind.GAS), emptyWater(), CouplingSpec(),
                          collections.OrderedDict([("E", ["G", "L"])]), {"omega": 1.0})
        assert list(system.labels) == ["delta.G", "omega.G", "theta.L"]
        assert list(system.algebraicStates) == [2]
        assert system.stabilityMargin > 0

class TestPencil():

    def test_schurComplement(self):
        eigenvalues = pencilEigenvalues(numpy.diag([1.0, 0.0]), numpy.array([[-1.0, 1.0], [1.0, -2.0]]))
        assert eigenvalues.size == 1
        assert eigenvalues[0] == pytest.approx(-0.5)

    def test_ordering(self):
        eigenvalues = pencilEigenvalues(numpy.eye(3), numpy.diag([-3.0, -1.0, -2.0]))
        assert list(eigenvalues.real) == pytest.approx([-1.0, -2.0, -3.0])

    def test_irregular(self):
        with pytest.raises(IrregularPencilError):
            DescriptorSystem.fromMatrices(numpy.diag([1.0, 0.0]), numpy.array([[-1.0, 0.0], [0.0, 0.0]]))

    def test_unstable(self):
        with pytest.raises(UnstableSystemError) as e:
            DescriptorSystem.fromMatrices(numpy.eye(2), numpy.array([[0.0, 1.0], [-1.0, 0.0]]))
        assert e.value.eigenvalue.real == pytest.approx(0.0)

    def test_fromMatrices(self):
        system = DescriptorSystem.fromMatrices(numpy.eye(2), -numpy.eye(2), partition=[0, 1])
        assert list(system.subsystemNames) == ["S0", "S1"]
        assert list(system.labels) == ["x0", "x1"]
        assert system.stabilityMargin == pytest.approx(1.0)

    def test_crossSubsystemOutput(self):
        with pytest.raises(InvalidSpecificationError):
            DescriptorSystem.fromMatrices(numpy.eye(2), -numpy.eye(2), C=[[1.0, 1.0]], partition=[0, 1])
