import copy
import logging
import os

import pytest

from c4.infrasec.exceptions import (InvalidSpecificationError,
                                    PartitionMismatchError,
                                    ScenarioError)
from c4.infrasec.scenario import Scenario, referenceScenario


log = logging.getLogger(__name__)

REFERENCE_FILE = os.path.join(os.path.dirname(os.path.abspath(__file__)), "..", "scenarios", "reference.hjson")

@pytest.fixture
def reference():
    return referenceScenario()

def modified(scenario, change):
    """
    Scenario built from a changed copy of the document of ``scenario``
    """
    document = copy.deepcopy(scenario.document)
    change(document)
    return Scenario(document)

def test_referenceFile(reference):
    assert Scenario.fromHjsonFile(REFERENCE_FILE) == reference

def test_roundTrip(reference, tmpdir):
    assert Scenario.fromHjson(reference.toHjson()) == reference
    fileName = str(tmpdir.join("scenario.hjson"))
    reference.toHjsonFile(fileName)
    loaded = Scenario.fromHjsonFile(fileName)
    assert loaded == reference
    assert loaded.configHash == reference.configHash

def test_hjsonLayout(reference, tmpdir):
    hjsonString = reference.toHjson()
    lines = hjsonString.splitlines()
    # no root braces, sections start at the first column in declaration order
    assert lines[0].startswith("name:")
    assert not hjsonString.startswith("{")
    assert "power: {" in lines
    assert lines.index("power: {") < lines.index("solver: {")

    fileName = str(tmpdir.join("scenario.hjson"))
    reference.toHjsonFile(fileName)
    with open(fileName, "rb") as f:
        content = f.read()
    assert content == (hjsonString + "\n").encode("utf-8")
    assert b"\r\n" not in content

def test_defaults():
    scenario = Scenario({"name": "empty"})
    assert scenario.name == "empty"
    assert scenario.setting("solver.tolerance") == 1e-3
    assert scenario.setting("defender.granularity") == 100
    assert scenario.budget == 1200

class TestErrors():

    def test_unknownSection(self):
        with pytest.raises(ScenarioError) as e:
            Scenario({"foo": {}})
        assert e.value.path == "foo"

    def test_unknownField(self):
        with pytest.raises(ScenarioError) as e:
            Scenario({"solver": {"speed": 1}})
        assert e.value.path == "solver.speed"
        assert str(e.value).startswith("solver.speed: ")

    def test_unknownEntryField(self, reference):
        with pytest.raises(ScenarioError) as e:
            modified(reference, lambda document: document["power"]["generators"][0].update(color="red"))
        assert e.value.path == "power.generators[G1].color"

    def test_missingEntryField(self, reference):
        with pytest.raises(ScenarioError) as e:
            modified(reference, lambda document: document["gas"]["pipes"][0].pop("constant"))
        assert e.value.path == "gas.pipes[GP1]"

    def test_negativePipeConstant(self, reference):
        scenario = modified(reference, lambda document: document["gas"]["pipes"][0].update(constant=-1.0))
        with pytest.raises(InvalidSpecificationError) as e:
            scenario.buildSystem()
        assert e.value.path == "gas.pipes[GP1]"

    @pytest.mark.parametrize("path,value", [
        ("solver.tolerance", "fast"),
        ("solver.tolerance", -1.0),
        ("solver.processes", 1.5),
        ("attacker.exactSize", "yes"),
        ("defender.budgetConvention", "hours"),
        ("defender.restriction", ["E1"]),
    ])
    def test_invalidValue(self, reference, path, value):
        section, field = path.split(".")
        with pytest.raises(ScenarioError) as e:
            reference.withOverrides({section: {field: value}})
        assert e.value.path == path

    def test_parseError(self):
        with pytest.raises(ScenarioError) as e:
            Scenario.fromHjson("{\n  name: broken\n  solver: {\n    tolerance: [1e-3\n  }\n")
        assert e.value.line is not None
        assert str(e.value).startswith("line ")

    def test_missingFile(self, tmpdir):
        with pytest.raises(ScenarioError) as e:
            Scenario.fromHjsonFile(str(tmpdir.join("missing.hjson")))
        assert e.value.path.endswith("missing.hjson")

    def test_partitionMismatch(self, reference):
        scenario = modified(reference, lambda document: document["subsystems"].pop())
        with pytest.raises(PartitionMismatchError) as e:
            scenario.buildSystem()
        assert e.value.path == "subsystems"

    def test_unknownSetting(self, reference):
        with pytest.raises(ScenarioError):
            reference.setting("solver.speed")

class TestSettings():

    def test_budgetConventions(self, reference):
        assert reference.budget == 1200
        window = reference.withOverrides({"defender": {"budgetConvention": "window", "connections": 240}})
        assert window.budget == 1200
        explicit = window.withOverrides({"defender": {"budget": 1600}})
        assert explicit.budget == 1600

    def test_withOverrides(self, reference):
        assert reference.withOverrides({"solver": {"tolerance": None}}) == reference
        changed = reference.withOverrides({"solver": {"tolerance": 1e-4}})
        assert changed.setting("solver.tolerance") == 1e-4
        assert changed.setting("solver.maxIterations") == reference.setting("solver.maxIterations")
        assert changed.configHash != reference.configHash
        assert reference.setting("solver.tolerance") == 1e-3

    def test_simulationAttack(self, reference):
        system = reference.buildSystem()
        attack = reference.simulationAttack(system)
        assert attack.states == (system.index("gas.S1"),)
        assert attack.horizon == 10.0
        assert attack.waveform.kind == "pulse"
        assert reference.withOverrides({"simulation": {"attack": []}}).simulationAttack(system).isNull
        unknown = reference.withOverrides({"simulation": {"attack": ["gas.S9"]}})
        with pytest.raises(InvalidSpecificationError) as e:
            unknown.simulationAttack(system)
        assert e.value.path == "simulation.attack"

    def test_gameSetup(self, reference):
        system = reference.buildSystem()
        setup = reference.gameSetup(system)
        assert setup.budget == 1200
        assert setup.granularity == 100
        assert setup.maxStates == 5
        assert setup.window == 5.0
        assert setup.step == 1e-4
        assert setup.waveform.kind == "step"
        assert reference.attackerRestriction == "all"
        assert reference.defenderRestriction == "all"

    def test_filterConfig(self, reference):
        system = reference.buildSystem()
        config = reference.filterConfig(system)
        assert config.window == 5.0
        assert config.threshold == 1e-5
        assert config.maxIterations == 100
        with pytest.raises(InvalidSpecificationError) as e:
            reference.withOverrides({"detection": {"gamma": 1e7}}).filterConfig(system)
        assert e.value.path == "detection"

    def test_couplingScale(self, reference):
        assert reference.buildSystem(couplingScale=0.0).couplingDensity == 0.0
        assert reference.buildSystem().couplingDensity == pytest.approx(6.0 / 64.0)

    def test_measuredStates(self, reference):
        scenario = reference.withOverrides({"measurements": {"states": ["gas.S1", "omega.G1"]}})
        system = scenario.buildSystem()
        assert system.C.shape == (2, 12)
        assert list(system.measuredStates) == [system.index("omega.G1"), system.index("gas.S1")]
