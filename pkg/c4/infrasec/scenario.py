"""
Copyright (c) IBM 2015-2017. All Rights Reserved.
Project name: c4-infrasec
This project is licensed under the MIT License, see LICENSE

This library contains the scenario format describing an interdependent
infrastructure together with the attack, defense, detection and solver settings
of an experiment.

Scenarios are Hjson documents. A document only needs to specify what differs
from the built-in defaults, it is merged over them section by section:

.. code-block:: none

    # numbers are in per unit unless a comment names another unit
    name: two-generator
    power: {
        generators: [
            {name: "G1", fuel: "gas", inertia: 0.2, damping: 0.5}
            ...
        ]
    }

Errors name the offending field, e.g., ``gas.pipes[P2]: constant of pipe 'P2' must be positive``.

.. code-block:: python

    scenario = Scenario.fromHjsonFile("scenarios/reference.hjson")
    system = scenario.buildSystem()

Functionality
-------------
"""

import collections
import copy
import logging
import numbers
import re

import hjson

import c4.infrasec.exceptions
import c4.infrasec.logutil
import c4.infrasec.model
import c4.infrasec.util
from c4.infrasec.detection import FilterConfig
from c4.infrasec.dynamics import AttackScenario, Waveform
from c4.infrasec.exceptions import InfrasecError, ScenarioError
from c4.infrasec.game import ALL, ELECTRIC, GameSetup


log = logging.getLogger(__name__)

BUDGET_CONVENTIONS = ("connections", "window")
HJSON_INDENT = 2

DEFAULTS = {
    "name": "scenario",
    "description": "",
    "power": {
        "generators": [],
        "buses": [],
        "susceptance": {"gg": [], "gl": [], "lg": [], "ll": []},
    },
    "gas": {
        "supplies": [],
        "storages": [],
        "junctions": [],
        "pipes": [],
        "compressors": [],
        "exponent": c4.infrasec.model.GAS_EXPONENT,
    },
    "water": {
        "supplies": [],
        "storages": [],
        "junctions": [],
        "pipes": [],
        "treatmentPlants": [],
        "exponent": c4.infrasec.model.WATER_EXPONENT,
    },
    "coupling": {
        "gasToGenerator": [],
        "waterToGenerator": [],
        "compressorToBus": [],
        "treatmentToBus": [],
    },
    "subsystems": [],
    "costs": {"delta": 0.0, "omega": 1.0, "theta": 0.0, "overrides": {}},
    "measurements": {"states": ALL},
    "nominalCost": 1.0,
    "simulation": {
        "horizon": 10.0,
        "step": 1e-3,
        "waveform": {"kind": "pulse", "magnitude": 1.0, "start": 1.0, "end": 4.0},
        "attack": [],
    },
    "attacker": {
        "maxStates": 5,
        "restriction": ALL,
        "waveform": {"kind": "step", "magnitude": 1.0, "start": 0.0},
        "exactSize": False,
        "includeEmpty": False,
        "cap": 5000,
    },
    "defender": {
        "window": 5.0,
        "connections": 1200,
        "budgetConvention": "connections",
        "granularity": 100,
        "restriction": ALL,
        "exactBudget": True,
        "cap": 20000,
    },
    "detection": {
        "gamma": 1.0,
        "threshold": 1e-5,
        "maxIterations": 100,
        "tolerance": 1e-8,
        "window": 5.0,
    },
    "solver": {
        "maxIterations": 20000,
        "tolerance": 1e-3,
        "payoffStep": 1e-4,
        "processes": 1,
        "seed": 0,
    },
}
SECTIONS = tuple(DEFAULTS)
OPTIONAL_FIELDS = {"defender": ("budget",)}

# required and optional fields of list entries
ENTRY_FIELDS = {
    "generators": (("name", "inertia", "damping"), ("fuel",)),
    "buses": (("name",), ("kind",)),
    "supplies": (("name", "head"), ()),
    "storages": (("name", "head", "chargingRatio"), ()),
    "junctions": (("name", "head"), ("demand",)),
    "pipes": (("name", "from", "to", "constant"), ()),
    "compressors": (("name", "from", "to", "power", "k1", "k2", "alpha"), ()),
    "treatmentPlants": (("name", "node", "powerPerHead"), ()),
    "gasToGenerator": (("node", "generator", "coefficient"), ()),
    "waterToGenerator": (("node", "generator", "coefficient"), ()),
    "compressorToBus": (("compressor", "bus", "coefficient"), ()),
    "treatmentToBus": (("plant", "bus", "coefficient"), ()),
    "subsystems": (("name", "components"), ()),
}
WAVEFORM_FIELDS = ("kind", "magnitude", "start", "end", "frequency")

def _build(path, factory, *arguments, **keyValueArguments):
    try:
        return factory(*arguments, **keyValueArguments)
    except InfrasecError as e:
        raise e.withPath(path)
    except (TypeError, ValueError) as e:
        raise ScenarioError(str(e), path)

def _toPlain(value):
    # hjson returns ordered dictionaries, documents compare and hash as plain ones
    if isinstance(value, dict):
        return {key: _toPlain(item) for key, item in value.items()}
    if isinstance(value, list):
        return [_toPlain(item) for item in value]
    return value

@c4.infrasec.logutil.ClassLogger
class Scenario(object):
    """
    Experiment scenario

    :param document: scenario document, merged over :data:`DEFAULTS`
    :type document: dict
    :raises ScenarioError: if a section or field is unknown or malformed
    """
    def __init__(self, document=None):
        document = _toPlain(document or {})
        if not isinstance(document, dict):
            raise ScenarioError("a scenario must be a mapping of sections")
        unknown = sorted(set(document) - set(SECTIONS))
        if unknown:
            raise ScenarioError("unknown section", path=unknown[0])
        self.document = c4.infrasec.util.mergeDictionaries(DEFAULTS, document)
        self._validate()

    @classmethod
    def fromHjson(cls, hjsonString):
        """
        Parse a scenario from an Hjson string

        :param hjsonString: Hjson document
        :type hjsonString: str
        :rtype: :class:`Scenario`
        :raises ScenarioError: with the line number if the document does not parse
        """
        try:
            document = hjson.loads(hjsonString)
        except hjson.HjsonDecodeError as e:
            raise ScenarioError(e.msg, line=e.lineno)
        return cls(document)

    @classmethod
    def fromHjsonFile(cls, fileName):
        """
        Parse a scenario file

        :param fileName: file name
        :type fileName: str
        :rtype: :class:`Scenario`
        :raises ScenarioError: if the file cannot be read or parsed
        """
        try:
            with open(fileName) as scenarioFile:
                content = scenarioFile.read()
        except (IOError, OSError) as e:
            raise ScenarioError("cannot read scenario: %s" % e.strerror, path=fileName)
        return cls.fromHjson(content)

    def toHjson(self):
        """
        Convert the scenario into an Hjson document

        Sections keep the order of :data:`SECTIONS`, the root braces are
        left out like in hand written scenario files.

        :rtype: str
        """
        document = collections.OrderedDict((section, copy.deepcopy(self.document[section])) for section in SECTIONS)
        hjsonString = hjson.dumps(document, indent=HJSON_INDENT)
        # remove root {} and indent
        hjsonString = "\n".join(line[HJSON_INDENT:] for line in hjsonString.strip()[1:-1].splitlines())
        # keep the opening { of a section on the line of its key
        hjsonString = re.sub(r":\s+\{", ": {", hjsonString, flags=re.MULTILINE)
        return hjsonString.strip("\n")

    def toHjsonFile(self, fileName):
        """
        Write the scenario to an Hjson file

        :param fileName: file name
        :type fileName: str
        """
        hjsonString = self.toHjson()
        self.log.debug("writing scenario '%s' to '%s'", self.name, fileName)
        with open(fileName, "w", newline="\n") as hjsonFile:
            hjsonFile.write(hjsonString)
            hjsonFile.write("\n")

    def __eq__(self, other):
        return isinstance(other, Scenario) and self.document == other.document

    def __ne__(self, other):
        return not self == other

    def withOverrides(self, overrides):
        """
        Copy of the scenario with some fields replaced

        :param overrides: partial document, ``None`` values are ignored
        :type overrides: dict
        :rtype: :class:`Scenario`
        """
        def prune(value):
            if isinstance(value, dict):
                pruned = {key: prune(item) for key, item in value.items() if item is not None}
                return {key: item for key, item in pruned.items() if item != {}}
            return value
        return Scenario(c4.infrasec.util.mergeDictionaries(self.document, prune(overrides)))

    @property
    def configHash(self):
        """
        Provenance hash of the effective scenario
        """
        return c4.infrasec.util.configHash(self.document)

    @property
    def name(self):
        """
        Scenario name
        """
        return self.document["name"]

    # field access and validation

    def _value(self, path):
        value = self.document
        for key in path.split("."):
            value = value[key]
        return value

    def _number(self, path, integer=False, positive=False, nonNegative=False):
        value = self._value(path)
        if isinstance(value, bool) or not isinstance(value, numbers.Real):
            raise ScenarioError("expected a number, got %r" % (value,), path)
        if integer and int(value) != value:
            raise ScenarioError("expected an integer, got %r" % (value,), path)
        if positive and not value > 0:
            raise ScenarioError("must be positive, got %r" % (value,), path)
        if nonNegative and value < 0:
            raise ScenarioError("must not be negative, got %r" % (value,), path)
        return int(value) if integer else float(value)

    def _flag(self, path):
        value = self._value(path)
        if not isinstance(value, bool):
            raise ScenarioError("expected true or false, got %r" % (value,), path)
        return value

    def _choice(self, path, choices):
        value = self._value(path)
        if value not in choices:
            raise ScenarioError("expected one of %s, got %r" % (", ".join(choices), value), path)
        return value

    def _entries(self, path):
        entries = self._value(path)
        if not isinstance(entries, list):
            raise ScenarioError("expected a list", path)
        required, optional = ENTRY_FIELDS[path.split(".")[-1]]
        checked = []
        for position, entry in enumerate(entries):
            if not isinstance(entry, dict):
                raise ScenarioError("expected a mapping", "%s[%d]" % (path, position))
            entryPath = "%s[%s]" % (path, entry.get("name", position))
            missing = [field for field in required if field not in entry]
            if missing:
                raise ScenarioError("missing fields %s" % ", ".join(missing), entryPath)
            unknown = sorted(set(entry) - set(required) - set(optional))
            if unknown:
                raise ScenarioError("unknown field", "%s.%s" % (entryPath, unknown[0]))
            checked.append((entryPath, entry))
        return checked

    def _waveform(self, path):
        settings = self._value(path)
        if not isinstance(settings, dict):
            raise ScenarioError("expected a mapping", path)
        unknown = sorted(set(settings) - set(WAVEFORM_FIELDS))
        if unknown:
            raise ScenarioError("unknown field", "%s.%s" % (path, unknown[0]))
        return _build(path, Waveform, **settings)

    def _labels(self, path):
        value = self._value(path)
        if not isinstance(value, list) or not all(isinstance(label, str) for label in value):
            raise ScenarioError("expected a list of state labels", path)
        return list(value)

    def _validate(self):
        for section, defaults in DEFAULTS.items():
            if isinstance(defaults, dict):
                if not isinstance(self.document[section], dict):
                    raise ScenarioError("expected a mapping", section)
                allowed = set(defaults) | set(OPTIONAL_FIELDS.get(section, ()))
                unknown = sorted(set(self.document[section]) - allowed)
                if unknown:
                    raise ScenarioError("unknown field", "%s.%s" % (section, unknown[0]))
        for section in ("power.generators", "power.buses", "subsystems"):
            self._entries(section)
        for fluid in ("gas", "water"):
            for key in DEFAULTS[fluid]:
                if key != "exponent":
                    self._entries("%s.%s" % (fluid, key))
            self._number("%s.exponent" % fluid, positive=True)
        for key in DEFAULTS["coupling"]:
            self._entries("coupling.%s" % key)
        if not isinstance(self._value("costs.overrides"), dict):
            raise ScenarioError("expected a mapping of state labels to costs", "costs.overrides")
        for key in ("delta", "omega", "theta"):
            self._number("costs.%s" % key, nonNegative=True)
        if self._value("measurements.states") != ALL:
            self._labels("measurements.states")
        self._number("nominalCost", positive=True)

        self._number("simulation.horizon", positive=True)
        self._number("simulation.step", positive=True)
        self._waveform("simulation.waveform")
        self._labels("simulation.attack")

        self._number("attacker.maxStates", integer=True, nonNegative=True)
        if self._value("attacker.restriction") not in (ALL, ELECTRIC):
            self._labels("attacker.restriction")
        self._waveform("attacker.waveform")
        self._flag("attacker.exactSize")
        self._flag("attacker.includeEmpty")
        self._number("attacker.cap", integer=True, positive=True)

        self._number("defender.window", positive=True)
        self._number("defender.connections", integer=True, positive=True)
        self._choice("defender.budgetConvention", BUDGET_CONVENTIONS)
        if "budget" in self.document["defender"]:
            self._number("defender.budget", integer=True, positive=True)
        self._number("defender.granularity", integer=True, positive=True)
        self._choice("defender.restriction", (ALL, ELECTRIC))
        self._flag("defender.exactBudget")
        self._number("defender.cap", integer=True, positive=True)

        self._number("detection.gamma", positive=True)
        self._number("detection.threshold", positive=True)
        self._number("detection.maxIterations", integer=True, positive=True)
        self._number("detection.tolerance", positive=True)
        self._number("detection.window", positive=True)

        self._number("solver.maxIterations", integer=True, positive=True)
        self._number("solver.tolerance", positive=True)
        self._number("solver.payoffStep", positive=True)
        self._number("solver.processes", integer=True, positive=True)
        self._number("solver.seed", integer=True, nonNegative=True)

    # model construction

    def powerSpec(self):
        """
        Electric system of the scenario

        :rtype: :class:`~c4.infrasec.model.PowerSpec`
        """
        generators = [_build(path, c4.infrasec.model.Generator, entry["name"], entry["inertia"], entry["damping"],
                             entry.get("fuel", c4.infrasec.model.FuelClass.OTHER.value))
                      for path, entry in self._entries("power.generators")]
        buses = [_build(path, c4.infrasec.model.Bus, entry["name"], entry.get("kind", c4.infrasec.model.BusClass.LOAD.value))
                 for path, entry in self._entries("power.buses")]
        susceptance = self._value("power.susceptance")
        return _build("power.susceptance", c4.infrasec.model.PowerSpec, generators, buses,
                      susceptance["gg"], susceptance["gl"], susceptance["lg"], susceptance["ll"])

    def fluidSpec(self, kind):
        """
        Gas or water network of the scenario, checked for a valid linearization

        :param kind: ``gas`` or ``water``
        :type kind: str
        :rtype: :class:`~c4.infrasec.model.FluidSpec`
        """
        model = c4.infrasec.model
        supplies = [_build(path, model.SupplyNode, entry["name"], entry["head"])
                    for path, entry in self._entries("%s.supplies" % kind)]
        storages = [_build(path, model.StorageNode, entry["name"], entry["head"], entry["chargingRatio"])
                    for path, entry in self._entries("%s.storages" % kind)]
        junctions = [_build(path, model.JunctionNode, entry["name"], entry["head"], entry.get("demand", 0.0))
                     for path, entry in self._entries("%s.junctions" % kind)]
        pipes = [_build(path, model.Pipe, entry["name"], entry["from"], entry["to"], entry["constant"])
                 for path, entry in self._entries("%s.pipes" % kind)]
        compressors = []
        treatmentPlants = []
        if kind == model.FluidKind.GAS.value:
            compressors = [_build(path, model.Compressor, entry["name"], entry["from"], entry["to"], entry["power"],
                                  entry["k1"], entry["k2"], entry["alpha"])
                           for path, entry in self._entries("gas.compressors")]
        else:
            treatmentPlants = [_build(path, model.TreatmentPlant, entry["name"], entry["node"], entry["powerPerHead"])
                               for path, entry in self._entries("water.treatmentPlants")]
        fluid = _build(kind, model.FluidSpec, kind, supplies, storages, junctions, pipes, compressors,
                       treatmentPlants, self._value("%s.exponent" % kind))
        _build(kind, model.linearizeCoupling, fluid)
        return fluid

    def couplingSpec(self):
        """
        Interdependence of the scenario

        :rtype: :class:`~c4.infrasec.model.CouplingSpec`
        """
        fields = {
            "gasToGenerator": ("node", "generator"),
            "waterToGenerator": ("node", "generator"),
            "compressorToBus": ("compressor", "bus"),
            "treatmentToBus": ("plant", "bus"),
        }
        maps = {}
        for key, (source, target) in sorted(fields.items()):
            maps[key] = [_build(path, c4.infrasec.model.CouplingEntry, entry[source], entry[target], entry["coefficient"])
                         for path, entry in self._entries("coupling.%s" % key)]
        return c4.infrasec.model.CouplingSpec(**maps)

    def partition(self):
        """
        Subsystem name to component names

        :rtype: :class:`collections.OrderedDict`
        """
        partition = collections.OrderedDict()
        for path, entry in self._entries("subsystems"):
            if entry["name"] in partition:
                raise ScenarioError("duplicate subsystem '%s'" % entry["name"], path)
            if not isinstance(entry["components"], list) or not entry["components"]:
                raise ScenarioError("expected a nonempty list of component names", path + ".components")
            partition[entry["name"]] = list(entry["components"])
        return partition

    def buildSystem(self, couplingScale=1.0):
        """
        Assemble the descriptor system

        :param couplingScale: factor applied to all coupling coefficients, ``0`` decouples
            the infrastructures
        :type couplingScale: float
        :rtype: :class:`~c4.infrasec.model.DescriptorSystem`
        """
        power = self.powerSpec()
        gas = self.fluidSpec(c4.infrasec.model.FluidKind.GAS.value)
        water = self.fluidSpec(c4.infrasec.model.FluidKind.WATER.value)
        coupling = self.couplingSpec()
        _build("coupling", coupling.validate, power, gas, water)
        if couplingScale != 1.0:
            coupling = coupling.scaled(couplingScale)
        partition = self.partition()
        costs = self.document["costs"]
        measured = self._value("measurements.states")
        measured = None if measured == ALL else measured
        try:
            system = c4.infrasec.model.assemble(power, gas, water, coupling, partition, costs, measured)
        except c4.infrasec.exceptions.PartitionMismatchError as e:
            raise e.withPath("subsystems")
        self.log.info("assembled '%s' with %d states in %d subsystems", self.name, system.n, system.subsystemCount)
        return system

    # experiment settings

    @property
    def nominalCost(self):
        """
        Nominal generation cost, the reference of percent cost deviations
        """
        return self._number("nominalCost", positive=True)

    @property
    def simulationWaveform(self):
        """
        Waveform of simulated attacks
        """
        return self._waveform("simulation.waveform")

    @property
    def attackerWaveform(self):
        """
        Waveform the attacker uses in the game
        """
        return self._waveform("attacker.waveform")

    def simulationAttack(self, system):
        """
        Attack of the simulate command

        :param system: descriptor system
        :type system: :class:`~c4.infrasec.model.DescriptorSystem`
        :rtype: :class:`~c4.infrasec.dynamics.AttackScenario`
        """
        horizon = self._value("simulation.horizon")
        labels = self._labels("simulation.attack")
        if not labels:
            return AttackScenario.null(horizon)
        states = [_build("simulation.attack", system.index, label) for label in labels]
        return AttackScenario(states, self.simulationWaveform, horizon)

    @property
    def budget(self):
        """
        Connection budget ``B``, either explicit or ``M`` or ``T M`` depending on the convention
        """
        defender = self.document["defender"]
        if "budget" in defender:
            return int(defender["budget"])
        if defender["budgetConvention"] == "window":
            return int(round(defender["window"] * defender["connections"]))
        return int(defender["connections"])

    def gameSetup(self, system):
        """
        Game of the scenario

        :param system: descriptor system
        :type system: :class:`~c4.infrasec.model.DescriptorSystem`
        :rtype: :class:`~c4.infrasec.game.GameSetup`
        """
        attacker = self.document["attacker"]
        defender = self.document["defender"]
        solver = self.document["solver"]
        return _build("defender", GameSetup, system, self.attackerWaveform, defender["window"], self.budget,
                      granularity=defender["granularity"], maxStates=attacker["maxStates"],
                      step=solver["payoffStep"], exactBudget=defender["exactBudget"],
                      exactSize=attacker["exactSize"], includeEmpty=attacker["includeEmpty"],
                      attackCap=attacker["cap"], allocationCap=defender["cap"], processes=solver["processes"])

    @property
    def attackerRestriction(self):
        """
        ``all``, ``electric`` or a list of state labels
        """
        return self.document["attacker"]["restriction"]

    @property
    def defenderRestriction(self):
        """
        ``all`` or ``electric``
        """
        return self.document["defender"]["restriction"]

    def filterConfig(self, system):
        """
        Attack detection filter of the scenario

        :param system: descriptor system
        :type system: :class:`~c4.infrasec.model.DescriptorSystem`
        :rtype: :class:`~c4.infrasec.detection.FilterConfig`
        """
        detection = self.document["detection"]
        return _build("detection", FilterConfig.fromSystem, system, detection["window"], gamma=detection["gamma"],
                      maxIterations=detection["maxIterations"], threshold=detection["threshold"],
                      tolerance=detection["tolerance"])

    def setting(self, path):
        """
        Value of a field

        :param path: dotted field path, e.g., ``solver.tolerance``
        :type path: str
        """
        try:
            return copy.deepcopy(self._value(path))
        except (KeyError, TypeError):
            raise ScenarioError("unknown field", path)

def referenceScenario():
    """
    The reference scenario: four generators in two electric subsystems, two gas
    storages feeding the gas-fired generators and two water tanks supplying cooling
    water, each storage forming its own subsystem

    :rtype: :class:`Scenario`
    """
    def generator(name, fuel, inertia):
        return {"name": name, "fuel": fuel, "inertia": inertia, "damping": 0.5}

    def storage(name):
        return {"name": name, "head": 2.0, "chargingRatio": 0.005}

    def pipe(name, source, target):
        return {"name": name, "from": source, "to": target, "constant": 1.0}

    def injection(node, generatorName, coefficient):
        return {"node": node, "generator": generatorName, "coefficient": coefficient}

    document = {
        "name": "reference",
        "description": "four generators coupled to two gas storages and two water tanks",
        "power": {
            "generators": [
                generator("G1", "gas", 0.2),
                generator("G2", "other", 0.25),
                generator("G3", "gas", 0.2),
                generator("G4", "other", 0.3),
            ],
            "buses": [],
            "susceptance": {
                "gg": [[3.0, -2.0, 0.0, 0.0],
                       [-2.0, 3.5, -0.5, 0.0],
                       [0.0, -0.5, 3.5, -2.0],
                       [0.0, 0.0, -2.0, 3.0]],
                "gl": [],
                "lg": [],
                "ll": [],
            },
        },
        "gas": {
            "supplies": [{"name": "well", "head": 3.0}, {"name": "citygate", "head": 1.0}],
            "storages": [storage("S1"), storage("S2")],
            "junctions": [],
            "pipes": [pipe("GP1", "well", "S1"), pipe("GP2", "S1", "citygate"),
                      pipe("GP3", "well", "S2"), pipe("GP4", "S2", "citygate")],
            "compressors": [],
            "exponent": c4.infrasec.model.GAS_EXPONENT,
        },
        "water": {
            "supplies": [{"name": "reservoir", "head": 3.0}, {"name": "outfall", "head": 1.0}],
            "storages": [storage("T1"), storage("T2")],
            "junctions": [],
            "pipes": [pipe("WP1", "reservoir", "T1"), pipe("WP2", "T1", "outfall"),
                      pipe("WP3", "reservoir", "T2"), pipe("WP4", "T2", "outfall")],
            "treatmentPlants": [],
            "exponent": c4.infrasec.model.WATER_EXPONENT,
        },
        "coupling": {
            "gasToGenerator": [injection("S1", "G1", 2.0), injection("S2", "G3", 1.6)],
            "waterToGenerator": [injection("T1", "G1", 0.5), injection("T1", "G2", 0.5),
                                 injection("T2", "G3", 0.5), injection("T2", "G4", 0.5)],
            "compressorToBus": [],
            "treatmentToBus": [],
        },
        "subsystems": [
            {"name": "E1", "components": ["G1", "G2"]},
            {"name": "E2", "components": ["G3", "G4"]},
            {"name": "GS1", "components": ["S1"]},
            {"name": "GS2", "components": ["S2"]},
            {"name": "WT1", "components": ["T1"]},
            {"name": "WT2", "components": ["T2"]},
        ],
        "costs": {"delta": 0.2, "omega": 1.0, "theta": 0.0, "overrides": {}},
        "nominalCost": 10.0,
        "simulation": {
            "horizon": 10.0,
            "step": 1e-3,
            "waveform": {"kind": "pulse", "magnitude": 1.0, "start": 1.0, "end": 4.0},
            "attack": ["gas.S1"],
        },
    }
    return Scenario(document)
