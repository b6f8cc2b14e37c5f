"""
Copyright (c) IBM 2015-2017. All Rights Reserved.
Project name: c4-infrasec
This project is licensed under the MIT License, see LICENSE

This library contains the experiments behind the command line tool.

Every command returns an :class:`ExperimentReport` holding a summary and a
set of tables. Written reports consist of ``report.json`` and one CSV file per
table. Reports contain no timestamps and numbers are written with 17 significant
digits, so running the same scenario reproduces identical files. No computation is
random, the scenario seed is only carried into the metadata.

.. code-block:: python

    scenario = Scenario.fromHjsonFile("scenarios/reference.hjson")
    report = solveCommand(scenario)
    report.write("out")

Functionality
-------------
"""

import collections
import logging
import os

import hjson
import numpy
import pandas
import scipy

import c4.infrasec
import c4.infrasec.jsonutil
import c4.infrasec.logutil
from c4.infrasec.detection import (Measurements,
                                   centralizedFilter,
                                   firstDetection,
                                   relaxDistributed)
from c4.infrasec.dynamics import (SCHEME,
                                  costDeviation,
                                  costProfiles,
                                  integrateAttacked,
                                  runningCost)
from c4.infrasec.exceptions import InvalidSpecificationError
from c4.infrasec.game import (ELECTRIC,
                              equalAllocationBaseline,
                              fictitiousPlay,
                              lpMinimax)


log = logging.getLogger(__name__)

CSV_FLOAT_FORMAT = "%.17g"
REPORT_FILE = "report.json"
SWEEP_INCREASE = 1.4

def versions():
    """
    Versions of the packages that influence results
    """
    return {
        "c4-infrasec": c4.infrasec.__version__,
        "hjson": hjson.__version__,
        "numpy": numpy.__version__,
        "pandas": pandas.__version__,
        "scipy": scipy.__version__,
    }

@c4.infrasec.logutil.ClassLogger
class ExperimentReport(c4.infrasec.jsonutil.JSONSerializable):
    """
    Result of a command

    :param command: command name
    :type command: str
    :param scenario: the effective scenario
    :type scenario: :class:`~c4.infrasec.scenario.Scenario`
    """
    def __init__(self, command, scenario):
        self.metadata = {
            "command": command,
            "scenario": scenario.name,
            "configHash": scenario.configHash,
            "seed": scenario.setting("solver.seed"),
            "scheme": SCHEME,
            "versions": versions(),
        }
        self.results = collections.OrderedDict()
        self.tables = collections.OrderedDict()

    def addTable(self, name, frame):
        """
        Add a table written as ``<name>.csv``

        :param name: table name
        :type name: str
        :param frame: table
        :type frame: :class:`pandas.DataFrame`
        """
        self.tables[name] = frame

    def toJSONSerializable(self):
        serializableDict = {
            "metadata": self.metadata,
            "results": self.results,
            "tables": ["%s.csv" % name for name in self.tables],
        }
        return serializableDict

    def write(self, outputDirectory):
        """
        Write the report and its tables

        :param outputDirectory: output directory, created if missing
        :type outputDirectory: str
        :returns: written file names
        :rtype: [str]
        """
        if not os.path.isdir(outputDirectory):
            os.makedirs(outputDirectory)
        written = []
        for name, frame in self.tables.items():
            fileName = os.path.join(outputDirectory, "%s.csv" % name)
            frame.to_csv(fileName, index=False, float_format=CSV_FLOAT_FORMAT, lineterminator="\n")
            written.append(fileName)
        fileName = os.path.join(outputDirectory, REPORT_FILE)
        self.toJSONFile(fileName, pretty=True)
        written.append(fileName)
        self.log.info("wrote %d files to '%s'", len(written), outputDirectory)
        return written

def formatMixture(name, probabilities):
    """
    Probability vector in the ``p_a = [0.872, 0.128]`` layout

    :param name: vector name
    :type name: str
    :param probabilities: probabilities
    :rtype: str
    """
    return "%s = [%s]" % (name, ", ".join("%.3f" % probability for probability in probabilities))

def _supportTables(system, payoff, equilibrium):
    attackerSupport = equilibrium.attackerSupport()
    attackers = pandas.DataFrame({
        "attack": [" ".join(payoff.labels[row]) for row in attackerSupport],
        "probability": equilibrium.attackerMixture[attackerSupport],
    })
    defenderSupport = equilibrium.defenderSupport()
    defenders = pandas.DataFrame([list(payoff.allocations[column]) for column in defenderSupport],
                                 columns=list(system.subsystemNames))
    defenders["probability"] = equilibrium.defenderMixture[defenderSupport]
    return attackers, defenders

def _equilibriumSummary(system, payoff, equilibrium):
    attackerSupport = equilibrium.attackerSupport()
    defenderSupport = equilibrium.defenderSupport()
    return {
        "value": equilibrium.value,
        "gap": equilibrium.gap,
        "method": equilibrium.method,
        "iterations": equilibrium.iterations,
        "attackerSupport": [list(payoff.labels[row]) for row in attackerSupport],
        "defenderSupport": [list(payoff.allocations[column]) for column in defenderSupport],
        "attackerMixture": formatMixture("p_a", equilibrium.attackerMixture[attackerSupport]),
        "defenderMixture": formatMixture("p_d", equilibrium.defenderMixture[defenderSupport]),
        "payoffShape": list(payoff.shape),
        "payoffProvenance": payoff.provenance,
        "subsystems": list(system.subsystemNames),
    }

def buildCommand(scenario):
    """
    Assemble the system of a scenario and summarize it

    :param scenario: scenario
    :type scenario: :class:`~c4.infrasec.scenario.Scenario`
    :returns: report and the assembled system
    :rtype: (:class:`ExperimentReport`, :class:`~c4.infrasec.model.DescriptorSystem`)
    """
    system = scenario.buildSystem()
    report = ExperimentReport("build", scenario)
    report.results["n"] = system.n
    report.results["N"] = system.subsystemCount
    report.results["stabilityMargin"] = system.stabilityMargin
    report.results["couplingDensity"] = system.couplingDensity
    report.results["eigenvalues"] = system.pencilEigenvalues
    report.results["subsystems"] = {name: [system.labels[state] for state in system.subsystemStates(position)]
                                    for position, name in enumerate(system.subsystemNames)}
    return report, system

def simulateCommand(scenario):
    """
    Simulate the scenario attack, evaluate its cost and run the detection filters

    Tables:

    - ``trajectory``: state deviations and the running cost deviation
    - ``cost-deviation``: percent cost rate deviation of attacking each gas and water state alone
    - ``residue``: centralized filter residue
    - ``relaxation``: waveform relaxation convergence history

    :param scenario: scenario
    :type scenario: :class:`~c4.infrasec.scenario.Scenario`
    :rtype: :class:`ExperimentReport`
    """
    system = scenario.buildSystem()
    attack = scenario.simulationAttack(system)
    step = scenario.setting("simulation.step")
    report = ExperimentReport("simulate", scenario)

    trajectory = integrateAttacked(system, attack, step)
    frame = trajectory.toDataFrame()
    frame["dp"] = runningCost(system, trajectory)
    report.addTable("trajectory", frame)
    report.results["attack"] = [system.labels[state] for state in attack.states]
    report.results["waveform"] = attack.waveform
    report.results["costDeviation"] = costDeviation(system, attack, attack.horizon, step).total

    fluidStates = [state for state, stateClass in enumerate(system.stateClasses) if stateClass in ("gas", "water")]
    profiles = costProfiles(system, fluidStates, scenario.simulationWaveform, attack.horizon, step)
    percent = pandas.DataFrame({"t": trajectory.times})
    for state in fluidStates:
        percent[system.labels[state]] = 100.0 * profiles[state].integrand / scenario.nominalCost
    report.addTable("cost-deviation", percent)
    decoupled = scenario.buildSystem(couplingScale=0.0)
    decoupledProfiles = costProfiles(decoupled, fluidStates, scenario.simulationWaveform, attack.horizon, step)
    report.results["decoupledCostMaximum"] = max([float(numpy.abs(profile.integrand).max())
                                                  for profile in decoupledProfiles.values()] or [0.0])

    config = scenario.filterConfig(system)
    x0 = numpy.zeros(system.n)
    measurements = Measurements.fromTrajectory(system, trajectory)
    residue = centralizedFilter(config, measurements, x0)
    report.addTable("residue", residue.toDataFrame())
    run = relaxDistributed(config, measurements, x0, keepIterates=False)
    report.addTable("relaxation", run.historyDataFrame())
    window = run.times.size
    report.results["detection"] = {
        "gamma": config.gamma,
        "threshold": config.threshold,
        "residueMaximum": residue.maximum,
        "firstDetection": firstDetection(residue, config.threshold),
        "relaxationConverged": run.converged,
        "relaxationIterations": run.iterations,
        "relaxationDifference": float(numpy.abs(run.residue().values - residue.values[:window]).max())
                                if residue.values.size else 0.0,
        "distributedFirstDetection": firstDetection(run.residue(), config.threshold),
    }
    log.info("simulated attack on %s, cost deviation %g", report.results["attack"], report.results["costDeviation"])
    return report

def _solverSettings(scenario):
    return scenario.setting("solver.maxIterations"), scenario.setting("solver.tolerance")

def solveCommand(scenario):
    """
    Build and solve the game, compare with restricted games and the equal allocation

    Tables:

    - ``attacker-support`` and ``defender-support``: equilibrium mixtures
    - ``comparison``: values of the full game, the game with an attacker limited to
      electric states and the game with a defender protecting only electric subsystems
    - ``baseline``: the equal allocation against the equilibrium attacker and its best response

    :param scenario: scenario
    :type scenario: :class:`~c4.infrasec.scenario.Scenario`
    :rtype: :class:`ExperimentReport`
    """
    system = scenario.buildSystem()
    setup = scenario.gameSetup(system)
    maxIterations, tolerance = _solverSettings(scenario)
    report = ExperimentReport("solve", scenario)
    report.results["budget"] = setup.budget
    report.results["budgetConvention"] = scenario.setting("defender.budgetConvention")

    payoff = setup.payoff(scenario.attackerRestriction, scenario.defenderRestriction)
    equilibrium = lpMinimax(payoff)
    learned = fictitiousPlay(payoff, maxIterations, tolerance)
    report.results["equilibrium"] = _equilibriumSummary(system, payoff, equilibrium)
    report.results["fictitiousPlay"] = learned
    report.results["valueDifference"] = abs(learned.value - equilibrium.value)
    attackers, defenders = _supportTables(system, payoff, equilibrium)
    report.addTable("attacker-support", attackers)
    report.addTable("defender-support", defenders)

    games = [("full", equilibrium.value)]
    for name, attackRestriction, defenderRestriction in (("electric-attacker", ELECTRIC, scenario.defenderRestriction),
                                                         ("electric-defender", scenario.attackerRestriction, ELECTRIC)):
        _, restricted = setup.restrictedGame(attackRestriction, defenderRestriction)
        games.append((name, restricted.value))
    report.addTable("comparison", pandas.DataFrame(games, columns=["game", "value"]))
    report.results["comparison"] = dict(games)

    baseline = equalAllocationBaseline(payoff, equilibrium)
    report.results["baseline"] = baseline
    report.addTable("baseline", pandas.DataFrame({
        "strategy": ["equilibrium", "equal-allocation-equilibrium-attacker", "equal-allocation-best-response"],
        "value": [equilibrium.value, baseline.equilibriumValue, baseline.bestResponseValue],
    }))
    log.info("game value %g, fictitious play %g after %d iterations",
             equilibrium.value, learned.value, learned.iterations)
    return report

def defaultSweepBudgets(scenario):
    """
    Scenario budget and a budget increased by 40 percent, on the granularity grid

    :param scenario: scenario
    :type scenario: :class:`~c4.infrasec.scenario.Scenario`
    :rtype: [int]
    """
    granularity = scenario.setting("defender.granularity")
    budget = scenario.budget
    increased = int(round(budget * SWEEP_INCREASE / granularity)) * granularity
    return [budget, max(increased, budget + granularity)]

def sweepCommand(scenario, budgets=None):
    """
    Game value and equal allocation baselines as functions of the budget

    :param scenario: scenario
    :type scenario: :class:`~c4.infrasec.scenario.Scenario`
    :param budgets: budgets, by default :func:`defaultSweepBudgets`
    :type budgets: [int]
    :rtype: :class:`ExperimentReport`
    :raises InvalidSpecificationError: if fewer than two budgets are given
    """
    budgets = sorted(set(int(budget) for budget in (budgets or defaultSweepBudgets(scenario))))
    if len(budgets) < 2:
        raise InvalidSpecificationError("a sweep needs at least two distinct budgets", path="defender.budget")
    system = scenario.buildSystem()
    setup = scenario.gameSetup(system)
    report = ExperimentReport("sweep", scenario)
    report.results["budgetConvention"] = scenario.setting("defender.budgetConvention")

    rows = []
    for budget in budgets:
        payoff = setup.withBudget(budget).payoff(scenario.attackerRestriction, scenario.defenderRestriction)
        equilibrium = lpMinimax(payoff)
        baseline = equalAllocationBaseline(payoff, equilibrium)
        rows.append({
            "budget": budget,
            "value": equilibrium.value,
            "equalAllocationEquilibrium": baseline.equilibriumValue,
            "equalAllocationBestResponse": baseline.bestResponseValue,
            "equalAllocation": baseline.equal,
        })
        log.info("budget %d value %g", budget, equilibrium.value)
    report.addTable("sweep", pandas.DataFrame(rows, columns=["budget", "value", "equalAllocationEquilibrium",
                                                             "equalAllocationBestResponse", "equalAllocation"]))
    report.results["budgets"] = budgets
    return report
