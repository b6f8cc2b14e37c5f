"""
Copyright (c) IBM 2015-2017. All Rights Reserved.
Project name: c4-infrasec
This project is licensed under the MIT License, see LICENSE

This library contains the ``c4-infrasec`` command line tool

.. code-block:: bash

    c4-infrasec build --scenario scenarios/reference.hjson
    c4-infrasec simulate --scenario scenarios/reference.hjson --out out/simulate
    c4-infrasec solve --scenario scenarios/reference.hjson --out out/solve --restrict-attacker electric
    c4-infrasec sweep --scenario scenarios/reference.hjson --budget 1200 --budget 1700 --out out/sweep

Without ``--scenario`` the built-in reference scenario is used. Exit codes are
``0`` on success, ``2`` for invalid scenarios, ``3`` for numerical failures,
``4`` if a strategy space exceeds its cap and ``1`` for unexpected errors.

Functionality
-------------
"""

import argparse
import logging
import os
import sys

import c4.infrasec
import c4.infrasec.experiment
import c4.infrasec.logutil
from c4.infrasec.exceptions import InfrasecError
from c4.infrasec.game import ALL, ELECTRIC
from c4.infrasec.scenario import Scenario, referenceScenario


log = logging.getLogger(__name__)

COMMANDS = ("build", "simulate", "solve", "sweep")

def restriction(value):
    """
    Parse an attacker restriction: ``all``, ``electric`` or comma separated state labels
    """
    if value in (ALL, ELECTRIC):
        return value
    labels = [label.strip() for label in value.split(",") if label.strip()]
    if not labels:
        raise argparse.ArgumentTypeError("expected all, electric or a list of state labels")
    return labels

def createParser():
    """
    Create the argument parser

    :rtype: :class:`argparse.ArgumentParser`
    """
    parser = argparse.ArgumentParser(prog="c4-infrasec",
                                     description="Attack impact and communication resource allocation games "
                                                 "for interdependent gas, power and water infrastructure")
    parser.add_argument("--version", action="version", version="%(prog)s " + c4.infrasec.__version__)
    subparsers = parser.add_subparsers(dest="command", metavar="command")
    subparsers.required = True
    helps = {
        "build": "assemble the descriptor system and summarize it",
        "simulate": "simulate the scenario attack, its cost and the detection filters",
        "solve": "solve the attacker defender game",
        "sweep": "solve the game for several budgets",
    }
    for command in COMMANDS:
        subparser = subparsers.add_parser(command, help=helps[command])
        subparser.add_argument("--scenario", help="scenario file, the reference scenario by default")
        subparser.add_argument("--out", help="output directory")
        subparser.add_argument("--seed", type=int,
                               help="seed recorded in the report metadata, no computation is random")
        subparser.add_argument("--granularity", type=int, help="allocation granularity in connections")
        subparser.add_argument("--budget", type=int, action="append",
                               help="connection budget, repeat for sweeps")
        subparser.add_argument("--restrict-attacker", type=restriction, dest="restrictAttacker",
                               help="all, electric or comma separated state labels")
        subparser.add_argument("--restrict-defender", choices=(ALL, ELECTRIC), dest="restrictDefender")
        subparser.add_argument("--max-iters", type=int, dest="maxIterations", help="fictitious play iterations")
        subparser.add_argument("--tol", type=float, dest="tolerance", help="fictitious play tolerance")
        subparser.add_argument("-v", "--verbose", action="count", default=0,
                               help="display info and with -vv debug messages")
    return parser

def loadScenario(arguments):
    """
    Load the scenario and apply the command line overrides

    :param arguments: parsed arguments
    :type arguments: :class:`argparse.Namespace`
    :rtype: :class:`~c4.infrasec.scenario.Scenario`
    """
    scenario = Scenario.fromHjsonFile(arguments.scenario) if arguments.scenario else referenceScenario()
    budget = None
    if arguments.budget and arguments.command != "sweep":
        budget = arguments.budget[-1]
    return scenario.withOverrides({
        "attacker": {"restriction": arguments.restrictAttacker},
        "defender": {
            "budget": budget,
            "granularity": arguments.granularity,
            "restriction": arguments.restrictDefender,
        },
        "solver": {
            "maxIterations": arguments.maxIterations,
            "tolerance": arguments.tolerance,
            "seed": arguments.seed,
        },
    })

def printSummary(report, stream):
    """
    Print the results of a report

    :param report: report
    :type report: :class:`~c4.infrasec.experiment.ExperimentReport`
    :param stream: output stream
    """
    stream.write(report.toJSON(pretty=True))
    stream.write("\n")

def run(arguments, stream=None):
    """
    Run a command

    :param arguments: parsed arguments
    :type arguments: :class:`argparse.Namespace`
    :param stream: stream for the summary, ``stdout`` by default
    :returns: the report
    :rtype: :class:`~c4.infrasec.experiment.ExperimentReport`
    """
    stream = stream or sys.stdout
    scenario = loadScenario(arguments)
    if arguments.command == "build":
        report, system = c4.infrasec.experiment.buildCommand(scenario)
        if arguments.out:
            if not os.path.isdir(arguments.out):
                os.makedirs(arguments.out)
            system.toJSONFile(os.path.join(arguments.out, "system.json"), pretty=True)
    elif arguments.command == "simulate":
        report = c4.infrasec.experiment.simulateCommand(scenario)
    elif arguments.command == "solve":
        report = c4.infrasec.experiment.solveCommand(scenario)
    else:
        report = c4.infrasec.experiment.sweepCommand(scenario, arguments.budget)
    if arguments.out:
        report.write(arguments.out)
    printSummary(report, stream)
    return report

def main(argv=None, stream=None):
    """
    Command line entry point

    :param argv: arguments, ``sys.argv[1:]`` by default
    :type argv: [str]
    :param stream: stream for the summary, ``stdout`` by default
    :returns: exit code
    :rtype: int
    """
    parser = createParser()
    arguments = parser.parse_args(argv)
    c4.infrasec.logutil.configureLogging(arguments.verbose)
    try:
        run(arguments, stream)
    except InfrasecError as e:
        log.error("%s", e)
        return e.exitCode
    except Exception as e:
        log.exception("unexpected error: %s", e)
        return 1
    return 0

if __name__ == "__main__":
    sys.exit(main())
