import argparse
import io
import json
import logging
import os

import pandas
import pytest

from c4.infrasec.cli import createParser, loadScenario, main, restriction
from c4.infrasec.experiment import defaultSweepBudgets, formatMixture, sweepCommand
from c4.infrasec.exceptions import InvalidSpecificationError
from c4.infrasec.scenario import referenceScenario


log = logging.getLogger(__name__)

@pytest.fixture(autouse=True)
def restoreLogging():
    yield
    root = logging.getLogger()
    for handler in list(root.handlers):
        if getattr(handler, "_infrasecHandler", False):
            root.removeHandler(handler)

@pytest.fixture
def small():
    return referenceScenario().withOverrides({
        "attacker": {"maxStates": 1},
        "defender": {"granularity": 200, "connections": 1600},
        "simulation": {
            "horizon": 1.0,
            "step": 0.01,
            "waveform": {"kind": "pulse", "magnitude": 1.0, "start": 0.2, "end": 0.6},
        },
        "detection": {"window": 0.5},
        "solver": {"payoffStep": 1e-3},
    })

@pytest.fixture
def smallFile(small, tmpdir):
    fileName = str(tmpdir.join("small.hjson"))
    small.toHjsonFile(fileName)
    return fileName

def readDirectory(directory):
    contents = {}
    for name in sorted(os.listdir(directory)):
        with open(os.path.join(directory, name), "rb") as f:
            contents[name] = f.read()
    return contents

def test_build(tmpdir):
    stream = io.StringIO()
    out = str(tmpdir.join("build"))
    assert main(["build", "--out", out], stream) == 0
    summary = json.loads(stream.getvalue())
    assert summary["results"]["n"] == 12
    assert summary["results"]["N"] == 6
    assert summary["metadata"]["command"] == "build"
    assert summary["metadata"]["configHash"] == referenceScenario().configHash
    assert sorted(os.listdir(out)) == ["report.json", "system.json"]

def test_invalidScenario(tmpdir):
    fileName = str(tmpdir.join("invalid.hjson"))
    with open(fileName, "w") as f:
        f.write("{\n  foo: {}\n}\n")
    assert main(["build", "--scenario", fileName], io.StringIO()) == 2

def test_unstableSystem(tmpdir):
    reference = referenceScenario()
    generators = reference.setting("power.generators")
    for generator in generators:
        generator["damping"] = 0.0
    fileName = str(tmpdir.join("undamped.hjson"))
    reference.withOverrides({"power": {"generators": generators}}).toHjsonFile(fileName)
    assert main(["build", "--scenario", fileName], io.StringIO()) == 3

def test_capExceeded(small, tmpdir):
    fileName = str(tmpdir.join("capped.hjson"))
    small.withOverrides({"attacker": {"cap": 5}}).toHjsonFile(fileName)
    assert main(["solve", "--scenario", fileName], io.StringIO()) == 4

def test_solveIsReproducible(smallFile, tmpdir):
    first = str(tmpdir.join("first"))
    second = str(tmpdir.join("second"))
    assert main(["solve", "--scenario", smallFile, "--out", first], io.StringIO()) == 0
    assert main(["solve", "--scenario", smallFile, "--out", second], io.StringIO()) == 0
    files = readDirectory(first)
    assert sorted(files) == ["attacker-support.csv", "baseline.csv", "comparison.csv", "defender-support.csv",
                             "report.json"]
    assert files == readDirectory(second)

    report = json.loads(files["report.json"].decode("utf-8"))
    equilibrium = report["results"]["equilibrium"]
    assert equilibrium["payoffShape"] == [12, 21]
    assert equilibrium["attackerMixture"].startswith("p_a = [")
    assert report["results"]["budget"] == 1600
    baseline = pandas.read_csv(os.path.join(first, "baseline.csv"))
    assert baseline["value"][2] >= baseline["value"][1]

def test_simulateIsReproducible(smallFile, tmpdir):
    first = str(tmpdir.join("first"))
    second = str(tmpdir.join("second"))
    assert main(["simulate", "--scenario", smallFile, "--out", first], io.StringIO()) == 0
    assert main(["simulate", "--scenario", smallFile, "--out", second], io.StringIO()) == 0
    files = readDirectory(first)
    assert sorted(files) == ["cost-deviation.csv", "relaxation.csv", "report.json", "residue.csv", "trajectory.csv"]
    assert files == readDirectory(second)

    report = json.loads(files["report.json"].decode("utf-8"))
    results = report["results"]
    assert results["attack"] == ["gas.S1"]
    assert results["costDeviation"] > 0.0
    assert results["decoupledCostMaximum"] == 0.0
    assert 0.2 - 1e-9 <= results["detection"]["firstDetection"] <= 0.21
    assert results["detection"]["relaxationConverged"]
    trajectory = pandas.read_csv(os.path.join(first, "trajectory.csv"))
    assert list(trajectory.columns)[0] == "t"
    assert len(trajectory) == 101

def test_sweep(smallFile, tmpdir):
    out = str(tmpdir.join("sweep"))
    assert main(["sweep", "--scenario", smallFile, "--budget", "1600", "--budget", "2000", "--out", out],
                io.StringIO()) == 0
    sweep = pandas.read_csv(os.path.join(out, "sweep.csv"))
    assert list(sweep["budget"]) == [1600, 2000]
    assert sweep["value"][1] <= sweep["value"][0] + 1e-12

def test_sweepNeedsTwoBudgets(small):
    with pytest.raises(InvalidSpecificationError):
        sweepCommand(small, [1600, 1600])

def test_defaultSweepBudgets(small):
    assert defaultSweepBudgets(referenceScenario()) == [1200, 1700]
    assert defaultSweepBudgets(small) == [1600, 2200]

def test_formatMixture():
    assert formatMixture("p_a", [0.8721, 0.1279]) == "p_a = [0.872, 0.128]"

def test_restriction():
    assert restriction("electric") == "electric"
    assert restriction("gas.S1, gas.S2") == ["gas.S1", "gas.S2"]
    with pytest.raises(argparse.ArgumentTypeError):
        restriction(" , ")

def test_overrides(smallFile):
    arguments = createParser().parse_args(["solve", "--scenario", smallFile, "--budget", "2000",
                                           "--restrict-attacker", "gas.S1,gas.S2", "--restrict-defender", "electric",
                                           "--tol", "1e-4"])
    scenario = loadScenario(arguments)
    assert scenario.budget == 2000
    assert scenario.attackerRestriction == ["gas.S1", "gas.S2"]
    assert scenario.defenderRestriction == "electric"
    assert scenario.setting("solver.tolerance") == 1e-4
    assert scenario.setting("defender.granularity") == 200

def test_seedIsOnlyRecorded(capsys):
    first = io.StringIO()
    second = io.StringIO()
    assert main(["build", "--seed", "7"], first) == 0
    assert main(["build", "--seed", "8"], second) == 0
    one = json.loads(first.getvalue())
    two = json.loads(second.getvalue())
    assert one["metadata"]["seed"] == 7
    assert two["metadata"]["seed"] == 8
    assert one["results"] == two["results"]
    with pytest.raises(SystemExit):
        createParser().parse_args(["build", "--help"])
    assert "no computation is random" in " ".join(capsys.readouterr().out.split())
