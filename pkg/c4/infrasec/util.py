"""
Copyright (c) IBM 2015-2017. All Rights Reserved.
Project name: c4-infrasec
This project is licensed under the MIT License, see LICENSE

This library contains utility functions

Worker Pool
-----------

Long running and independent computations such as per-state cost profiles can
be distributed over a process pool. :func:`mapTasks` falls back to a plain loop
when only one process is requested so results are identical either way.

.. code-block:: python

    def work(one, two):
        ...perform long running task

    results = mapTasks(work, [(1, 2), (3, 4)], processes=4)

Functionality
-------------
"""

import copy
import hashlib
import json
import logging
import multiprocessing

import numpy


log = logging.getLogger(__name__)

def _applyTask(task):
    (function, arguments) = task
    return function(*arguments)

def configHash(configuration):
    """
    Compute the provenance hash of a configuration

    :param configuration: JSON compatible configuration
    :type configuration: dict
    :returns: SHA-256 hex digest of the canonical compact JSON
    :rtype: str
    """
    canonical = json.dumps(configuration, sort_keys=True, separators=(",", ":"), default=toPlain)
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()

def mapTasks(function, argumentsList, processes=1):
    """
    Apply a function to each argument tuple, optionally in a process pool

    :param function: a picklable module level function
    :type function: func
    :param argumentsList: list of argument tuples
    :type argumentsList: list
    :param processes: number of worker processes, ``1`` runs in process
    :type processes: int
    :returns: results in the order of ``argumentsList``
    :rtype: list
    """
    tasks = [(function, tuple(arguments)) for arguments in argumentsList]
    if processes is None or processes <= 1 or len(tasks) <= 1:
        return [_applyTask(task) for task in tasks]
    log.debug("distributing %d tasks over %d processes", len(tasks), processes)
    pool = multiprocessing.Pool(processes=processes)
    try:
        return pool.map(_applyTask, tasks)
    finally:
        pool.close()
        pool.join()

def mergeDictionaries(one, two):
    """
    Merge two dictionaries

    :param one: first dictionary
    :type one: dict
    :param two: second dictionary
    :type two: dict
    :returns: merged dictionary
    :rtype: dict
    """
    if not isinstance(two, dict):
        return copy.deepcopy(two)

    oneKeys = set(one.keys())
    twoKeys = set(two.keys())

    inBothKeys = oneKeys.intersection(twoKeys)
    oneOnlyKeys = oneKeys - inBothKeys
    twoOnlyKeys = twoKeys - inBothKeys

    merged = {}

    for key in oneOnlyKeys:
        merged[key] = copy.deepcopy(one[key])

    for key in twoOnlyKeys:
        merged[key] = copy.deepcopy(two[key])

    # nested dictionaries merge, everything else is replaced
    for key in inBothKeys:

        if isinstance(one[key], dict):
            merged[key] = mergeDictionaries(one[key], two[key])
        else:
            merged[key] = copy.deepcopy(two[key])

    return merged

def toPlain(value):
    """
    Convert numpy scalars and arrays into plain Python values

    :param value: value
    :returns: JSON compatible value
    :raises TypeError: if the value cannot be converted
    """
    if isinstance(value, numpy.ndarray):
        return [toPlain(item) for item in value.tolist()]
    if isinstance(value, (list, tuple)):
        return [toPlain(item) for item in value]
    if isinstance(value, numpy.bool_):
        return bool(value)
    if isinstance(value, numpy.integer):
        return int(value)
    if isinstance(value, numpy.floating):
        return float(value)
    if isinstance(value, (complex, numpy.complexfloating)):
        return {"real": float(value.real), "imag": float(value.imag)}
    if isinstance(value, (bool, int, float, str)) or value is None:
        return value
    if isinstance(value, dict):
        return {key: toPlain(item) for key, item in value.items()}
    raise TypeError("%r is not JSON serializable" % (value,))
