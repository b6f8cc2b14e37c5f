"""
Copyright (c) IBM 2015-2017. All Rights Reserved.
Project name: c4-infrasec
This project is licensed under the MIT License, see LICENSE

This library contains logging helper functionality

Class logging
-------------

By importing the ClassLogger decorator a log attribute is added to the class which
can then be used to log on a per-class basis.

.. code-block:: python

    from c4.infrasec.logutil import ClassLogger

    @ClassLogger
    class Example:

        def doSomething(self):
            self.log.debug("something")

Command line logging
--------------------

The command line tool installs a single stream handler through :func:`configureLogging`
using the same record format as the test suite. Timestamps are always UTC.

.. code-block:: python

    configureLogging(verbosity=2)

Functionality
-------------
"""

import logging
import time

LOG_FORMAT = "%(asctime)s [%(levelname)s] <%(processName)s:%(process)s> [%(name)s(%(filename)s:%(lineno)d)] - %(message)s"
VERBOSITY_LEVELS = [logging.WARNING, logging.INFO, logging.DEBUG]

def ClassLogger(cls):
    """
    Class decorator that creates a per-class logger
    """
    cls.log = logging.getLogger("{0}.{1}".format(cls.__module__, cls.__name__))
    return cls

def configureLogging(verbosity=0, stream=None):
    """
    Configure the root logger for command line use

    :param verbosity: number of ``-v`` flags, ``0`` is warnings only,
        ``1`` adds info and ``2`` or more adds debug messages
    :type verbosity: int
    :param stream: stream to log to, defaults to ``stderr``
    :returns: the installed handler
    :rtype: :class:`logging.StreamHandler`
    """
    level = VERBOSITY_LEVELS[max(0, min(verbosity, len(VERBOSITY_LEVELS) - 1))]
    formatter = logging.Formatter(LOG_FORMAT)
    formatter.converter = time.gmtime
    handler = logging.StreamHandler(stream)
    handler.setFormatter(formatter)

    root = logging.getLogger()
    for existing in list(root.handlers):
        if getattr(existing, "_infrasecHandler", False):
            root.removeHandler(existing)
    handler._infrasecHandler = True
    root.addHandler(handler)
    root.setLevel(level)
    return handler
