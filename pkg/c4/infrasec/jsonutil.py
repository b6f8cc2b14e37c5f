"""
Copyright (c) IBM 2015-2017. All Rights Reserved.
Project name: c4-infrasec
This project is licensed under the MIT License, see LICENSE

This library contains the JSON writer used for reports and system summaries.

numpy scalars and arrays are converted into plain Python numbers and lists so
matrices and probability vectors can be stored as attributes directly. Output
uses sorted keys and ``\\n`` line endings, equal objects give byte identical files.

Functionality
-------------
"""

import copy
import json
import logging

import c4.infrasec.logutil
import c4.infrasec.util


log = logging.getLogger(__name__)

@c4.infrasec.logutil.ClassLogger
class JSONSerializable(object):
    """
    Base class that allows child classes inheriting from it to
    be written as JSON. For example:

    .. code-block:: python

        class Summary(JSONSerializable):

            def __init__(self):
                self.name = "reference"
                self.costs = numpy.array([1.0, 2.0])

        print(Summary().toJSON(pretty=True))

    will result in

    .. code-block:: python

        {
            "costs": [
                1.0,
                2.0
            ],
            "name": "reference"
        }

    .. note::

        Child classes that hold matrices or derived quantities overwrite
        :py:meth:`toJSONSerializable` to choose what ends up in the file
    """

    def toJSON(self, pretty=False):
        """
        Convert object to a JSON string

        :param pretty: format JSON nicely using indent
        :type pretty: bool
        :returns: str
        """
        class ObjectJSONEncoder(json.JSONEncoder):
            def default(self, instance):
                if hasattr(instance, "toJSONSerializable"):
                    return instance.toJSONSerializable()
                try:
                    return c4.infrasec.util.toPlain(instance)
                except TypeError:
                    return json.JSONEncoder.default(self, instance)

        if pretty:
            return json.dumps(self, cls=ObjectJSONEncoder, indent=4, sort_keys=True)
        return json.dumps(self, cls=ObjectJSONEncoder, separators=(',', ':'), sort_keys=True)

    def toJSONFile(self, fileName, pretty=False):
        """
        Write object to a file as a JSON string

        :param fileName: file name
        :type fileName: str
        :param pretty: format JSON nicely using indent
        :type pretty: bool
        """
        jsonString = self.toJSON(pretty)
        self.log.debug("writing %d characters to '%s'", len(jsonString), fileName)
        with open(fileName, "w", newline="\n") as jsonFile:
            jsonFile.write(jsonString)
            jsonFile.write("\n")

    def toJSONSerializable(self):
        """
        Convert object to some JSON serializable Python object such as
        str, list, dict, etc. Attributes set to ``None`` are left out.

        :returns: JSON serializable Python object
        """
        serializableDict = {}
        for key, value in self.__dict__.items():
            if value is None:
                continue
            if isinstance(value, JSONSerializable):
                serializableDict[key] = value.toJSONSerializable()
            else:
                serializableDict[key] = copy.deepcopy(value)
        return serializableDict
