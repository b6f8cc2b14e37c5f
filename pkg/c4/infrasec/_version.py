"""
Copyright (c) IBM 2015-2017. All Rights Reserved.
Project name: c4-infrasec
This project is licensed under the MIT License, see LICENSE
"""
__version__ = "0.1.0"
