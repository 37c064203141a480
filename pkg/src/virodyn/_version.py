# -*- coding: utf-8 -*-
""" Version of virodyn."""

__version__ = "0.1.0"
