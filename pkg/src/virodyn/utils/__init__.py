# -*- coding: utf-8 -*-
""" Import all utility helpers."""
from .quadrature import (
    integrate_log_simpson,
    integrate_simpson,
    simpson_coefficients,
    simpson_rule,
)
from .svg import line_plot, save_line_plot
from .tables import read_table, write_table

__all__ = [
    "simpson_coefficients",
    "simpson_rule",
    "integrate_simpson",
    "integrate_log_simpson",
    "line_plot",
    "save_line_plot",
    "write_table",
    "read_table",
]
