"""Conjugacy, quotients and separability measurements for restricted wreath products."""

from .errors import OVERFLOW, UNREACHED, WreathLabError
from .groups import FiniteAbelian, FiniteCyclic, FreeAbelian, HeisenbergMod, HeisenbergZ
from .literals import parse_element, parse_family, parse_group
from .quotients import ALL_FINITE, PGroups
from .wreath import WreathElement, WreathProduct

__version__ = "0.1.0"

__all__ = [
    "ALL_FINITE",
    "OVERFLOW",
    "UNREACHED",
    "FiniteAbelian",
    "FiniteCyclic",
    "FreeAbelian",
    "HeisenbergMod",
    "HeisenbergZ",
    "PGroups",
    "WreathElement",
    "WreathLabError",
    "WreathProduct",
    "parse_element",
    "parse_family",
    "parse_group",
]
