"""Python access to the adelic C++ core.

Functions returning structured data decode the JSON produced by the core.
"""

import json

from . import _core
from ._core import AdelicError, commands, product_formula_defect, run_cli


def canonical_height(map, point, alpha="1", depth=12):
    return json.loads(_core.canonical_height(map, point, alpha, depth))


def tate_increments(map, place="inf", depth=20):
    return json.loads(_core.tate_increments(map, place, depth))


def chi_volume(family, n=50):
    if not isinstance(family, str):
        family = json.dumps(family)
    return json.loads(_core.chi_volume(family, n))


def small_sequence(map, target, N):
    return json.loads(_core.small_sequence(map, str(target), N))


__all__ = [
    "AdelicError",
    "canonical_height",
    "chi_volume",
    "commands",
    "product_formula_defect",
    "run_cli",
    "small_sequence",
    "tate_increments",
]
