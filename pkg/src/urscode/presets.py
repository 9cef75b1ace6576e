"""Named code configurations: the DDR5 shapes and GF(16) test toys.

ddr5-meta{0,8,16}: GF(256) codes of shape (80, 64+m/8) built from an
8-element subspace map over basis {1, 2, 4}, so a device is 8 adjacent
symbols, a DQ is 2, and the ell=2/4/8 views group adjacent positions.
"""

from __future__ import annotations

from .gf import ConfigurationError, field
from .urs import UrsCode, construct_urs, subspace_poly

__all__ = ["PRESETS", "make_preset", "preset_for_metadata"]


def _ddr5(metadata_bytes: int) -> UrsCode:
    f = field(8, 0x11D)
    return construct_urs(f, subspace_poly(f, [1, 2, 4]), 10, 8, metadata_bytes)


def _toy(a: int) -> UrsCode:
    f = field(4, 0x13)
    return construct_urs(f, subspace_poly(f, [1]), 4, 2, a)


PRESETS = {
    "ddr5-meta0": lambda: _ddr5(0),
    "ddr5-meta8": lambda: _ddr5(1),
    "ddr5-meta16": lambda: _ddr5(2),
    "toy-gf16-8-4": lambda: _toy(0),
    "toy-gf16-8-5": lambda: _toy(1),
}


def make_preset(name: str) -> UrsCode:
    try:
        return PRESETS[name]()
    except KeyError:
        raise ConfigurationError(
            f"unknown preset {name!r}; available: {', '.join(sorted(PRESETS))}"
        ) from None


def preset_for_metadata(metadata_bytes: int) -> UrsCode:
    if metadata_bytes not in (0, 1, 2):
        raise ConfigurationError("metadata_bytes must be 0, 1, or 2")
    return _ddr5(metadata_bytes)
