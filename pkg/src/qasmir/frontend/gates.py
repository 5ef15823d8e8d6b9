"""The native gate table and the embedded ``qelib1.inc``."""

from __future__ import annotations

from functools import lru_cache
from importlib import resources

# name -> (number of parameters, number of qubits)
BUILTIN_GATES: dict[str, tuple[int, int]] = {
    "id": (0, 1),
    "h": (0, 1),
    "x": (0, 1),
    "y": (0, 1),
    "z": (0, 1),
    "s": (0, 1),
    "sdg": (0, 1),
    "t": (0, 1),
    "tdg": (0, 1),
    "rx": (1, 1),
    "ry": (1, 1),
    "rz": (1, 1),
    "u1": (1, 1),
    "u2": (2, 1),
    "u3": (3, 1),
    "cx": (0, 2),
    "cz": (0, 2),
    "swap": (0, 2),
}

# The two primitive statements of the language, usable inside gate bodies.
PRIMITIVE_GATES: dict[str, tuple[int, int]] = {"U": (3, 1), "CX": (0, 2)}


@lru_cache(maxsize=1)
def builtin_include_text() -> str:
    return resources.files("qasmir.frontend").joinpath("qelib1.inc").read_text(encoding="utf-8")
