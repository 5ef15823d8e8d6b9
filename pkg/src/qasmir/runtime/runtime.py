"""QIR runtime API semantics over the built-in statevector simulator."""

from __future__ import annotations

import json
import logging
import secrets
from collections import Counter
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from qasmir.errors import (
    ArityError,
    CapacityError,
    ConfigError,
    DoubleRelease,
    QubitIndexError,
    RuntimeStateError,
    UnknownGate,
    UseAfterRelease,
)
from qasmir.runtime.statevector import SUPPORTED_GATES, StateVector

logger = logging.getLogger(__name__)

MODES = ("nisq", "ftqc")
BUILTIN_BACKEND = "builtin"
# Names that select the built-in simulator without a warning.
BACKEND_ALIASES = frozenset({"builtin", "statevector", "qpp", "aer", "simulator", "default"})
DEFAULT_MAX_QUBITS = 26
_U64 = (1 << 64) - 1


@dataclass(frozen=True)
class ExecutionConfig:
    mode: str = "ftqc"
    shots: int = 1
    backend: str = BUILTIN_BACKEND
    seed: Optional[int] = None
    max_qubits: int = DEFAULT_MAX_QUBITS

    def __post_init__(self):
        if self.mode not in MODES:
            raise ConfigError(f"-qrt must be one of {', '.join(MODES)}, got {self.mode!r}")
        if not isinstance(self.shots, int) or self.shots < 1:
            raise ConfigError(f"-shots must be a positive integer, got {self.shots!r}")
        if self.seed is not None and not 0 <= self.seed <= _U64:
            raise ConfigError(f"-seed must be an unsigned 64-bit integer, got {self.seed!r}")
        if self.max_qubits < 1:
            raise ConfigError("max_qubits must be positive")

    @property
    def effective_shots(self) -> int:
        return self.shots if self.mode == "nisq" else 1


_FLAGS = {"-qrt": "mode", "-shots": "shots", "-qpu": "backend", "-seed": "seed"}


def _parse_int(flag: str, text: str) -> int:
    try:
        return int(text, 0)
    except ValueError:
        raise ConfigError(f"{flag} expects an integer, got {text!r}") from None


def parse_runtime_args(args: Sequence[str]) -> ExecutionConfig:
    """Read ``-qrt``, ``-shots``, ``-qpu`` and ``-seed`` (``-flag value`` or ``-flag=value``).

    Unrecognized arguments are ignored, as a program's own argv may carry them.
    """
    values: dict = {}
    args = list(args)
    i = 0
    while i < len(args):
        arg = args[i]
        flag, eq, inline = arg.partition("=")
        key = _FLAGS.get("-" + flag.lstrip("-")) if flag.startswith("-") else None
        if key is None:
            i += 1
            continue
        if eq:
            text = inline
            i += 1
        else:
            if i + 1 >= len(args):
                raise ConfigError(f"{flag} expects a value")
            text = args[i + 1]
            i += 2
        if key in ("shots", "seed"):
            values[key] = _parse_int(flag, text)
        else:
            values[key] = text
    return ExecutionConfig(**values)


@dataclass
class QubitArray:
    handle: int
    qubits: tuple[int, ...]
    released: bool = False

    def __len__(self) -> int:
        return len(self.qubits)


@dataclass
class AcceleratorBuffer:
    """Store for measurement results: per-shot records plus aggregated counts."""

    size: int = 0
    counts: Counter = field(default_factory=Counter)
    shot_records: list[str] = field(default_factory=list)
    bits: list[int] = field(default_factory=list)

    def begin_shot(self) -> None:
        self.bits = []

    def record(self, bit: int) -> None:
        self.bits.append(bit)

    def end_shot(self) -> str:
        record = "".join(str(b) for b in self.bits)
        self.shot_records.append(record)
        if record:
            self.counts[record] += 1
        return record

    def print_counts(self) -> str:
        return format_counts(self.counts)


def format_counts(counts) -> str:
    return "".join(f"{bits} : {n}\n" for bits, n in sorted(counts.items()))


@dataclass
class ExecutionReport:
    backend: str
    mode: str
    shots: int
    seed: int
    counts: dict[str, int]
    bits: list[int] = field(default_factory=list)
    wall_ms: float = 0.0

    def format_counts(self) -> str:
        return format_counts(self.counts)

    def to_dict(self) -> dict:
        return {
            "backend": self.backend,
            "mode": self.mode,
            "shots": self.shots,
            "seed": self.seed,
            "counts": dict(sorted(self.counts.items())),
            "wall_ms": self.wall_ms,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    def same_outcome(self, other: "ExecutionReport") -> bool:
        """Equality ignoring wall time."""
        mine, theirs = self.to_dict(), other.to_dict()
        mine.pop("wall_ms")
        theirs.pop("wall_ms")
        return mine == theirs and self.bits == other.bits


def resolve_backend(name: str) -> str:
    if name.lower() in BACKEND_ALIASES:
        return name
    logger.warning("backend %r is not available; using the built-in statevector simulator", name)
    return name


def shot_rng(seed: int, shot: int) -> np.random.Generator:
    # Counter-based Philox keyed on (seed, shot): each shot's stream is independent
    # of how many draws earlier shots made.
    return np.random.Generator(np.random.Philox(key=[seed & _U64, shot & _U64]))


class QuantumRuntime:
    """Runtime state for one execution: qubit arrays, a statevector and the result buffer."""

    def __init__(self, config: Optional[ExecutionConfig] = None):
        self.config = config or ExecutionConfig()
        self.seed = self.config.seed if self.config.seed is not None else secrets.randbits(64)
        self.backend = resolve_backend(self.config.backend)
        self.internal_buffer = AcceleratorBuffer()
        self.buffer = self.internal_buffer
        self.shot = -1
        self._external_buffer: Optional[AcceleratorBuffer] = None
        self._reset_shot_state()

    def _reset_shot_state(self) -> None:
        self.state = StateVector()
        self.arrays: list[QubitArray] = []
        self.released_qubits: set[int] = set()
        self.set_qreg_called = False
        self.rng = shot_rng(self.seed, max(self.shot, 0))

    # -- shot lifecycle ----------------------------------------------------

    def begin_shot(self, index: int) -> None:
        self.shot = index
        self._reset_shot_state()
        self.buffer.begin_shot()

    def end_shot(self) -> str:
        return self.buffer.end_shot()

    # -- runtime API -------------------------------------------------------

    @property
    def num_qubits(self) -> int:
        return self.state.num_qubits

    def qubit_allocate_array(self, size: int) -> QubitArray:
        if size < 1:
            raise CapacityError(f"cannot allocate a register of size {size}")
        total = self.num_qubits + size
        if total > self.config.max_qubits:
            raise CapacityError(f"allocating {size} qubits would exceed the maximum of {self.config.max_qubits} ({total})")
        start = self.num_qubits
        self.state.allocate(size)
        arr = QubitArray(len(self.arrays), tuple(range(start, total)))
        self.arrays.append(arr)
        self.buffer.size = max(self.buffer.size, total)
        return arr

    def array_get_element(self, arr: QubitArray, index: int) -> int:
        if arr.released:
            raise UseAfterRelease(f"array {arr.handle} was released")
        if not 0 <= index < len(arr):
            raise QubitIndexError(f"index {index} is out of range for an array of {len(arr)} qubits")
        return arr.qubits[index]

    def qubit_release_array(self, arr: QubitArray) -> None:
        if arr.released:
            raise DoubleRelease(f"array {arr.handle} was already released")
        arr.released = True
        self.released_qubits.update(arr.qubits)

    def set_qreg(self, buffer: AcceleratorBuffer) -> None:
        if self.set_qreg_called:
            raise RuntimeStateError("set_qreg may only be called once")
        if self.arrays:
            raise RuntimeStateError("set_qreg must be called before any qubit allocation")
        self.set_qreg_called = True
        if buffer is not self.buffer:
            # Carry over the open shot so records land in the caller's buffer.
            buffer.bits = self.buffer.bits
            self.buffer = buffer
        self._external_buffer = buffer

    def apply(self, name: str, params: Sequence[float] = (), qubits: Sequence[int] = ()) -> Optional[int]:
        """Execute one instruction; ``mz`` returns the sampled bit."""
        spec = SUPPORTED_GATES.get(name)
        if spec is None:
            raise UnknownGate(f"unsupported instruction {name!r}")
        nparams, nqubits = spec
        if len(params) != nparams or len(qubits) != nqubits:
            raise ArityError(
                f"{name} takes {nparams} parameters and {nqubits} qubits, got {len(params)} and {len(qubits)}"
            )
        for q in qubits:
            if not 0 <= q < self.num_qubits:
                raise QubitIndexError(f"qubit {q} was never allocated")
            if q in self.released_qubits:
                raise UseAfterRelease(f"qubit {q} was released")
        if len(set(qubits)) != len(qubits):
            raise ArityError(f"{name} operands must be distinct qubits")
        if name == "mz":
            bit = self.state.measure(qubits[0], self.rng)
            self.buffer.record(bit)
            return bit
        if name == "reset":
            self.state.reset(qubits[0], self.rng)
            return None
        self.state.apply(name, params, qubits)
        return None

    def finalize(self, wall_ms: float = 0.0) -> ExecutionReport:
        buffer = self.buffer
        report = ExecutionReport(
            backend=self.backend,
            mode=self.config.mode,
            shots=self.config.effective_shots,
            seed=self.seed,
            counts=dict(buffer.counts),
            bits=list(buffer.bits),
            wall_ms=wall_ms,
        )
        self._reset_shot_state()
        return report


def rt_initialize(args: Sequence[str] = ()) -> QuantumRuntime:
    return QuantumRuntime(parse_runtime_args(args))
