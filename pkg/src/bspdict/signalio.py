"""Test-signal generators and plain-text persistence."""
from __future__ import annotations

import csv
import json
import os
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .adapt import MIN_SAMPLES, SampledSignal, uniform_grid
from .errors import IOFailure, ParseError, SignalTooShort
from .partition import Partition
from .pursuit import AtomicDecomposition

CHIRP_INTERVAL = (0.0, 8.0)
PHASED_INTERVAL = (0.0, 4.0)
PHASED_PIECES = 8


@dataclass(frozen=True)
class PiecewiseConstantPhase:
    """Phase ``levels[i]`` on the i-th piece cut by sorted ``breakpoints``."""

    breakpoints: tuple
    levels: tuple

    def __post_init__(self):
        object.__setattr__(self, "breakpoints", tuple(float(b) for b in self.breakpoints))
        object.__setattr__(self, "levels", tuple(float(v) for v in self.levels))
        if len(self.levels) != len(self.breakpoints) + 1:
            raise ValueError("need exactly one more level than breakpoints")
        if any(b1 >= b2 for b1, b2 in zip(self.breakpoints, self.breakpoints[1:])):
            raise ValueError("breakpoints must be strictly increasing")

    def __call__(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return np.asarray(self.levels)[np.searchsorted(self.breakpoints, x, side="right")]

    @classmethod
    def random(cls, seed: int, c: float, d: float, pieces: int = PHASED_PIECES):
        """Uniform breakpoints in ``(c, d)``, levels uniform in ``[0, 2*pi)``."""
        rng = np.random.default_rng(seed)
        while True:
            bps = np.sort(rng.uniform(c, d, pieces - 1))
            if np.all(np.diff(bps) > 0) and (pieces == 1 or (bps[0] > c and bps[-1] < d)):
                break
        levels = rng.uniform(0.0, 2.0 * np.pi, pieces)
        return cls(tuple(bps), tuple(levels))


def gen_chirp(L: int = 2049) -> SampledSignal:
    """``cos(2*pi*x^2)`` sampled at ``L`` points of ``[0, 8]``."""
    if L < MIN_SAMPLES:
        raise SignalTooShort(f"need at least {MIN_SAMPLES} samples, got {L}")
    c, d = CHIRP_INTERVAL
    x = uniform_grid(c, d, L)
    return SampledSignal(np.cos(2.0 * np.pi * x * x), c, d)


def gen_phased_cosine(L: int = 2049, phase=None, seed: int = 0, c=None, d=None) -> SampledSignal:
    """``cos(8*pi*x + phase(x))``; a seeded random phase is drawn when none is given."""
    if L < MIN_SAMPLES:
        raise SignalTooShort(f"need at least {MIN_SAMPLES} samples, got {L}")
    c = PHASED_INTERVAL[0] if c is None else float(c)
    d = PHASED_INTERVAL[1] if d is None else float(d)
    if phase is None:
        phase = PiecewiseConstantPhase.random(seed, c, d)
    x = uniform_grid(c, d, L)
    return SampledSignal(np.cos(8.0 * np.pi * x + phase(x)), c, d)


def _open_failure(path, exc) -> IOFailure:
    return IOFailure(f"{path}: {exc.strerror or exc}")


def load_signal(path, c: float, d: float) -> SampledSignal:
    """Read one sample per line (or a single-column CSV) as uniform samples on ``[c, d]``."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise _open_failure(path, exc) from exc
    values = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        item = line.strip()
        if not item:
            continue
        if item.endswith(","):
            item = item[:-1].strip()
        try:
            v = float(item)
        except ValueError:
            raise ParseError(f"not a number: {line!r}", lineno) from None
        if not np.isfinite(v):
            raise ParseError(f"non-finite sample: {line!r}", lineno)
        values.append(v)
    if not values:
        raise ParseError(f"{path}: no samples found")
    if len(values) < MIN_SAMPLES:
        raise ParseError(f"{path}: need at least {MIN_SAMPLES} samples, got {len(values)}")
    return SampledSignal(np.array(values), float(c), float(d))


def _write(path, text: str) -> None:
    try:
        Path(path).write_text(text)
    except OSError as exc:
        raise _open_failure(path, exc) from exc


def save_signal(sig: SampledSignal, path) -> None:
    _write(path, "".join(f"{v!r}\n" for v in sig.values.tolist()))


def save_partition(p: Partition, path) -> None:
    _write(path, p.to_json() + "\n")


def load_partition(path) -> Partition:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise _open_failure(path, exc) from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, exc.lineno) from None
    if isinstance(data, dict):
        data = data.get("points", data.get("parent"))
    if not isinstance(data, list):
        raise ParseError(f"{path}: expected a JSON array of knots")
    return Partition(data)


def save_decomposition(dec: AtomicDecomposition, path, dictionary_ref=None) -> None:
    _write(path, dec.to_json(dictionary_ref) + "\n")


def load_decomposition(path) -> AtomicDecomposition:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise _open_failure(path, exc) from exc
    try:
        return AtomicDecomposition.from_dict(json.loads(text))
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, exc.lineno) from None
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"{path}: malformed decomposition ({exc})") from None


def write_csv(path, header, columns) -> None:
    """Columns of equal length written row-wise with round-trip float text."""
    try:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(header)
            for row in zip(*[np.asarray(c).tolist() for c in columns]):
                w.writerow([repr(v) if isinstance(v, float) else v for v in row])
    except OSError as exc:
        raise _open_failure(path, exc) from exc


def save_reconstruction(path, grid, signal, approx) -> None:
    signal = np.asarray(signal, dtype=float)
    approx = np.asarray(approx, dtype=float)
    write_csv(path, ["x", "signal", "approximation", "residual"], [grid, signal, approx, signal - approx])


def ensure_dir(path) -> Path:
    try:
        os.makedirs(path, exist_ok=True)
    except OSError as exc:
        raise _open_failure(path, exc) from exc
    return Path(path)
