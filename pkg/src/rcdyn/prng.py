"""Deterministic, splittable random streams.

Every random quantity in the package is drawn from an :class:`RngStream`
identified by ``(seed, stream_id)``.  Child streams are derived from a parent
by hashing a string label, so the sequence a module sees never depends on how
many numbers some other module consumed before it.

The bit generator is numpy's PCG64, seeded through ``SeedSequence`` with the
pair ``(seed, stream_id)``.  Gaussian variates use the Box-Muller transform on
PCG64 uniforms (cosine branch only), which is frozen here instead of relying on
numpy's ziggurat sampler.
"""

from __future__ import annotations

import hashlib

import numpy as np

MASK64 = (1 << 64) - 1

# documented sub-stream labels
WEIGHTS = "weights"
SIGNS = "signs"
MASK = "mask"
BIASES = "biases"
INIT = "init"
TASK_LAYOUT = "task-layout"
TASK_TRAIN = "task-train"
TASK_TEST = "task-test"
TASK_DRIVE = "task-drive"


def derive_stream_id(parent_id: int, label: str) -> int:
    """Pure function of (parent id, label) -> child id."""
    h = hashlib.blake2b(digest_size=8)
    h.update(int(parent_id & MASK64).to_bytes(8, "little"))
    h.update(label.encode("utf-8"))
    return int.from_bytes(h.digest(), "little")


class RngStream:
    """A reproducible random stream.

    Draw calls advance the internal state; ``split`` never does.
    """

    __slots__ = ("seed", "stream_id", "_gen")

    def __init__(self, seed: int, stream_id: int = 0):
        if seed < 0 or stream_id < 0:
            raise ValueError("seed and stream_id must be non-negative")
        self.seed = int(seed) & MASK64
        self.stream_id = int(stream_id) & MASK64
        ss = np.random.SeedSequence([self.seed, self.stream_id])
        self._gen = np.random.Generator(np.random.PCG64(ss))

    def __repr__(self) -> str:
        return f"RngStream(seed={self.seed}, stream_id={self.stream_id:#018x})"

    def split(self, label: str | int) -> "RngStream":
        return RngStream(self.seed, derive_stream_id(self.stream_id, str(label)))

    def fresh(self) -> "RngStream":
        """Same (seed, stream_id), rewound to the start."""
        return RngStream(self.seed, self.stream_id)

    # raw uniforms on [0, 1)
    def random(self, size=None):
        return self._gen.random(size)


def uniform(stream: RngStream, lo: float, hi: float, size=None):
    if not lo < hi:
        raise ValueError(f"empty interval [{lo}, {hi})")
    u = stream.random(size)
    out = lo + (hi - lo) * u
    # guard the rare rounding of lo + (hi-lo)*u up to hi
    if size is None:
        return out if out < hi else np.nextafter(hi, lo)
    return np.where(out < hi, out, np.nextafter(hi, lo))


def standard_normal(stream: RngStream, size=None):
    u1 = 1.0 - stream.random(size)  # (0, 1]
    u2 = stream.random(size)
    return np.sqrt(-2.0 * np.log(u1)) * np.cos(2.0 * np.pi * u2)


def normal(stream: RngStream, mean: float, sd: float, size=None):
    if sd < 0:
        raise ValueError("sd must be non-negative")
    z = standard_normal(stream, size)
    if sd == 0:
        return mean + 0.0 * z if size is not None else float(mean)
    return mean + sd * z


def bernoulli(stream: RngStream, p: float, size=None):
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"probability {p} outside [0, 1]")
    u = stream.random(size)
    return (u < p).astype(np.int8) if size is not None else int(u < p)
