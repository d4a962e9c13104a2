"""Sampling of reservoir instances from statistical control parameters."""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field, asdict

import numpy as np

from . import prng
from ._kernels import TANH, SCALED_TANH, LINEAR, GAUSSIAN, COSINE


class Activation(str, enum.Enum):
    TANH = "tanh"
    SCALED_TANH = "scaled_tanh"
    LINEAR = "linear"
    GAUSSIAN = "gaussian"
    COSINE = "cosine"

    @property
    def code(self) -> int:
        return _CODES[self]


_CODES = {
    Activation.TANH: TANH,
    Activation.SCALED_TANH: SCALED_TANH,
    Activation.LINEAR: LINEAR,
    Activation.GAUSSIAN: GAUSSIAN,
    Activation.COSINE: COSINE,
}


@dataclass(frozen=True)
class ReservoirParams:
    N: int = 10
    M: int = 2
    w: float = 0.1
    w_prime: float = 0.1
    d: float = 1.0
    b: float = 0.0
    activation: Activation = Activation.TANH
    s: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "activation", Activation(self.activation))
        if self.N < 1:
            raise ValueError("N must be >= 1")
        if self.M < 0 or self.M > self.N:
            raise ValueError(f"need 0 <= M <= N, got M={self.M}, N={self.N}")
        if not 0.0 <= self.d <= 1.0:
            raise ValueError(f"density d={self.d} outside [0, 1]")
        if not -1.0 <= self.b <= 1.0:
            raise ValueError(f"balance b={self.b} outside [-1, 1]")
        if self.w < 0 or self.w_prime < 0:
            raise ValueError("w and w_prime must be non-negative")
        if not self.s > 0:
            raise ValueError("linearity s must be positive")

    def replace(self, **changes) -> "ReservoirParams":
        d = asdict(self)
        d.update(changes)
        return ReservoirParams(**d)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["activation"] = self.activation.value
        return d


@dataclass(frozen=True, eq=False)
class Reservoir:
    W: np.ndarray
    b_w: np.ndarray
    I: np.ndarray
    y0: np.ndarray
    params: ReservoirParams = field(default_factory=ReservoirParams)

    @property
    def N(self) -> int:
        return self.W.shape[0]

    @property
    def M(self) -> int:
        return self.I.shape[1]

    def with_params(self, **changes) -> "Reservoir":
        """Same matrices, different non-structural params (activation, s)."""
        return Reservoir(self.W, self.b_w, self.I, self.y0, self.params.replace(**changes))

    def to_json(self) -> str:
        return json.dumps(
            {
                "params": self.params.to_dict(),
                "W": self.W.tolist(),
                "b_w": self.b_w.tolist(),
                "I": self.I.tolist(),
                "y0": self.y0.tolist(),
            }
        )

    @classmethod
    def from_json(cls, text: str) -> "Reservoir":
        doc = json.loads(text)
        p = ReservoirParams(**doc["params"])
        W = np.array(doc["W"], dtype=float).reshape(p.N, p.N)
        I = np.array(doc["I"], dtype=float).reshape(p.N, p.M)
        return cls(W, np.array(doc["b_w"], dtype=float), I, np.array(doc["y0"], dtype=float), p)


def sample_weight_matrix(params: ReservoirParams, stream: prng.RngStream) -> np.ndarray:
    """W = |N(0, w)| * Bernoulli(d) * (+1 w.p. (1+b)/2, else -1).

    Magnitudes, mask and signs come from three child streams of ``stream``.
    Mask and sign use the comparison ``u < p`` on fixed uniforms, so at a
    fixed seed a scan over ``b`` only flips signs, and monotonically.
    """
    N = params.N
    shape = (N, N)
    magn = np.abs(prng.normal(stream.split(prng.WEIGHTS), 0.0, 1.0, shape)) * params.w
    mask = prng.bernoulli(stream.split(prng.MASK), params.d, shape)
    plus = prng.bernoulli(stream.split(prng.SIGNS), (1.0 + params.b) / 2.0, shape)
    sign = 2.0 * plus - 1.0
    return magn * mask * sign


def sample_biases(params: ReservoirParams, stream: prng.RngStream) -> np.ndarray:
    return prng.normal(stream.split(prng.BIASES), 0.0, params.w_prime, params.N)


def build_input_matrix(params: ReservoirParams) -> np.ndarray:
    if params.M > params.N:
        raise ValueError("M > N")
    I = np.zeros((params.N, params.M))
    idx = np.arange(params.M)
    I[idx, idx] = params.w
    return I


def sample_initial_state(params: ReservoirParams, stream: prng.RngStream) -> np.ndarray:
    return prng.uniform(stream.split(prng.INIT), -1.0, 1.0, params.N)


def sample_reservoir(params: ReservoirParams, stream: prng.RngStream) -> Reservoir:
    return Reservoir(
        W=sample_weight_matrix(params, stream),
        b_w=sample_biases(params, stream),
        I=build_input_matrix(params),
        y0=sample_initial_state(params, stream),
        params=params,
    )


def scale_coupling_for_size(w_ref: float, N_ref: int, N: int) -> float:
    """Keep the variance of the summed recurrent input fixed: w ~ 1/sqrt(N)."""
    if N_ref < 1 or N < 1:
        raise ValueError("neuron counts must be >= 1")
    return w_ref * math.sqrt(N_ref / N)
