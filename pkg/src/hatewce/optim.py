"""AdamW with decoupled weight decay over a ModelParams tensor dict."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, InputError, NumericError
from .model import BIAS_NAMES, ModelParams
from .textenc import PAD_ID


@dataclass(frozen=True)
class OptimHyper:
    lr: float = 2e-5
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    weight_decay: float = 0.01

    def __post_init__(self):
        for name in ("lr", "beta1", "beta2", "eps", "weight_decay"):
            object.__setattr__(self, name, float(getattr(self, name)))
        if not self.lr > 0 or not self.eps > 0:
            raise ConfigError(f"lr and eps must be positive (lr={self.lr}, eps={self.eps})")
        if not (0 <= self.beta1 < 1 and 0 <= self.beta2 < 1):
            raise ConfigError(f"betas must lie in [0, 1) (beta1={self.beta1}, beta2={self.beta2})")
        if self.weight_decay < 0:
            raise ConfigError(f"weight_decay must be >= 0, got {self.weight_decay}")


@dataclass
class OptimizerState:
    step: int = 0
    m: dict = field(default_factory=dict)
    v: dict = field(default_factory=dict)

    @classmethod
    def zeros_like(cls, params: ModelParams) -> "OptimizerState":
        return cls(0, {k: np.zeros_like(t) for k, t in params.tensors.items()},
                   {k: np.zeros_like(t) for k, t in params.tensors.items()})


def _decay_mask(name: str, shape) -> np.ndarray | float:
    if name in BIAS_NAMES:
        return 0.0
    if name == "embedding":
        m = np.ones((shape[0], 1))
        m[PAD_ID] = 0.0
        return m
    return 1.0


def adamw_step(params: ModelParams, grads: dict, state: OptimizerState,
               hyper: OptimHyper) -> tuple[ModelParams, OptimizerState]:
    """One AdamW update; returns new params and state, inputs are left untouched.

    theta <- theta - lr * (m_hat / (sqrt(v_hat) + eps) + wd * theta), with
    biases and the PAD embedding row exempt from the decay term.
    """
    if set(grads) != set(params.tensors):
        raise InputError(f"gradient names {sorted(grads)} != parameter names {sorted(params.tensors)}")
    for name, g in grads.items():
        if g.shape != params[name].shape:
            raise InputError(f"{name}: gradient shape {g.shape} != parameter shape {params[name].shape}")
        if not np.all(np.isfinite(g)):
            raise NumericError(f"non-finite gradient in {name}")

    t = state.step + 1
    b1, b2 = hyper.beta1, hyper.beta2
    bc1 = 1.0 - b1 ** t
    bc2 = 1.0 - b2 ** t
    new_tensors, new_m, new_v = {}, {}, {}
    for name in params.names():
        theta, g = params[name], grads[name]
        m = b1 * state.m[name] + (1.0 - b1) * g
        v = b2 * state.v[name] + (1.0 - b2) * (g * g)
        update = (m / bc1) / (np.sqrt(v / bc2) + hyper.eps)
        if hyper.weight_decay:
            update = update + hyper.weight_decay * _decay_mask(name, theta.shape) * theta
        new_tensors[name] = theta - hyper.lr * update
        new_m[name], new_v[name] = m, v
    return ModelParams(params.config, new_tensors), OptimizerState(t, new_m, new_v)
