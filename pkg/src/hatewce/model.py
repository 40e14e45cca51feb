"""Toy contextual encoder with a pooled linear classification head.

Pipeline per example: embedding lookup -> (optional) one pre-norm
self-attention + feed-forward block -> masked mean pool over real tokens ->
linear head -> logits. Everything is float64 numpy with a hand-written
backward pass.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import ConfigError, InputError, NumericError
from .textenc import PAD_ID, EncodedBatch

LN_EPS = 1e-5
_GELU_C = math.sqrt(2.0 / math.pi)


class EncoderKind(str, Enum):
    BAG = "bag"
    ATTENTION = "attention"


@dataclass(frozen=True)
class ModelConfig:
    vocab_size: int
    embed_dim: int = 32
    num_classes: int = 2
    encoder_kind: EncoderKind = EncoderKind.BAG
    num_heads: int = 2
    ffn_dim: int = 64
    init_seed: int = 42

    def __post_init__(self):
        object.__setattr__(self, "encoder_kind", EncoderKind(self.encoder_kind))
        if self.vocab_size < 2:
            raise ConfigError(f"vocab_size must cover <pad> and <unk>, got {self.vocab_size}")
        if self.embed_dim < 1:
            raise ConfigError(f"embed_dim must be >= 1, got {self.embed_dim}")
        if self.num_classes < 2:
            raise ConfigError(f"num_classes must be >= 2, got {self.num_classes}")
        if self.encoder_kind is EncoderKind.ATTENTION:
            if self.num_heads < 1 or self.embed_dim % self.num_heads:
                raise ConfigError(
                    f"embed_dim {self.embed_dim} must be divisible by num_heads {self.num_heads}"
                )
            if self.ffn_dim < 1:
                raise ConfigError(f"ffn_dim must be >= 1, got {self.ffn_dim}")

    @property
    def head_dim(self) -> int:
        return self.embed_dim // self.num_heads

    def shapes(self) -> dict[str, tuple[int, ...]]:
        """Parameter names and shapes, in initialisation order."""
        v, d, k, f = self.vocab_size, self.embed_dim, self.num_classes, self.ffn_dim
        out = {"embedding": (v, d)}
        if self.encoder_kind is EncoderKind.ATTENTION:
            out.update({
                "attn_q": (d, d), "attn_k": (d, d), "attn_v": (d, d), "attn_o": (d, d),
                "ffn_w1": (d, f), "ffn_b1": (f,), "ffn_w2": (f, d), "ffn_b2": (d,),
            })
        out.update({"head_w": (d, k), "head_b": (k,)})
        return out


BIAS_NAMES = frozenset({"ffn_b1", "ffn_b2", "head_b"})


@dataclass
class ModelParams:
    config: ModelConfig
    tensors: dict[str, np.ndarray]

    def __post_init__(self):
        expected = self.config.shapes()
        if set(self.tensors) != set(expected):
            raise ConfigError(f"parameter names {sorted(self.tensors)} != {sorted(expected)}")
        for name, shape in expected.items():
            if self.tensors[name].shape != shape:
                raise ConfigError(f"{name}: shape {self.tensors[name].shape}, expected {shape}")

    def __getitem__(self, name: str) -> np.ndarray:
        return self.tensors[name]

    def names(self) -> list[str]:
        return list(self.config.shapes())

    def copy(self) -> "ModelParams":
        return ModelParams(self.config, {k: v.copy() for k, v in self.tensors.items()})


# name -> gradient tensor, same keys and shapes as ModelParams.tensors
GradientSet = dict


def init_params(config: ModelConfig) -> ModelParams:
    """Glorot-uniform weights, zero biases, zero PAD embedding row."""
    rng = np.random.default_rng(config.init_seed)
    tensors = {}
    for name, shape in config.shapes().items():
        if name in BIAS_NAMES:
            tensors[name] = np.zeros(shape)
            continue
        fan_in, fan_out = shape
        s = math.sqrt(6.0 / (fan_in + fan_out))
        tensors[name] = rng.uniform(-s, s, size=shape)
    tensors["embedding"][PAD_ID] = 0.0
    return ModelParams(config, tensors)


def _layer_norm(x):
    mu = x.mean(axis=-1, keepdims=True)
    xc = x - mu
    inv_std = 1.0 / np.sqrt((xc * xc).mean(axis=-1, keepdims=True) + LN_EPS)
    return xc * inv_std, inv_std


def _layer_norm_backward(dy, y, inv_std):
    d = y.shape[-1]
    return inv_std * (dy - dy.sum(axis=-1, keepdims=True) / d
                      - y * (dy * y).sum(axis=-1, keepdims=True) / d)


def _gelu(u):
    t = np.tanh(_GELU_C * (u + 0.044715 * u ** 3))
    return 0.5 * u * (1.0 + t), t


def _gelu_grad(u, t):
    return 0.5 * (1.0 + t) + 0.5 * u * (1.0 - t * t) * _GELU_C * (1.0 + 3 * 0.044715 * u * u)


@dataclass
class ForwardCache:
    ids: np.ndarray
    mask: np.ndarray
    lengths: np.ndarray
    x: np.ndarray  # embedded inputs [B, L, D]
    h: np.ndarray  # encoder output [B, L, D]
    pooled: np.ndarray  # [B, D]
    logits: np.ndarray  # [B, K]
    attn: dict = field(default_factory=dict)


def _split_heads(t, heads):
    b, l, d = t.shape
    return t.reshape(b, l, heads, d // heads).transpose(0, 2, 1, 3)


def _merge_heads(t):
    b, h, l, dh = t.shape
    return t.transpose(0, 2, 1, 3).reshape(b, l, h * dh)


def _attention_forward(p: ModelParams, x, mask):
    cfg = p.config
    heads = cfg.num_heads
    a, inv1 = _layer_norm(x)
    q = _split_heads(a @ p["attn_q"], heads)
    k = _split_heads(a @ p["attn_k"], heads)
    v = _split_heads(a @ p["attn_v"], heads)
    scale = 1.0 / math.sqrt(cfg.head_dim)
    scores = (q @ k.transpose(0, 1, 3, 2)) * scale
    key_ok = mask[:, None, None, :] > 0
    scores = np.where(key_ok, scores, -np.inf)
    scores = scores - scores.max(axis=-1, keepdims=True)
    e = np.exp(scores)
    probs = e / e.sum(axis=-1, keepdims=True)
    ctx = _merge_heads(probs @ v)
    h1 = x + ctx @ p["attn_o"]
    c, inv2 = _layer_norm(h1)
    u = c @ p["ffn_w1"] + p["ffn_b1"]
    g, t = _gelu(u)
    h = h1 + g @ p["ffn_w2"] + p["ffn_b2"]
    cache = dict(a=a, inv1=inv1, q=q, k=k, v=v, probs=probs, ctx=ctx, h1=h1, c=c, inv2=inv2,
                 u=u, g=g, t=t, scale=scale)
    return h, cache


def forward(params: ModelParams, batch: EncodedBatch) -> tuple[np.ndarray, ForwardCache]:
    cfg = params.config
    ids = np.asarray(batch.ids, dtype=np.int64)
    if ids.ndim != 2:
        raise InputError(f"ids must be a [B, L] matrix, got shape {ids.shape}")
    if ids.size and (ids.min() < 0 or ids.max() >= cfg.vocab_size):
        raise InputError(f"token id out of range [0, {cfg.vocab_size})")
    mask = np.asarray(batch.mask, dtype=np.float64)
    lengths = np.asarray(batch.lengths, dtype=np.int64)
    if mask.shape != ids.shape or lengths.shape != (ids.shape[0],):
        raise InputError("mask/lengths do not match ids")
    if np.any(lengths < 1):
        raise InputError("every row needs at least one real token")

    x = params["embedding"][ids]
    attn = {}
    if cfg.encoder_kind is EncoderKind.ATTENTION:
        h, attn = _attention_forward(params, x, mask)
    else:
        h = x
    pooled = np.einsum("bl,bld->bd", mask, h) / lengths[:, None]
    logits = pooled @ params["head_w"] + params["head_b"]
    return logits, ForwardCache(ids, mask, lengths, x, h, pooled, logits, attn)


def _attention_backward(p: ModelParams, cache: ForwardCache, dh, grads):
    ac = cache.attn
    # feed-forward sublayer, residual passes dh straight through
    grads["ffn_b2"] = dh.sum(axis=(0, 1))
    grads["ffn_w2"] = np.einsum("blf,bld->fd", ac["g"], dh)
    du = (dh @ p["ffn_w2"].T) * _gelu_grad(ac["u"], ac["t"])
    grads["ffn_b1"] = du.sum(axis=(0, 1))
    grads["ffn_w1"] = np.einsum("bld,blf->df", ac["c"], du)
    dh1 = dh + _layer_norm_backward(du @ p["ffn_w1"].T, ac["c"], ac["inv2"])

    # attention sublayer
    grads["attn_o"] = np.einsum("bld,ble->de", ac["ctx"], dh1)
    dctx = _split_heads(dh1 @ p["attn_o"].T, p.config.num_heads)
    probs, q, k, v = ac["probs"], ac["q"], ac["k"], ac["v"]
    dprobs = dctx @ v.transpose(0, 1, 3, 2)
    dv = probs.transpose(0, 1, 3, 2) @ dctx
    dscores = probs * (dprobs - (dprobs * probs).sum(axis=-1, keepdims=True)) * ac["scale"]
    dq = dscores @ k
    dk = dscores.transpose(0, 1, 3, 2) @ q
    a = ac["a"]
    da = np.zeros_like(a)
    for name, dt in (("attn_q", dq), ("attn_k", dk), ("attn_v", dv)):
        dt = _merge_heads(dt)
        grads[name] = np.einsum("bld,ble->de", a, dt)
        da += dt @ p[name].T
    return dh1 + _layer_norm_backward(da, a, ac["inv1"])


def backward(params: ModelParams, cache: ForwardCache, dlogits) -> GradientSet:
    """Gradients of sum(logits * dlogits) with respect to every parameter tensor."""
    dlogits = np.asarray(dlogits, dtype=np.float64)
    if dlogits.shape != cache.logits.shape:
        raise InputError(f"dlogits shape {dlogits.shape} != logits shape {cache.logits.shape}")
    grads: GradientSet = {}
    grads["head_w"] = cache.pooled.T @ dlogits
    grads["head_b"] = dlogits.sum(axis=0)
    dpooled = dlogits @ params["head_w"].T
    dh = cache.mask[:, :, None] * (dpooled / cache.lengths[:, None])[:, None, :]
    if params.config.encoder_kind is EncoderKind.ATTENTION:
        dx = _attention_backward(params, cache, dh, grads)
    else:
        dx = dh
    demb = np.zeros_like(params["embedding"])
    np.add.at(demb, cache.ids.reshape(-1), dx.reshape(-1, dx.shape[-1]))
    demb[PAD_ID] = 0.0
    grads["embedding"] = demb
    return {name: grads[name] for name in params.names()}


def predict(logits) -> np.ndarray:
    """Row-wise argmax; ties go to the smallest class index."""
    z = np.asarray(logits, dtype=np.float64)
    if np.isnan(z).any():
        raise NumericError("NaN in logits")
    return np.argmax(z, axis=-1)
