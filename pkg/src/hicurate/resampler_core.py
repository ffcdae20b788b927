"""Desk-scale numerical model of the query-based spatiotemporal resampler.

A fixed set of learnable queries cross-attends onto 3D-position-encoded
patch tokens and projects to the output width, so any (T, H, W) token grid
compresses to a constant number of output tokens. Everything runs in
double-precision numpy; analytic gradients are hand-derived and verified
against central finite differences.

Positional codes are factorized sinusoids over (t, h, w) and are added to
keys only. A single no-affine layer normalization is applied to queries
and keys before the dot product.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ResamplerError

_LN_EPS = 1e-6


@dataclass
class ResamplerConfig:
    n_queries: int = 64
    d_in: int = 12
    d_model: int = 16
    n_heads: int = 2
    d_llm: int = 16
    seed: int = 0

    def __post_init__(self):
        dims = (self.n_queries, self.d_in, self.d_model, self.n_heads, self.d_llm)
        if any(d < 1 for d in dims):
            raise ResamplerError("all dimensions must be >= 1")
        if self.d_model % self.n_heads != 0:
            raise ResamplerError(
                f"n_heads={self.n_heads} must divide d_model={self.d_model}")


@dataclass
class PatchTokenGrid:
    """Token grid of shape dims=(T, H_p, W_p) flattened to (L, d_in) rows."""

    dims: tuple[int, int, int]
    tokens: np.ndarray

    def __post_init__(self):
        t, h, w = self.dims
        if t < 1 or h < 1 or w < 1:
            raise ResamplerError(f"grid dims must be positive, got {self.dims}")
        self.tokens = np.asarray(self.tokens, dtype=np.float64)
        if self.tokens.shape[0] != t * h * w:
            raise ResamplerError(
                f"expected {t * h * w} tokens for dims {self.dims}, "
                f"got {self.tokens.shape[0]}")
        if not np.all(np.isfinite(self.tokens)):
            raise ResamplerError("non-finite token values")


@dataclass
class ResamplerParams:
    config: ResamplerConfig
    queries: np.ndarray  # (n_queries, d_model)
    w_k: np.ndarray      # (d_in, d_model)
    b_k: np.ndarray      # (d_model,)
    w_v: np.ndarray      # (d_in, d_model)
    b_v: np.ndarray      # (d_model,)
    w_o: np.ndarray      # (d_model, d_llm)
    b_o: np.ndarray      # (d_llm,)

    def tensors(self) -> dict[str, np.ndarray]:
        return {"queries": self.queries, "w_k": self.w_k, "b_k": self.b_k,
                "w_v": self.w_v, "b_v": self.b_v, "w_o": self.w_o, "b_o": self.b_o}


def init_resampler(config: ResamplerConfig) -> ResamplerParams:
    """Deterministic init: projections ~ N(0, 1/fan_in), queries 0.02 * N(0, 1)."""
    rng = np.random.default_rng(config.seed)
    def proj(fan_in, fan_out):
        return rng.standard_normal((fan_in, fan_out)) / np.sqrt(fan_in)
    return ResamplerParams(
        config=config,
        queries=0.02 * rng.standard_normal((config.n_queries, config.d_model)),
        w_k=proj(config.d_in, config.d_model),
        b_k=np.zeros(config.d_model),
        w_v=proj(config.d_in, config.d_model),
        b_v=np.zeros(config.d_model),
        w_o=proj(config.d_model, config.d_llm),
        b_o=np.zeros(config.d_llm),
    )


def positional_embedding_3d(dims: tuple[int, int, int], width: int) -> np.ndarray:
    """Factorized sinusoidal codes over (t, h, w), one row per grid cell.

    Each axis gets ``2 * (width // 6)`` channels of interleaved sin/cos
    pairs; leftover channels are zero. Rows follow t-major, then h, then w
    ordering to match PatchTokenGrid flattening.
    """
    t_n, h_n, w_n = dims
    if t_n < 1 or h_n < 1 or w_n < 1:
        raise ResamplerError(f"grid dims must be positive, got {dims}")
    if width < 6:
        raise ResamplerError("positional width must be >= 6 (sin/cos per axis)")
    w_axis = 2 * (width // 6)

    def axis_code(positions: np.ndarray) -> np.ndarray:
        pairs = w_axis // 2
        j = np.arange(pairs)
        freqs = 1.0 / (10000.0 ** (2.0 * j / w_axis))
        angles = positions[:, None] * freqs[None, :]
        code = np.empty((positions.size, w_axis))
        code[:, 0::2] = np.sin(angles)
        code[:, 1::2] = np.cos(angles)
        return code

    t_code = axis_code(np.arange(t_n, dtype=np.float64))
    h_code = axis_code(np.arange(h_n, dtype=np.float64))
    w_code = axis_code(np.arange(w_n, dtype=np.float64))

    out = np.zeros((t_n * h_n * w_n, width))
    row = 0
    for t in range(t_n):
        for h in range(h_n):
            for w in range(w_n):
                out[row, 0:w_axis] = t_code[t]
                out[row, w_axis:2 * w_axis] = h_code[h]
                out[row, 2 * w_axis:3 * w_axis] = w_code[w]
                row += 1
    return out


def _layernorm(x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Row-wise no-affine layer norm; returns (normalized, inverse std)."""
    mu = x.mean(axis=-1, keepdims=True)
    var = ((x - mu) ** 2).mean(axis=-1, keepdims=True)
    inv_std = 1.0 / np.sqrt(var + _LN_EPS)
    return (x - mu) * inv_std, inv_std


def _layernorm_backward(y: np.ndarray, inv_std: np.ndarray,
                        dy: np.ndarray) -> np.ndarray:
    # dx = inv_std * (dy - mean(dy) - y * mean(dy * y)), row-wise
    m1 = dy.mean(axis=-1, keepdims=True)
    m2 = (dy * y).mean(axis=-1, keepdims=True)
    return inv_std * (dy - m1 - y * m2)


def _softmax(logits: np.ndarray) -> np.ndarray:
    shifted = logits - logits.max(axis=-1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=-1, keepdims=True)


def _split_heads(x: np.ndarray, n_heads: int) -> np.ndarray:
    rows, d = x.shape
    return x.reshape(rows, n_heads, d // n_heads).transpose(1, 0, 2)


def _forward(params: ResamplerParams, grid: PatchTokenGrid) -> dict:
    cfg = params.config
    if grid.tokens.shape[1] != cfg.d_in:
        raise ResamplerError(
            f"token width {grid.tokens.shape[1]} != configured d_in {cfg.d_in}")
    x = grid.tokens + positional_embedding_3d(grid.dims, cfg.d_in)
    k_raw = x @ params.w_k + params.b_k
    v = x @ params.w_v + params.b_v
    q_norm, q_inv_std = _layernorm(params.queries)
    k_norm, k_inv_std = _layernorm(k_raw)

    d_head = cfg.d_model // cfg.n_heads
    scale = 1.0 / np.sqrt(d_head)
    q_h = _split_heads(q_norm, cfg.n_heads)   # (H, Nq, dh)
    k_h = _split_heads(k_norm, cfg.n_heads)   # (H, L, dh)
    v_h = _split_heads(v, cfg.n_heads)        # (H, L, dh)
    logits = np.einsum("hqd,hld->hql", q_h, k_h) * scale
    attn = _softmax(logits)                   # (H, Nq, L)
    heads = np.einsum("hql,hld->hqd", attn, v_h)
    merged = heads.transpose(1, 0, 2).reshape(cfg.n_queries, cfg.d_model)
    out = merged @ params.w_o + params.b_o
    return {"x": x, "k_raw": k_raw, "v": v, "q_norm": q_norm, "k_norm": k_norm,
            "q_inv_std": q_inv_std, "k_inv_std": k_inv_std, "q_h": q_h,
            "k_h": k_h, "v_h": v_h, "attn": attn, "merged": merged,
            "out": out, "scale": scale}


def resample(params: ResamplerParams, grid: PatchTokenGrid) -> np.ndarray:
    """Compress a token grid to (n_queries, d_llm)."""
    return _forward(params, grid)["out"]


def attention_weights(params: ResamplerParams, grid: PatchTokenGrid,
                      per_head: bool = False) -> np.ndarray:
    """Post-softmax attention, (n_heads, n_queries, L) or head-averaged."""
    attn = _forward(params, grid)["attn"]
    return attn if per_head else attn.mean(axis=0)


def cross_entropy(logits: np.ndarray, targets: np.ndarray) -> float:
    """Mean -log softmax(logits)[target], log-sum-exp stabilized."""
    z = np.atleast_2d(np.asarray(logits, dtype=np.float64))
    t = np.atleast_1d(np.asarray(targets, dtype=np.int64))
    if t.size != z.shape[0]:
        raise ResamplerError("one target per logit row required")
    if np.any(t < 0) or np.any(t >= z.shape[1]):
        raise ResamplerError("target class index out of range")
    shifted = z - z.max(axis=1, keepdims=True)
    log_probs = shifted - np.log(np.exp(shifted).sum(axis=1, keepdims=True))
    return float(-log_probs[np.arange(t.size), t].mean())


def probe_params(config: ResamplerConfig, n_classes: int) -> tuple[np.ndarray, np.ndarray]:
    """Fixed linear probe for the verification loss path."""
    rng = np.random.default_rng(config.seed + 1)
    w = rng.standard_normal((config.d_llm, n_classes)) / np.sqrt(config.d_llm)
    return w, np.zeros(n_classes)


def _loss(params: ResamplerParams, grid: PatchTokenGrid, targets: np.ndarray,
          probe_w: np.ndarray, probe_b: np.ndarray) -> float:
    pooled = resample(params, grid).mean(axis=0)
    return cross_entropy(pooled @ probe_w + probe_b, targets)


def loss_and_gradients(params: ResamplerParams, grid: PatchTokenGrid,
                       targets: np.ndarray, probe_w: np.ndarray,
                       probe_b: np.ndarray) -> tuple[float, dict[str, np.ndarray]]:
    """Verification loss (resample -> mean-pool -> fixed probe -> cross
    entropy) and its analytic gradients for every resampler parameter."""
    cfg = params.config
    cache = _forward(params, grid)
    pooled = cache["out"].mean(axis=0)
    z = pooled @ probe_w + probe_b
    t = np.atleast_1d(np.asarray(targets, dtype=np.int64))
    loss = cross_entropy(z, t)
    if not np.isfinite(loss):
        raise ResamplerError("non-finite verification loss")

    # backprop
    probs = _softmax(np.atleast_2d(z))[0]
    dz = probs.copy()
    dz[t[0]] -= 1.0
    d_pooled = probe_w @ dz
    d_out = np.tile(d_pooled / cfg.n_queries, (cfg.n_queries, 1))

    d_merged = d_out @ params.w_o.T
    dw_o = cache["merged"].T @ d_out
    db_o = d_out.sum(axis=0)

    d_heads = _split_heads(d_merged, cfg.n_heads)  # (H, Nq, dh)
    attn, v_h = cache["attn"], cache["v_h"]
    d_attn = np.einsum("hqd,hld->hql", d_heads, v_h)
    dv_h = np.einsum("hql,hqd->hld", attn, d_heads)
    # softmax backward per row
    inner = (d_attn * attn).sum(axis=-1, keepdims=True)
    d_logits = attn * (d_attn - inner)
    scale = cache["scale"]
    dq_h = np.einsum("hql,hld->hqd", d_logits, cache["k_h"]) * scale
    dk_h = np.einsum("hql,hqd->hld", d_logits, cache["q_h"]) * scale

    def merge_heads(x_h, rows):
        return x_h.transpose(1, 0, 2).reshape(rows, cfg.d_model)

    n_tokens = grid.tokens.shape[0]
    d_q_norm = merge_heads(dq_h, cfg.n_queries)
    d_k_norm = merge_heads(dk_h, n_tokens)
    dv = merge_heads(dv_h, n_tokens)

    d_queries = _layernorm_backward(cache["q_norm"], cache["q_inv_std"], d_q_norm)
    d_k_raw = _layernorm_backward(cache["k_norm"], cache["k_inv_std"], d_k_norm)

    x = cache["x"]
    grads = {
        "queries": d_queries,
        "w_k": x.T @ d_k_raw,
        "b_k": d_k_raw.sum(axis=0),
        "w_v": x.T @ dv,
        "b_v": dv.sum(axis=0),
        "w_o": dw_o,
        "b_o": db_o,
    }
    return loss, grads


def gradient_check(params: ResamplerParams, grid: PatchTokenGrid,
                   targets: np.ndarray, epsilon: float = 1e-5,
                   coords_per_tensor: int = 50, seed: int = 0) -> float:
    """Max relative error between analytic gradients and central finite
    differences over a random coordinate subset of every parameter tensor."""
    if epsilon <= 0:
        raise ResamplerError("finite-difference step must be positive")
    n_classes = 1 + int(np.max(np.atleast_1d(targets)))
    probe_w, probe_b = probe_params(params.config, max(n_classes, 2))
    _, grads = loss_and_gradients(params, grid, targets, probe_w, probe_b)

    rng = np.random.default_rng(seed)
    max_rel = 0.0
    for name, tensor in params.tensors().items():
        flat = tensor.reshape(-1)
        n = min(coords_per_tensor, flat.size)
        idx = rng.choice(flat.size, size=n, replace=False)
        for i in idx:
            orig = flat[i]
            flat[i] = orig + epsilon
            up = _loss(params, grid, targets, probe_w, probe_b)
            flat[i] = orig - epsilon
            down = _loss(params, grid, targets, probe_w, probe_b)
            flat[i] = orig
            numeric = (up - down) / (2.0 * epsilon)
            analytic = grads[name].reshape(-1)[i]
            denom = max(abs(numeric), abs(analytic), 1e-8)
            max_rel = max(max_rel, abs(numeric - analytic) / denom)
    return max_rel


def synthetic_grid(dims: tuple[int, int, int], d_in: int,
                   seed: int = 0) -> PatchTokenGrid:
    rng = np.random.default_rng(seed)
    t, h, w = dims
    return PatchTokenGrid(dims=dims, tokens=rng.standard_normal((t * h * w, d_in)))
