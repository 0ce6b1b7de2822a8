"""Model assembly: an input affine map, a stack of residual blocks with
optional per-block feature attention, and a single-logit output head.

Parameters live in plain dataclasses of float64 arrays. Everything that
needs to walk the parameter tree (the optimizer, the gradient checker,
persistence) goes through :func:`named_parameters` / :func:`named_state`,
which yield (dotted-name, array) pairs in a fixed order; the arrays are
the live objects, so in-place updates through them update the model.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .layers import (
    AffineParams,
    AttentionParams,
    BatchNormParams,
    ResidualBlockParams,
    affine_forward,
    affine_backward,
    attention_forward,
    attention_backward,
    residual_block_forward,
    residual_block_backward,
)
from .losses import LossSpec, apply_loss

__all__ = [
    "ArchitectureConfig",
    "ModelParams",
    "init_model",
    "named_parameters",
    "named_state",
    "model_forward",
    "model_backward",
    "model_loss",
]


@dataclass(frozen=True)
class ArchitectureConfig:
    """Widths and wiring of the network.

    ``input_width`` is the output width of the input affine map;
    ``block_widths`` gives each residual block's output width (a block
    whose input and output widths differ gets a projection shortcut).
    ``attention_after_each`` inserts an attention layer after every block
    instead of only after the last one.
    """

    input_width: int = 64
    block_widths: tuple[int, ...] = (64, 64, 64)
    attention_after_each: bool = False
    init_seed: int = 0
    bn_eps: float = 1e-5
    bn_momentum: float = 0.9

    def __post_init__(self) -> None:
        if self.input_width < 1 or any(w < 1 for w in self.block_widths):
            raise ValueError("widths must be positive")
        if len(self.block_widths) < 1:
            raise ValueError("at least one residual block is required")


@dataclass(eq=False)
class ModelParams:
    """Ordered parameter blocks defining the network.

    ``attentions`` is aligned with ``blocks``; entries are None where no
    attention layer follows that block. The default wiring has exactly
    one attention layer, after the final block, exposed as ``attention``.
    """

    input_affine: AffineParams
    blocks: list[ResidualBlockParams]
    attentions: list[AttentionParams | None]
    output_affine: AffineParams
    n_features: int
    arch: ArchitectureConfig = field(repr=False)

    @property
    def attention(self) -> AttentionParams | None:
        return self.attentions[-1]


def _zeros_affine(n_out: int, n_in: int) -> AffineParams:
    return AffineParams(W=np.zeros((n_out, n_in)), b=np.zeros(n_out))


def _zeros_bn(width: int, arch: ArchitectureConfig) -> BatchNormParams:
    return BatchNormParams(
        gamma=np.ones(width),
        beta=np.zeros(width),
        running_mean=np.zeros(width),
        running_var=np.ones(width),
        momentum=arch.bn_momentum,
        eps_bn=arch.bn_eps,
    )


def _alloc_model(n_features: int, arch: ArchitectureConfig) -> ModelParams:
    """Build the parameter structure with zero weights and identity norms."""
    blocks: list[ResidualBlockParams] = []
    attentions: list[AttentionParams | None] = []
    in_width = arch.input_width
    for i, out_width in enumerate(arch.block_widths):
        projection = _zeros_affine(out_width, in_width) if in_width != out_width else None
        blocks.append(
            ResidualBlockParams(
                affine1=_zeros_affine(out_width, in_width),
                bn1=_zeros_bn(out_width, arch),
                affine2=_zeros_affine(out_width, out_width),
                bn2=_zeros_bn(out_width, arch),
                projection=projection,
            )
        )
        last = i == len(arch.block_widths) - 1
        if arch.attention_after_each or last:
            attentions.append(
                AttentionParams(W_a=np.zeros((out_width, out_width)), b_a=np.zeros(out_width))
            )
        else:
            attentions.append(None)
        in_width = out_width
    return ModelParams(
        input_affine=_zeros_affine(arch.input_width, n_features),
        blocks=blocks,
        attentions=attentions,
        output_affine=_zeros_affine(1, in_width),
        n_features=n_features,
        arch=arch,
    )


def init_model(n_features: int, arch: ArchitectureConfig) -> ModelParams:
    """Seeded initialization: uniform He-style weights, zero biases.

    Each weight matrix is drawn U(-sqrt(6/fan_in), +sqrt(6/fan_in)) from
    one PCG64 stream seeded with ``arch.init_seed``, visiting tensors in
    the :func:`named_parameters` order, so initialization is
    bit-reproducible.
    """
    model = _alloc_model(n_features, arch)
    rng = np.random.Generator(np.random.PCG64(arch.init_seed))
    for name, tensor in named_parameters(model):
        if tensor.ndim == 2 and (name.endswith(".W") or name.endswith(".W_a")):
            fan_in = tensor.shape[1]
            limit = np.sqrt(6.0 / fan_in)
            tensor[...] = rng.uniform(-limit, limit, size=tensor.shape)
    return model


def named_parameters(model: ModelParams) -> list[tuple[str, np.ndarray]]:
    """Trainable tensors as (dotted name, live array) pairs, fixed order."""
    pairs: list[tuple[str, np.ndarray]] = [
        ("input_affine.W", model.input_affine.W),
        ("input_affine.b", model.input_affine.b),
    ]
    for i, (block, attn) in enumerate(zip(model.blocks, model.attentions)):
        prefix = f"blocks.{i}."
        pairs += [
            (prefix + "affine1.W", block.affine1.W),
            (prefix + "affine1.b", block.affine1.b),
            (prefix + "bn1.gamma", block.bn1.gamma),
            (prefix + "bn1.beta", block.bn1.beta),
            (prefix + "affine2.W", block.affine2.W),
            (prefix + "affine2.b", block.affine2.b),
            (prefix + "bn2.gamma", block.bn2.gamma),
            (prefix + "bn2.beta", block.bn2.beta),
        ]
        if block.projection is not None:
            pairs += [
                (prefix + "projection.W", block.projection.W),
                (prefix + "projection.b", block.projection.b),
            ]
        if attn is not None:
            pairs += [
                (prefix + "attention.W_a", attn.W_a),
                (prefix + "attention.b_a", attn.b_a),
            ]
    pairs += [
        ("output_affine.W", model.output_affine.W),
        ("output_affine.b", model.output_affine.b),
    ]
    return pairs


def named_state(model: ModelParams) -> list[tuple[str, np.ndarray]]:
    """Non-trainable state (batch-norm running statistics), fixed order."""
    pairs: list[tuple[str, np.ndarray]] = []
    for i, block in enumerate(model.blocks):
        for bn_name, bn in (("bn1", block.bn1), ("bn2", block.bn2)):
            prefix = f"blocks.{i}.{bn_name}."
            pairs += [
                (prefix + "running_mean", bn.running_mean),
                (prefix + "running_var", bn.running_var),
            ]
    return pairs


def model_forward(
    model: ModelParams,
    X: np.ndarray,
    mode: str = "infer",
    update_running: bool = True,
    want_cache: bool = False,
) -> tuple[np.ndarray, list | None]:
    """Run the network, returning one logit per row.

    Returns ``(logits, cache)``; the cache (None unless requested) feeds
    :func:`model_backward`. Forward is deterministic: the same parameters
    and batch give bitwise-identical logits.
    """
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] != model.n_features:
        raise ValueError(
            f"expected input of width {model.n_features}, got shape {X.shape}"
        )
    cache: list = [] if want_cache else None
    h = affine_forward(model.input_affine, X)
    if want_cache:
        cache.append(("input_affine", X))
    for block, attn in zip(model.blocks, model.attentions):
        h, block_cache = residual_block_forward(block, h, mode, update_running)
        if want_cache:
            cache.append(("block", block_cache))
        if attn is not None:
            h, attn_cache = attention_forward(attn, h)
            if want_cache:
                cache.append(("attention", attn_cache))
    logits = affine_forward(model.output_affine, h)[:, 0]
    if want_cache:
        cache.append(("output_affine", h))
    return logits, cache


def model_backward(
    model: ModelParams, cache: list, dlogits: np.ndarray
) -> dict[str, np.ndarray]:
    """Reverse-mode gradients for every trainable tensor.

    ``cache`` must come from a :func:`model_forward` call with
    ``want_cache=True`` on the same batch. Returns a dict keyed exactly
    like :func:`named_parameters`.
    """
    if cache is None:
        raise ValueError("model_backward requires the forward cache")
    grads: dict[str, np.ndarray] = {}

    kind, h_last = cache[-1]
    assert kind == "output_affine"
    dout_mat = dlogits.reshape(-1, 1)
    dh, dW, db = affine_backward(model.output_affine, h_last, dout_mat)
    grads["output_affine.W"] = dW
    grads["output_affine.b"] = db

    pos = len(cache) - 2
    for i in range(len(model.blocks) - 1, -1, -1):
        attn = model.attentions[i]
        if attn is not None:
            kind, attn_cache = cache[pos]
            assert kind == "attention"
            pos -= 1
            dh, dW_a, db_a = attention_backward(attn, attn_cache, dh)
            grads[f"blocks.{i}.attention.W_a"] = dW_a
            grads[f"blocks.{i}.attention.b_a"] = db_a
        kind, block_cache = cache[pos]
        assert kind == "block"
        pos -= 1
        dh, block_grads = residual_block_backward(model.blocks[i], block_cache, dh)
        for local_name, g in block_grads.items():
            grads[f"blocks.{i}.{local_name}"] = g

    kind, X = cache[pos]
    assert kind == "input_affine"
    _, dW, db = affine_backward(model.input_affine, X, dh)
    grads["input_affine.W"] = dW
    grads["input_affine.b"] = db
    return grads


def model_loss(
    model: ModelParams,
    X: np.ndarray,
    y: np.ndarray,
    spec: LossSpec,
    mode: str = "train",
    anchors: np.ndarray | None = None,
    update_running: bool = True,
    want_grads: bool = True,
) -> tuple[float, dict[str, np.ndarray] | None]:
    """Forward plus objective, optionally with parameter gradients."""
    logits, cache = model_forward(
        model, X, mode=mode, update_running=update_running, want_cache=want_grads
    )
    loss, dlogits = apply_loss(logits, y, spec, anchors=anchors)
    if not want_grads:
        return loss, None
    return loss, model_backward(model, cache, dlogits)
