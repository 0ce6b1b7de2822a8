"""From-scratch dense numeric engine: layers, losses, model assembly,
Adagrad, reverse-mode gradients, gradient checking, and persistence."""

from .layers import (
    AffineParams,
    AttentionParams,
    BatchNormParams,
    ResidualBlockParams,
    affine_forward,
    affine_backward,
    attention_forward,
    attention_backward,
    batchnorm_forward,
    batchnorm_backward,
    relu,
    relu_backward,
    residual_block_forward,
    residual_block_backward,
    sigmoid,
    softmax_rows,
)
from .losses import BCE_CLAMP, LossSpec, anchored_loss, apply_loss, bce_loss, dice_loss
from .model import (
    ArchitectureConfig,
    ModelParams,
    init_model,
    model_backward,
    model_forward,
    model_loss,
    named_parameters,
    named_state,
)
from .optim import OptimizerState, adagrad_step, init_optimizer
from .gradcheck import GradCheckReport, gradient_check
from .persist import FORMAT_VERSION, load_model, save_model

__all__ = [
    "AffineParams",
    "AttentionParams",
    "BatchNormParams",
    "ResidualBlockParams",
    "ArchitectureConfig",
    "ModelParams",
    "OptimizerState",
    "GradCheckReport",
    "LossSpec",
    "BCE_CLAMP",
    "FORMAT_VERSION",
    "affine_forward",
    "affine_backward",
    "attention_forward",
    "attention_backward",
    "batchnorm_forward",
    "batchnorm_backward",
    "relu",
    "relu_backward",
    "residual_block_forward",
    "residual_block_backward",
    "sigmoid",
    "softmax_rows",
    "bce_loss",
    "dice_loss",
    "anchored_loss",
    "apply_loss",
    "init_model",
    "model_forward",
    "model_backward",
    "model_loss",
    "named_parameters",
    "named_state",
    "init_optimizer",
    "adagrad_step",
    "gradient_check",
    "load_model",
    "save_model",
]
