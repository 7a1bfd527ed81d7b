from .tensor import (
    ConfigError,
    ShapeError,
    Tensor,
    blur2d,
    concat_rows,
    conv2d,
    crop2d,
    elementwise,
    matmul,
    mean,
    mse,
    upsample2x,
)
from .adam import AdamState, OptimizerError, adam_step
from .checkpoint import load_tensors, save_tensors

__all__ = [
    "Tensor",
    "ShapeError",
    "ConfigError",
    "matmul",
    "conv2d",
    "elementwise",
    "mse",
    "mean",
    "blur2d",
    "crop2d",
    "upsample2x",
    "concat_rows",
    "AdamState",
    "OptimizerError",
    "adam_step",
    "save_tensors",
    "load_tensors",
]
