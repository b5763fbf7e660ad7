"""Layer primitives, architecture templates, training, and verification."""

from .layers import (
    LSTM,
    BatchNorm,
    Conv1D,
    Dense,
    Dropout,
    Embedding,
    GlobalMaxPool1D,
    LambdaSum,
    Param,
    PReLU,
    Sigmoid,
    TimeDistributedDense,
)
from .network import (
    DEFAULT_DIMS,
    Network,
    build_architecture,
    embedding_matrix_from_table,
    load_network,
    save_network,
)
from .training import (
    Adam,
    History,
    TrainConfig,
    bce_loss,
    build_vocab,
    encode,
    gradient_check,
    make_toy_pairs,
    train_network,
)

__all__ = [
    "LSTM",
    "BatchNorm",
    "Conv1D",
    "Dense",
    "Dropout",
    "Embedding",
    "GlobalMaxPool1D",
    "LambdaSum",
    "Param",
    "PReLU",
    "Sigmoid",
    "TimeDistributedDense",
    "DEFAULT_DIMS",
    "Network",
    "build_architecture",
    "embedding_matrix_from_table",
    "load_network",
    "save_network",
    "Adam",
    "History",
    "TrainConfig",
    "bce_loss",
    "build_vocab",
    "encode",
    "gradient_check",
    "make_toy_pairs",
    "train_network",
]
