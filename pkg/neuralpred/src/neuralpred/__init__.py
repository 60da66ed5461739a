"""Toy GAN-trained local map predictor with a TCP serving endpoint."""

from .dataset import PairDataset, load_pair
from .errors import (
    ConfigError,
    DatasetError,
    MalformedPgm,
    NeuralpredError,
    ProtocolViolation,
    ShapeMismatch,
)
from .losses import (
    LossWeights,
    RandomFeatureNet,
    masked_adversarial_loss,
    perceptual_loss,
    total_loss,
)
from .model import (
    NetworkConfig,
    build_discriminator,
    build_generator,
    parameter_count,
)
from .train import load_checkpoint, train, validation_l1

__version__ = "0.1.0"
