"""Loss components: masked adversarial, perceptual, and the weighted total."""

from __future__ import annotations

from dataclasses import dataclass

import torch
import torch.nn as nn
import torch.nn.functional as F

from .errors import ConfigError, ShapeMismatch

ADVERSARIAL_FAMILIES = ("hinge", "vanilla", "least-squares")


@dataclass(frozen=True)
class LossWeights:
    omega1: float = 10.0  # adversarial
    omega2: float = 30.0  # perceptual
    omega3: float = 100.0  # reconstruction L1

    def __post_init__(self):
        if self.omega1 < 0 or self.omega2 < 0 or self.omega3 < 0:
            raise ConfigError("loss weights must be >= 0")
        if self.omega1 == 0 and self.omega2 == 0 and self.omega3 == 0:
            raise ConfigError("at least one loss weight must be > 0")


def _region_weights(mask: torch.Tensor, logits: torch.Tensor) -> torch.Tensor:
    """Downsample the cell mask to the discriminator's logit grid."""
    return F.adaptive_avg_pool2d(mask, logits.shape[-2:])


def masked_adversarial_loss(
    disc, pred, truth, mask, role: str, family: str = "hinge"
) -> torch.Tensor:
    """Adversarial objective restricted to the masked region.

    ``mask`` is 1 where the observation was uncertain; it weights the
    discriminator's spatial logits, so fully-observed regions contribute
    nothing. ``role`` selects the generator or discriminator objective.
    """
    if pred.shape != truth.shape or pred.shape != mask.shape:
        raise ShapeMismatch(f"pred {pred.shape}, truth {truth.shape}, mask {mask.shape}")
    if family not in ADVERSARIAL_FAMILIES:
        raise ConfigError(f"unknown adversarial family {family!r}")
    if role == "generator":
        logits = disc(pred)
        weights = _region_weights(mask, logits)
        if family == "hinge" or family == "vanilla":
            if family == "vanilla":
                return (weights * F.softplus(-logits)).mean()
            return -(weights * logits).mean()
        return (weights * (logits - 1.0) ** 2).mean()
    if role == "discriminator":
        real_logits = disc(truth)
        fake_logits = disc(pred.detach())
        weights_real = _region_weights(mask, real_logits)
        weights_fake = _region_weights(mask, fake_logits)
        if family == "hinge":
            real = (weights_real * F.relu(1.0 - real_logits)).mean()
            fake = (weights_fake * F.relu(1.0 + fake_logits)).mean()
        elif family == "vanilla":
            real = (weights_real * F.softplus(-real_logits)).mean()
            fake = (weights_fake * F.softplus(fake_logits)).mean()
        else:
            real = (weights_real * (real_logits - 1.0) ** 2).mean()
            fake = (weights_fake * fake_logits**2).mean()
        return real + fake
    raise ConfigError(f"role must be 'generator' or 'discriminator', got {role!r}")


class RandomFeatureNet(nn.Module):
    """Fixed-seed random convolutional feature stack.

    Stands in for a pretrained deep feature extractor: random frozen
    convolutions still define a stable multi-scale feature metric.
    """

    def __init__(self, seed: int = 0, channels: int = 16, layers: int = 3):
        super().__init__()
        generator = torch.Generator().manual_seed(seed)
        blocks = []
        cin = 1
        for _ in range(layers):
            conv = nn.Conv2d(cin, channels, 3, stride=2, padding=1)
            with torch.no_grad():
                conv.weight.copy_(
                    torch.randn(conv.weight.shape, generator=generator)
                    / conv.weight.shape[1] ** 0.5
                )
                conv.bias.zero_()
            blocks.append(conv)
            cin = channels
        self.blocks = nn.ModuleList(blocks)
        for p in self.parameters():
            p.requires_grad_(False)

    def forward(self, x):
        features = []
        for block in self.blocks:
            x = torch.relu(block(x))
            features.append(x)
        return features


def perceptual_loss(feat_net, pred, truth) -> torch.Tensor:
    """Sum of squared feature differences over the extractor's layers."""
    if pred.shape != truth.shape:
        raise ShapeMismatch(f"{pred.shape} vs {truth.shape}")
    total = pred.new_zeros(())
    for fp, ft in zip(feat_net(pred), feat_net(truth)):
        total = total + ((fp - ft) ** 2).mean()
    return total


def total_loss(weights: LossWeights, adv, perc, l1):
    """Weighted sum, linear in each component."""
    return weights.omega1 * adv + weights.omega2 * perc + weights.omega3 * l1
