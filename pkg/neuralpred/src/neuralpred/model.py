"""Generator and discriminator networks.

The generator is a small U-Net over the 3-plane observation window with
a parallel branch: a patch-embedding transformer encoder followed by a
spectral block (local convolution branch plus a global branch that maps
through a 2D real FFT, mixes channels pointwise in frequency space and
transforms back), concatenated onto the bottleneck feature maps. A
sigmoid head keeps outputs in [0, 1]. The discriminator is a strided
convolutional encoder with spatial logits, so losses can be restricted
to sub-regions of the window.
"""

from __future__ import annotations

from dataclasses import dataclass

import torch
import torch.nn as nn

from .errors import ConfigError

DROPOUT_RATE = 0.5


@dataclass(frozen=True)
class NetworkConfig:
    side: int = 256
    base_channels: int = 16
    transformer_depth: int = 2
    transformer_heads: int = 4
    patch_size: int = 16
    ffc_enabled: bool = True

    def __post_init__(self):
        if self.side < 8:
            raise ConfigError("side must be >= 8")
        if self.side % self.patch_size != 0:
            raise ConfigError(f"side {self.side} not divisible by patch size {self.patch_size}")
        if self.side % 4 != 0:
            raise ConfigError("side must be divisible by 4 (two stride-2 stages)")
        if self.base_channels < 1 or self.transformer_depth < 1 or self.transformer_heads < 1:
            raise ConfigError("channel width, depth and heads must be >= 1")


def _conv_block(cin, cout):
    return nn.Sequential(
        nn.Conv2d(cin, cout, 3, padding=1),
        nn.BatchNorm2d(cout),
        nn.ReLU(inplace=True),
        nn.Conv2d(cout, cout, 3, padding=1),
        nn.BatchNorm2d(cout),
        nn.ReLU(inplace=True),
    )


class SpectralBlock(nn.Module):
    """Local conv branch + global frequency-domain branch, summed."""

    def __init__(self, channels):
        super().__init__()
        self.local = nn.Sequential(
            nn.Conv2d(channels, channels, 3, padding=1),
            nn.ReLU(inplace=True),
        )
        # pointwise mixing on stacked real/imaginary parts
        self.freq = nn.Conv2d(2 * channels, 2 * channels, 1)

    def forward(self, x):
        local = self.local(x)
        spec = torch.fft.rfft2(x, norm="ortho")
        stacked = torch.cat([spec.real, spec.imag], dim=1)
        mixed = self.freq(stacked)
        real, imag = torch.chunk(mixed, 2, dim=1)
        global_part = torch.fft.irfft2(torch.complex(real, imag), s=x.shape[-2:], norm="ortho")
        return local + global_part


class TransformerBranch(nn.Module):
    """Patch embedding -> transformer encoder -> feature map at bottleneck scale."""

    def __init__(self, config: NetworkConfig, out_channels: int, out_side: int):
        super().__init__()
        dim = out_channels
        self.patches = nn.Conv2d(3, dim, config.patch_size, stride=config.patch_size)
        tokens = (config.side // config.patch_size) ** 2
        self.pos = nn.Parameter(torch.zeros(1, tokens, dim))
        layer = nn.TransformerEncoderLayer(
            d_model=dim,
            nhead=config.transformer_heads,
            dim_feedforward=4 * dim,
            dropout=DROPOUT_RATE,
            batch_first=True,
            norm_first=True,
        )
        self.encoder = nn.TransformerEncoder(
            layer, num_layers=config.transformer_depth, enable_nested_tensor=False
        )
        self.spectral = SpectralBlock(dim) if config.ffc_enabled else nn.Identity()
        self.out_side = out_side

    def forward(self, x):
        tokens = self.patches(x)  # (b, dim, side/p, side/p)
        b, dim, th, tw = tokens.shape
        flat = tokens.flatten(2).transpose(1, 2) + self.pos
        encoded = self.encoder(flat).transpose(1, 2).reshape(b, dim, th, tw)
        grid = nn.functional.interpolate(encoded, size=(self.out_side, self.out_side), mode="nearest")
        return self.spectral(grid)


class Generator(nn.Module):
    def __init__(self, config: NetworkConfig):
        super().__init__()
        c = config.base_channels
        self.config = config
        self.enc1 = _conv_block(3, c)
        self.enc2 = _conv_block(c, 2 * c)
        self.enc3 = _conv_block(2 * c, 4 * c)
        self.pool = nn.MaxPool2d(2)
        self.branch = TransformerBranch(config, 4 * c, config.side // 4)
        self.merge = nn.Sequential(
            nn.Conv2d(8 * c, 4 * c, 1),
            nn.ReLU(inplace=True),
            nn.Dropout2d(DROPOUT_RATE),
        )
        self.up1 = nn.ConvTranspose2d(4 * c, 2 * c, 2, stride=2)
        self.dec1 = _conv_block(4 * c, 2 * c)
        self.up2 = nn.ConvTranspose2d(2 * c, c, 2, stride=2)
        self.dec2 = _conv_block(2 * c, c)
        self.head = nn.Conv2d(c, 1, 1)

    def forward(self, x):
        s1 = self.enc1(x)  # (b, c, side, side)
        s2 = self.enc2(self.pool(s1))  # (b, 2c, side/2, side/2)
        bottom = self.enc3(self.pool(s2))  # (b, 4c, side/4, side/4)
        bottom = self.merge(torch.cat([bottom, self.branch(x)], dim=1))
        d1 = self.dec1(torch.cat([self.up1(bottom), s2], dim=1))
        d2 = self.dec2(torch.cat([self.up2(d1), s1], dim=1))
        return torch.sigmoid(self.head(d2))


class Discriminator(nn.Module):
    """Strided encoder producing per-region logits at 1/4 resolution."""

    def __init__(self, base_channels: int = 16):
        super().__init__()
        c = base_channels
        self.net = nn.Sequential(
            nn.Conv2d(1, c, 4, stride=2, padding=1),
            nn.LeakyReLU(0.2, inplace=True),
            nn.Conv2d(c, 2 * c, 4, stride=2, padding=1),
            nn.LeakyReLU(0.2, inplace=True),
            nn.Conv2d(2 * c, 1, 3, padding=1),
        )

    def forward(self, x):
        return self.net(x)


def build_generator(config: NetworkConfig) -> Generator:
    return Generator(config)


def build_discriminator(config: NetworkConfig) -> Discriminator:
    return Discriminator(config.base_channels)


def parameter_count(model: nn.Module) -> int:
    return sum(p.numel() for p in model.parameters())
