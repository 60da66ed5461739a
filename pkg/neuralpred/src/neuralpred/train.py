"""Deterministic toy-scale GAN training loop."""

from __future__ import annotations

import dataclasses
import json
import os
import time

import numpy as np
import torch

from .dataset import PairDataset
from .errors import ConfigError
from .losses import LossWeights, RandomFeatureNet, masked_adversarial_loss, perceptual_loss, total_loss
from .model import NetworkConfig, build_discriminator, build_generator, parameter_count

PERCEPTUAL_SEED = 1234


def _batches(samples, batch_size, order):
    for start in range(0, len(order), batch_size):
        chunk = [samples[i] for i in order[start : start + batch_size]]
        planes = torch.from_numpy(np.stack([c[0] for c in chunk]))
        target = torch.from_numpy(np.stack([c[1] for c in chunk])).unsqueeze(1)
        mask = torch.from_numpy(np.stack([c[2] for c in chunk])).unsqueeze(1)
        yield planes, target, mask


def validation_l1(generator, samples, batch_size: int = 8) -> float:
    """Mean absolute error of the generator over a sample list."""
    generator.eval()
    errors = []
    with torch.no_grad():
        for planes, target, _ in _batches(samples, batch_size, range(len(samples))):
            pred = generator(planes)
            errors.append(torch.abs(pred - target).mean().item())
    return float(np.mean(errors))


def train(
    dataset_dir,
    out_dir,
    config: NetworkConfig | None = None,
    weights: LossWeights | None = None,
    epochs: int = 5,
    seed: int = 0,
    batch_size: int = 8,
    lr: float = 2e-4,
    adversarial_family: str = "hinge",
    val_fraction: float = 0.1,
    log=print,
) -> dict:
    """Train on a pair dataset; write a checkpoint directory.

    The checkpoint holds ``generator.pt``, ``discriminator.pt``,
    ``config.json`` (network + loss settings, seed, parameter count) and
    ``losses.csv`` (per-epoch generator/discriminator loss and
    validation L1). Fully deterministic for a fixed seed.
    """
    if epochs < 1:
        raise ConfigError("epochs must be >= 1")
    dataset = PairDataset(dataset_dir)
    if config is None:
        config = NetworkConfig(side=dataset.side, base_channels=8, patch_size=max(8, dataset.side // 8))
    if config.side != dataset.side:
        raise ConfigError(f"config side {config.side} != dataset side {dataset.side}")
    weights = weights or LossWeights()

    torch.manual_seed(seed)
    torch.set_num_threads(max(1, os.cpu_count() // 2))
    train_samples, val_samples = dataset.split(val_fraction)

    generator = build_generator(config)
    discriminator = build_discriminator(config)
    feat_net = RandomFeatureNet(seed=PERCEPTUAL_SEED)
    opt_g = torch.optim.Adam(generator.parameters(), lr=lr, betas=(0.5, 0.999))
    opt_d = torch.optim.Adam(discriminator.parameters(), lr=lr, betas=(0.5, 0.999))
    shuffler = np.random.default_rng(seed)

    start = time.monotonic()
    rows = []
    for epoch in range(1, epochs + 1):
        generator.train()
        discriminator.train()
        order = shuffler.permutation(len(train_samples))
        g_losses, d_losses = [], []
        for planes, target, mask in _batches(train_samples, batch_size, order):
            pred = generator(planes)

            opt_d.zero_grad()
            d_loss = masked_adversarial_loss(
                discriminator, pred, target, mask, "discriminator", adversarial_family
            )
            d_loss.backward()
            opt_d.step()

            opt_g.zero_grad()
            adv = masked_adversarial_loss(
                discriminator, pred, target, mask, "generator", adversarial_family
            )
            perc = perceptual_loss(feat_net, pred, target)
            l1 = torch.abs(pred - target).mean()
            g_loss = total_loss(weights, adv, perc, l1)
            g_loss.backward()
            opt_g.step()

            g_losses.append(g_loss.item())
            d_losses.append(d_loss.item())

        val = validation_l1(generator, val_samples, batch_size)
        rows.append((epoch, float(np.mean(g_losses)), float(np.mean(d_losses)), val))
        log(
            f"epoch {epoch}/{epochs}  gen={rows[-1][1]:.4f}  "
            f"disc={rows[-1][2]:.4f}  val_l1={val:.4f}"
        )

    os.makedirs(out_dir, exist_ok=True)
    torch.save(generator.state_dict(), os.path.join(out_dir, "generator.pt"))
    torch.save(discriminator.state_dict(), os.path.join(out_dir, "discriminator.pt"))
    meta = {
        "network": dataclasses.asdict(config),
        "loss_weights": dataclasses.asdict(weights),
        "adversarial_family": adversarial_family,
        "seed": seed,
        "epochs": epochs,
        "batch_size": batch_size,
        "lr": lr,
        "parameter_count": parameter_count(generator),
        "train_samples": len(train_samples),
        "val_samples": len(val_samples),
        "train_seconds": round(time.monotonic() - start, 1),
    }
    with open(os.path.join(out_dir, "config.json"), "w") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
        fh.write("\n")
    with open(os.path.join(out_dir, "losses.csv"), "w") as fh:
        fh.write("epoch,gen_loss,disc_loss,val_l1\n")
        for epoch, gen, disc, val in rows:
            fh.write(f"{epoch},{gen:.9f},{disc:.9f},{val:.9f}\n")
    return {"checkpoint": out_dir, "rows": rows, "meta": meta}


def load_checkpoint(checkpoint_dir):
    """Rebuild the generator in eval mode from a checkpoint directory."""
    with open(os.path.join(checkpoint_dir, "config.json")) as fh:
        meta = json.load(fh)
    config = NetworkConfig(**meta["network"])
    generator = build_generator(config)
    state = torch.load(os.path.join(checkpoint_dir, "generator.pt"), weights_only=True)
    generator.load_state_dict(state)
    generator.eval()
    return generator, meta
