import logging
from dataclasses import dataclass, replace
from typing import TYPE_CHECKING, Tuple

import numpy as np

from app.exceptions import ConfigurationError
from app.globals import *
from app.models.Chain.ChainInstance import ChainInstance
from app.models.Core.Dataset import Dataset
from app.models.Tracking.TrackingGenerator import TrackingGenConfig, generate_instance, planted_tracking_weights

if TYPE_CHECKING:
    from app.experiments.experiment_config import ExperimentConfig

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ChainGenConfig:
    """
    Parameters of the synthetic chain generator.

    Labels follow a sticky Markov chain; each observation is the prototype of its label
    plus isotropic Gaussian noise.
    """
    length: int = CHAIN_LENGTH
    label_count: int = CHAIN_LABELS
    obs_dim: int = CHAIN_OBS_DIM
    noise: float = CHAIN_NOISE
    signal: float = CHAIN_SIGNAL
    stickiness: float = CHAIN_STICKINESS
    delta_scale: float = DEFAULT_DELTA_SCALE

    def __post_init__(self):
        if self.length < 1 or self.label_count < 2 or self.obs_dim < 1:
            raise ConfigurationError(f"need L >= 1, K >= 2, F >= 1, got L={self.length}, "
                                     f"K={self.label_count}, F={self.obs_dim}")
        if self.noise < 0 or not self.signal > 0:
            raise ConfigurationError("noise must be nonnegative and signal positive")
        if not 0.0 <= self.stickiness <= 1.0:
            raise ConfigurationError(f"stickiness must be a probability, got: {self.stickiness}")


class ChainInitializer:
    """
    Draws label prototypes once and generates fully annotated chains from them.

    Attributes:
        config (ChainGenConfig): Generator parameters.
        prototypes (np.ndarray): K x F label prototypes, rows of norm `signal`.
    """

    def __init__(self, config: ChainGenConfig, prototypes: np.ndarray):
        prototypes = np.asarray(prototypes, dtype=float)
        if prototypes.shape != (config.label_count, config.obs_dim):
            raise ValueError(f"prototypes must be {config.label_count} x {config.obs_dim}, got {prototypes.shape}")
        self.config = config
        self.prototypes = prototypes

    @classmethod
    def from_rng(cls, config: ChainGenConfig, rng: np.random.Generator) -> "ChainInitializer":
        raw = rng.normal(size=(config.label_count, config.obs_dim))
        norms = np.linalg.norm(raw, axis=1, keepdims=True)
        return cls(config, config.signal * raw / np.maximum(norms, 1e-12))

    def unary_margin(self) -> float:
        """Smallest gap between a prototype's own score and any other label's score on it."""
        gram = self.prototypes @ self.prototypes.T
        own = np.diag(gram)[:, np.newaxis]
        gaps = own - gram
        np.fill_diagonal(gaps, np.inf)
        return float(np.min(gaps))

    def planted_weights(self) -> np.ndarray:
        """
        Unary block = prototypes, transition block = tau on the diagonal with tau a quarter of
        the unary margin, so noiseless chains are decoded exactly.
        """
        k = self.config.label_count
        tau = 0.25 * max(self.unary_margin(), 0.0)
        return np.concatenate([self.prototypes.ravel(), (tau * np.eye(k)).ravel()])

    def shifted(self, shift: float, rng: np.random.Generator) -> "ChainInitializer":
        """Copy with perturbed prototypes and inflated noise (train/test domain shift)."""
        perturbation = rng.normal(size=self.prototypes.shape) / np.sqrt(self.config.obs_dim)
        return ChainInitializer(replace(self.config, noise=self.config.noise * (1.0 + shift)),
                                self.prototypes + shift * self.config.signal * perturbation)

    def sample_labels(self, rng: np.random.Generator) -> np.ndarray:
        k = self.config.label_count
        labels = np.empty(self.config.length, dtype=int)
        labels[0] = rng.integers(k)
        for i in range(1, self.config.length):
            labels[i] = labels[i - 1] if rng.uniform() < self.config.stickiness else rng.integers(k)
        return labels

    def create_instance(self, rng: np.random.Generator) -> ChainInstance:
        labels = self.sample_labels(rng)
        noise = rng.normal(size=(self.config.length, self.config.obs_dim))
        observations = self.prototypes[labels] + self.config.noise * noise
        return ChainInstance(observations, self.config.label_count, labels.tolist(), self.config.delta_scale)

    def create_dataset(self, size: int, rng: np.random.Generator) -> Dataset:
        return Dataset([self.create_instance(rng) for _ in range(size)])


def _tracking_dataset(gen_config: TrackingGenConfig, size: int, seed_seq: np.random.SeedSequence) -> Dataset:
    return Dataset([generate_instance(gen_config, child)[0] for child in seed_seq.spawn(size)])


def synth_dataset(config: "ExperimentConfig", seed: int) -> Tuple[Dataset, Dataset, np.ndarray]:
    """
    Generate fully annotated train and test sets from a planted model.

    The test set comes from a perturbed generator (shifted prototypes for chains, extra
    motion noise for tracking) to mimic training and test data from different experiments.

    Args:
        config: Experiment configuration (problem kind, sizes, generator parameters).
        seed: Master seed; equal seeds give identical datasets.
    Returns:
        (train, test, planted weights)
    """
    train_seq, test_seq, prototype_seq, shift_seq = np.random.SeedSequence(seed).spawn(4)
    shift = config.domain_shift

    if config.problem == "chain":
        initializer = ChainInitializer.from_rng(config.chain, np.random.default_rng(prototype_seq))
        train = initializer.create_dataset(config.train_size, np.random.default_rng(train_seq))
        test_initializer = initializer.shifted(shift, np.random.default_rng(shift_seq))
        test = test_initializer.create_dataset(config.test_size, np.random.default_rng(test_seq))
        planted = initializer.planted_weights()
    elif config.problem == "tracking":
        test_config = replace(config.tracking, motion_noise=config.tracking.motion_noise * (1.0 + shift))
        train = _tracking_dataset(config.tracking, config.train_size, train_seq)
        test = _tracking_dataset(test_config, config.test_size, test_seq)
        planted = planted_tracking_weights()
    else:
        raise ConfigurationError(f"unknown problem '{config.problem}'")

    logger.info(f"synthesized {len(train)} train / {len(test)} test {config.problem} instances (seed {seed})")
    return train, test, planted
