import hashlib
import json
import logging
from dataclasses import dataclass, field, fields, replace
from typing import Any, Dict, Mapping, Tuple

from app.data.dataset_io.WeightsLoader import WeightsLoader
from app.exceptions import ConfigurationError
from app.globals import *
from app.models.Core.GenericLoss import GenericLossSpec
from app.models.Solver.CCCPSolver import SolverConfig
from app.models.Tracking.TrackingGenerator import TrackingGenConfig
from app.setup.dataset_initializer import ChainGenConfig

logger = logging.getLogger(__name__)

PROBLEMS = ("chain", "tracking")
COMPARED_LOSSES = ("hinge", "ramp", "max", "bridge", "ramp-delta", "max-delta")

# Flat keys addressing SolverConfig fields
_SOLVER_KEYS = ("lam", "eta", "eps0", "eps_min", "rho", "max_cccp_iters", "max_inner_iters",
                "max_perceptron_passes", "patience")
_ALIASES = {"lambda": "lam", "eps-min": "eps_min", "delta-in-reward": "delta_in_reward"}


def _parse_bool(text: str) -> bool:
    value = text.strip().lower()
    if value in ("1", "true", "yes", "on"):
        return True
    if value in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: '{text}'")


def _convert(text: str, default: Any) -> Any:
    """Parse text into the type of the default value."""
    if isinstance(default, bool):
        return _parse_bool(text)
    if isinstance(default, int):
        return int(text)
    if isinstance(default, float):
        return float(text)
    if isinstance(default, tuple):
        return tuple(float(part) for part in text.split(",") if part.strip())
    return text.strip()


def _override(instance, prefix: str, mapping: Dict[str, str]):
    """Copy of a generator dataclass with every `<prefix><field>` key of mapping applied."""
    changes = {}
    for f in fields(instance):
        key = prefix + f.name
        if key in mapping:
            changes[f.name] = _convert(mapping.pop(key), getattr(instance, f.name))
    return replace(instance, **changes) if changes else instance


@dataclass
class ExperimentConfig:
    """
    Everything an experiment run depends on.

    Attributes:
        problem: 'chain' or 'tracking'.
        train_size: Number of training instances N.
        test_size: Number of test instances M.
        fractions: Annotation fractions of the sweep.
        fraction: Annotation fraction of train, compare-losses and lesion runs.
        repeats: Independent stratified samples per fraction.
        losses: Loss labels compared by compare-losses.
        seed: Master seed; each cell derives its own stream from (seed, cell index).
        domain_shift: Strength of the train/test generator perturbation.
        delta_scale: Task loss per violated component, shared by data and losses.
        solver: Solver parameters; solver.loss is the partial-annotation loss of train, sweep and lesion.
        w0_path: Weights CSV the solver starts from (settings key `w0`); empty for zeros.
        chain: Chain generator parameters.
        tracking: Tracking generator parameters.
    """
    problem: str = "chain"
    train_size: int = DEFAULT_TRAIN_SIZE
    test_size: int = DEFAULT_TEST_SIZE
    fractions: Tuple[float, ...] = DEFAULT_FRACTIONS
    fraction: float = DEFAULT_FRACTION
    repeats: int = DEFAULT_REPEATS
    losses: Tuple[str, ...] = COMPARED_LOSSES
    seed: int = DEFAULT_SEED
    domain_shift: float = DEFAULT_DOMAIN_SHIFT
    delta_scale: float = DEFAULT_DELTA_SCALE
    solver: SolverConfig = field(default_factory=SolverConfig)
    w0_path: str = ""
    chain: ChainGenConfig = field(default_factory=ChainGenConfig)
    tracking: TrackingGenConfig = field(default_factory=TrackingGenConfig)

    def __post_init__(self):
        self.fractions = tuple(float(f) for f in self.fractions)
        self.losses = tuple(self.losses)
        # one delta_scale for data, losses and generators
        self.solver = replace(self.solver, loss=replace(self.solver.loss, delta_scale=self.delta_scale))
        self.chain = replace(self.chain, delta_scale=self.delta_scale)
        self.tracking = replace(self.tracking, delta_scale=self.delta_scale)
        self.validate()

    def validate(self) -> None:
        """
        Raises:
            ConfigurationError: If any field is out of range.
        """
        if self.problem not in PROBLEMS:
            raise ConfigurationError(f"problem must be one of {PROBLEMS}, got: '{self.problem}'")
        if self.train_size < 1 or self.test_size < 1:
            raise ConfigurationError("train_size and test_size must be positive")
        if not self.fractions:
            raise ConfigurationError("at least one annotation fraction is needed")
        for f in self.fractions + (self.fraction,):
            if not 0.0 < f <= 1.0:
                raise ConfigurationError(f"annotation fractions must lie in (0, 1], got: {f}")
        if not isinstance(self.repeats, int) or self.repeats < 1:
            raise ConfigurationError(f"repeats must be at least 1, got: {self.repeats}")
        if self.seed < 0:
            raise ConfigurationError(f"seed must be nonnegative, got: {self.seed}")
        if self.domain_shift < 0:
            raise ConfigurationError(f"domain_shift must be nonnegative, got: {self.domain_shift}")
        if not self.delta_scale > 0:
            raise ConfigurationError(f"delta_scale must be positive, got: {self.delta_scale}")
        for label in self.losses:
            self.loss_spec(label)
        self.solver.validate()

    def loss_spec(self, label: str) -> GenericLossSpec:
        try:
            return GenericLossSpec.parse(label, delta_scale=self.delta_scale)
        except ValueError as e:
            raise ConfigurationError(str(e)) from e

    def solver_for(self, spec: GenericLossSpec) -> SolverConfig:
        return replace(self.solver, loss=spec)

    @classmethod
    def from_mapping(cls, mapping: Mapping[str, str]) -> "ExperimentConfig":
        """
        Build a config from flat `key = value` settings.

        Keys are field names; SolverConfig fields are top level (`lambda` is accepted for
        `lam`), `w0` names a weights CSV, `loss` and `delta_in_reward` select solver.loss, and
        generator fields take the prefixes `chain_` and `track_`. Lists are comma separated.

        Raises:
            ConfigurationError: On unknown keys or unparsable values.
        """
        remaining = {_ALIASES.get(k, k).replace("-", "_"): str(v) for k, v in mapping.items()}
        try:
            base = cls()
            top = {}
            for name in ("problem", "train_size", "test_size", "fraction", "repeats", "seed",
                         "domain_shift", "delta_scale"):
                if name in remaining:
                    top[name] = _convert(remaining.pop(name), getattr(base, name))
            if "fractions" in remaining:
                top["fractions"] = _convert(remaining.pop("fractions"), base.fractions)
            if "losses" in remaining:
                top["losses"] = tuple(p.strip() for p in remaining.pop("losses").split(",") if p.strip())

            solver_changes = {}
            for name in _SOLVER_KEYS:
                if name in remaining:
                    solver_changes[name] = _convert(remaining.pop(name), getattr(base.solver, name))
            w0_path = remaining.pop("w0", "").strip()
            if w0_path:
                solver_changes["w0"] = WeightsLoader(w0_path).get_weights()
            loss_label = remaining.pop("loss", base.solver.loss.label)
            delta_in_reward = _parse_bool(remaining.pop("delta_in_reward", "false"))
            loss = GenericLossSpec.parse(loss_label, delta_in_reward=delta_in_reward)

            chain = _override(base.chain, "chain_", remaining)
            tracking = _override(base.tracking, "track_", remaining)
        except (TypeError, ValueError) as e:
            if isinstance(e, ConfigurationError):
                raise
            raise ConfigurationError(f"invalid setting: {e}") from e

        if remaining:
            raise ConfigurationError(f"unknown settings: {sorted(remaining)}")
        try:
            solver = SolverConfig(loss=loss, **solver_changes)
        except TypeError as e:
            raise ConfigurationError(str(e)) from e
        return cls(solver=solver, w0_path=w0_path, chain=chain, tracking=tracking, **top)

    def to_mapping(self) -> Dict[str, str]:
        """Flat string view of every setting, used for the config hash."""
        def text(value) -> str:
            return ",".join(str(v) for v in value) if isinstance(value, tuple) else str(value)

        flat: Dict[str, str] = {}
        for name in ("problem", "train_size", "test_size", "fractions", "fraction", "repeats", "losses",
                     "seed", "domain_shift", "delta_scale"):
            flat[name] = text(getattr(self, name))
        for name in _SOLVER_KEYS:
            flat[name] = str(getattr(self.solver, name))
        flat["loss"] = self.solver.loss.label
        flat["w0"] = self.w0_path
        for prefix, generator in (("chain_", self.chain), ("track_", self.tracking)):
            for f in fields(generator):
                flat[prefix + f.name] = text(getattr(generator, f.name))
        return flat

    def config_hash(self) -> str:
        flat = self.to_mapping()
        if self.solver.w0 is not None:
            # starting weights hash by value, not by path
            flat["w0"] = ",".join(repr(float(x)) for x in self.solver.w0)
        canonical = json.dumps(flat, sort_keys=True)
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()[:16]
