"""
Command line entry point for learning from partial annotations.

    python -m app.main synth --problem chain --seed 3 --out data/chain
    python -m app.main train --data data/chain_train.txt --fraction 0.3 --loss bridge --out results/w.csv
    python -m app.main eval --weights results/w.csv --data data/chain_test.txt
    python -m app.main sweep --config experiments.cfg --out results/sweep.csv
    python -m app.main compare-losses --fraction 0.3 --repeats 10 --out results/losses.csv
    python -m app.main lesion --loss hinge --fraction 1.0 --out results/lesion.csv

Exit codes: 0 on success, 1 if any experiment cell failed, 2 on a configuration error.
"""

import argparse
import logging
import os
import sys
from typing import Dict, List, Optional

import pandas as pd

from app.data.config_loaders.ConfigLoader import ConfigLoader
from app.data.dataset_io.DatasetLoader import DatasetLoader, write_dataset
from app.data.dataset_io.WeightsLoader import WeightsLoader, weights_frame
from app.exceptions import ConfigurationError
from app.experiments.annotation_sweep import run_annotation_sweep
from app.experiments.evaluation import evaluate_test_loss
from app.experiments.experiment_config import PROBLEMS, ExperimentConfig
from app.experiments.experiment_result import ExperimentResult
from app.experiments.lesion_study import run_lesion_study
from app.experiments.loss_comparison import run_loss_comparison
from app.experiments.results_writer import derived_path, write_results
from app.models.Solver.CCCPSolver import train_cccp, train_vanilla_cccp
from app.models.Solver.Perceptron import train_perceptron
from app.setup.annotation_sampler import dataset_truth, stratified_sample_annotations
from app.setup.dataset_initializer import synth_dataset

logger = logging.getLogger("app.main")

EXIT_OK = 0
EXIT_FAILED_CELLS = 1
EXIT_CONFIG_ERROR = 2

TRAINERS = {"cccp": train_cccp, "vanilla": train_vanilla_cccp, "perceptron": train_perceptron}

DEFAULT_OUTPUTS = {
    "synth": "data/synth",
    "train": "results/weights.csv",
    "eval": "results/eval.csv",
    "sweep": "results/sweep.csv",
    "compare-losses": "results/loss_comparison.csv",
    "lesion": "results/lesion.csv",
}

# flag attribute -> config key
_FLAG_KEYS = {
    "problem": "problem",
    "seed": "seed",
    "loss": "loss",
    "repeats": "repeats",
    "lam": "lam",
    "eta": "eta",
    "eps0": "eps0",
    "eps_min": "eps_min",
    "rho": "rho",
    "w0": "w0",
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="flat key = value settings file")
    common.add_argument("--seed", type=int, help="master seed")
    common.add_argument("--out", help="output path (a file stem for synth)")
    common.add_argument("--problem", choices=PROBLEMS)
    common.add_argument("--loss", help="hinge, ramp, max or bridge (optionally with a -delta suffix)")
    common.add_argument("--delta-in-reward", action="store_true", help="subtract the task loss inside the reward max")
    common.add_argument("--fraction", type=float, help="annotation fraction in (0, 1]")
    common.add_argument("--repeats", type=int)
    common.add_argument("--lambda", dest="lam", type=float, help="regularization weight")
    common.add_argument("--eta", type=float, help="outer termination threshold")
    common.add_argument("--eps0", type=float, help="initial inner precision")
    common.add_argument("--eps-min", dest="eps_min", type=float, help="final inner precision")
    common.add_argument("--rho", type=float, help="precision decay factor")
    common.add_argument("--w0", help="weights CSV the solvers start from")
    common.add_argument("--log-level", default="INFO", choices=["DEBUG", "INFO", "WARNING", "ERROR"])

    parser = argparse.ArgumentParser(prog="app.main", description="Structured learning from partial annotations")
    commands = parser.add_subparsers(dest="command", required=True)
    commands.add_parser("synth", parents=[common], help="generate train/test datasets and planted weights")
    train = commands.add_parser("train", parents=[common], help="train weights on a dataset")
    train.add_argument("--data", help="dataset file; synthesized from the seed when omitted")
    train.add_argument("--method", choices=sorted(TRAINERS), default="cccp")
    evaluate = commands.add_parser("eval", parents=[common], help="test loss of weights on a dataset")
    evaluate.add_argument("--weights", required=True)
    evaluate.add_argument("--data", required=True)
    commands.add_parser("sweep", parents=[common], help="test loss against annotation fraction")
    commands.add_parser("compare-losses", parents=[common], help="all losses on identical partial annotations")
    commands.add_parser("lesion", parents=[common], help="bounds recycling / adaptive precision lesion study")
    return parser


def load_config(args: argparse.Namespace) -> ExperimentConfig:
    """
    Settings file first, then command line flags on top.

    Raises:
        ConfigurationError: On unreadable files, unknown keys or invalid values.
    """
    mapping: Dict[str, str] = dict(ConfigLoader(args.config).get_config()) if args.config else {}
    for attribute, key in _FLAG_KEYS.items():
        value = getattr(args, attribute)
        if value is not None:
            mapping[key] = str(value)
    if args.delta_in_reward:
        mapping["delta_in_reward"] = "true"
    if args.fraction is not None:
        mapping["fraction"] = str(args.fraction)
        mapping["fractions"] = str(args.fraction)
    return ExperimentConfig.from_mapping(mapping)


def _ensure_directory(path: str) -> None:
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)


def run_synth(args: argparse.Namespace, config: ExperimentConfig) -> int:
    stem = os.path.splitext(args.out)[0]
    _ensure_directory(stem)
    train, test, planted = synth_dataset(config, config.seed)
    write_dataset(f"{stem}_train.txt", train)
    write_dataset(f"{stem}_test.txt", test)
    write_results(f"{stem}_planted.csv", weights_frame(planted), config.config_hash(), config.seed)
    return EXIT_OK


def run_train(args: argparse.Namespace, config: ExperimentConfig) -> int:
    if args.data:
        loader = DatasetLoader(args.data)
        if loader.problem != config.problem:
            logger.info(f"dataset problem '{loader.problem}' overrides configured '{config.problem}'")
        train = loader.get_dataset()
    else:
        train = synth_dataset(config, config.seed)[0]
    if args.fraction is not None:
        try:
            mask = stratified_sample_annotations(dataset_truth(train), args.fraction, config.seed)
            train = mask.apply(train)
        except ValueError as e:
            raise ConfigurationError(str(e)) from e
        logger.info(f"re-annotated {mask.count} components at fraction {args.fraction}")

    w, trace = TRAINERS[args.method](train, config.solver)
    if not trace.converged:
        logger.warning(f"{args.method} training stopped at an iteration cap")
    write_results(args.out, weights_frame(w), config.config_hash(), config.seed)
    write_results(derived_path(args.out, "_trace"), trace.to_frame(), config.config_hash(), config.seed)
    logger.info(f"final objective {trace.final.objective:.6g} after {trace.final.iter} iterations")
    return EXIT_OK


def run_eval(args: argparse.Namespace, config: ExperimentConfig) -> int:
    test = DatasetLoader(args.data).get_dataset()
    w = WeightsLoader(args.weights).get_weights()
    if len(w) != test.feature_dim:
        raise ConfigurationError(f"weights have dimension {len(w)}, dataset needs {test.feature_dim}")
    try:
        loss = evaluate_test_loss(w, test)
    except ValueError as e:
        raise ConfigurationError(str(e)) from e
    logger.info(f"test loss {loss:.4f}% on {len(test)} instances")
    frame = pd.DataFrame([{"instances": len(test), "test_loss_pct": loss}])
    write_results(args.out, frame, config.config_hash(), config.seed)
    return EXIT_OK


def _write_experiment(args: argparse.Namespace, config: ExperimentConfig, result: ExperimentResult) -> int:
    write_results(args.out, result.frame, config.config_hash(), config.seed)
    if result.summary is not None:
        write_results(derived_path(args.out, "_summary"), result.summary, config.config_hash(), config.seed)
    return EXIT_FAILED_CELLS if result.failed else EXIT_OK


COMMANDS = {
    "synth": run_synth,
    "train": run_train,
    "eval": run_eval,
    "sweep": lambda args, config: _write_experiment(args, config, run_annotation_sweep(config)),
    "compare-losses": lambda args, config: _write_experiment(args, config, run_loss_comparison(config)),
    "lesion": lambda args, config: _write_experiment(args, config, run_lesion_study(config)),
}


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=getattr(logging, args.log_level),
                        format="%(asctime)s %(levelname)s %(name)s: %(message)s")
    if args.out is None:
        args.out = DEFAULT_OUTPUTS[args.command]

    try:
        config = load_config(args)
        logger.info(f"{args.command}: problem={config.problem}, seed={config.seed}, "
                    f"config hash {config.config_hash()}")
        return COMMANDS[args.command](args, config)
    except ConfigurationError as e:
        logger.error(f"configuration error: {e}")
        return EXIT_CONFIG_ERROR


if __name__ == "__main__":
    sys.exit(main())
