import logging
from typing import Dict, List, Optional, Sequence

import numpy as np

from app.exceptions import DatasetFormatError
from app.globals import VERSION
from app.interfaces.inference_problem import InferenceProblem
from app.models.Chain.ChainInstance import ChainInstance
from app.models.Core.Dataset import Dataset
from app.models.Tracking.Event import Detection, Event
from app.models.Tracking.TrackingInstance import TrackingInstance

logger = logging.getLogger(__name__)

PROBLEM_KINDS = ("chain", "tracking")


def format_float(value: float) -> str:
    """17 significant digits, enough for an exact float round trip."""
    return format(float(value), ".17g")


def _fields(tokens: Sequence[str], line_no: int) -> Dict[str, str]:
    fields = {}
    for token in tokens:
        key, sep, value = token.partition("=")
        if not sep:
            raise DatasetFormatError(f"line {line_no}: expected key=value, got '{token}'")
        fields[key] = value
    return fields


def _split(text: str, sep: str) -> List[str]:
    return [part for part in text.split(sep) if part != ""]


class DatasetLoader:
    """
    DatasetLoader reads a line-delimited dataset file: one header line, then one instance per line.

        # problem=chain dim=40 delta_scale=1 version=1.0.0
        chain L=2 K=2 F=3 obs=0.1,0.2,0.3,0.4,0.5,0.6 labels=0,-1
        tracking left=1:2:1.5;... right=... events=M:0:0;X:0;A:0 annotated=0 truth=2

    Attributes:
        problem (str): 'chain' or 'tracking', from the header.
        feature_dim (int): Feature dimension declared in the header.
        delta_scale (float): Task loss scale declared in the header.
        dataset (Dataset): The parsed instances.
    """

    def __init__(self, filepath: str):
        self.filepath = filepath
        self.problem: Optional[str] = None
        self.feature_dim: Optional[int] = None
        self.delta_scale: Optional[float] = None
        self.dataset = self.load_dataset(filepath)

    def load_dataset(self, filepath: str) -> Dataset:
        """
        Raises:
            DatasetFormatError: If the file is missing or any line is malformed.
        """
        try:
            with open(filepath, "r", encoding="utf-8") as handle:
                lines = [line.rstrip("\n") for line in handle]
        except OSError as e:
            raise DatasetFormatError(f"DatasetLoader failed to read {filepath}: {e}") from e

        lines = [line for line in lines if line.strip()]
        if not lines or not lines[0].startswith("#"):
            raise DatasetFormatError(f"{filepath}: missing '# problem=... dim=... delta_scale=...' header")
        self._parse_header(lines[0])

        instances: List[InferenceProblem] = []
        for line_no, line in enumerate(lines[1:], start=2):
            if line.startswith("#"):
                continue
            try:
                instances.append(self._parse_instance(line, line_no))
            except DatasetFormatError:
                raise
            except (KeyError, ValueError, TypeError) as e:
                raise DatasetFormatError(f"{filepath} line {line_no}: {e}") from e

        if not instances:
            raise DatasetFormatError(f"{filepath}: no instances")
        dataset = Dataset(instances)
        if dataset.feature_dim != self.feature_dim:
            raise DatasetFormatError(f"{filepath}: header declares dim={self.feature_dim}, "
                                     f"instances have {dataset.feature_dim}")
        logger.info(f"loaded {len(dataset)} {self.problem} instances from {filepath}")
        return dataset

    def _parse_header(self, line: str) -> None:
        fields = _fields(line.lstrip("#").split(), 1)
        try:
            self.problem = fields["problem"]
            self.feature_dim = int(fields["dim"])
            self.delta_scale = float(fields["delta_scale"])
        except (KeyError, ValueError) as e:
            raise DatasetFormatError(f"bad header '{line}': {e}") from e
        if self.problem not in PROBLEM_KINDS:
            raise DatasetFormatError(f"unknown problem kind '{self.problem}'")
        if fields.get("version", VERSION) != VERSION:
            logger.warning(f"dataset written by version {fields['version']}, reading with {VERSION}")

    def _parse_instance(self, line: str, line_no: int) -> InferenceProblem:
        kind, *tokens = line.split()
        if kind != self.problem:
            raise DatasetFormatError(f"line {line_no}: '{kind}' record in a {self.problem} dataset")
        fields = _fields(tokens, line_no)
        if kind == "chain":
            length, labels_k, obs_dim = int(fields["L"]), int(fields["K"]), int(fields["F"])
            obs = np.array([float(x) for x in _split(fields["obs"], ",")]).reshape(length, obs_dim)
            labels = [int(x) for x in _split(fields["labels"], ",")]
            return ChainInstance(obs, labels_k, labels, self.delta_scale)

        left = [self._parse_detection(text, f"L{i}") for i, text in enumerate(_split(fields["left"], ";"))]
        right = [self._parse_detection(text, f"R{i}") for i, text in enumerate(_split(fields["right"], ";"))]
        events = [Event.decode(text) for text in _split(fields["events"], ";")]
        annotated = [int(x) for x in _split(fields.get("annotated", ""), ",")]
        truth_size = int(fields["truth"]) if "truth" in fields else None
        return TrackingInstance(left, right, events, annotated, self.delta_scale, truth_size=truth_size)

    @staticmethod
    def _parse_detection(text: str, detection_id: str) -> Detection:
        x, y, size = (float(v) for v in text.split(":"))
        return Detection(detection_id, x, y, size)

    def get_dataset(self) -> Dataset:
        return self.dataset


def problem_kind(dataset: Dataset) -> str:
    first = dataset[0]
    if isinstance(first, ChainInstance):
        return "chain"
    if isinstance(first, TrackingInstance):
        return "tracking"
    raise TypeError(f"cannot serialize {type(first).__name__}")


def encode_instance(instance: InferenceProblem) -> str:
    if isinstance(instance, ChainInstance):
        obs = ",".join(format_float(x) for x in instance.observations.ravel())
        labels = ",".join(str(v) for v in instance.partial_labels)
        return (f"chain L={instance.length} K={instance.label_count} F={instance.obs_dim} "
                f"obs={obs} labels={labels}")
    if isinstance(instance, TrackingInstance):
        def detections(items):
            return ";".join(":".join(format_float(v) for v in (d.x, d.y, d.size)) for d in items)
        events = ";".join(e.encode() for e in instance.events)
        annotated = ",".join(str(i) for i in instance.annotated)
        return (f"tracking left={detections(instance.left)} right={detections(instance.right)} "
                f"events={events} annotated={annotated} truth={instance.truth_size}")
    raise TypeError(f"cannot serialize {type(instance).__name__}")


def write_dataset(filepath: str, dataset: Dataset) -> None:
    """Write a dataset in the format DatasetLoader reads; instances must share delta_scale."""
    scales = {instance.delta_scale for instance in dataset}
    if len(scales) != 1:
        raise ValueError(f"instances disagree on delta_scale: {sorted(scales)}")
    header = (f"# problem={problem_kind(dataset)} dim={dataset.feature_dim} "
              f"delta_scale={format_float(scales.pop())} version={VERSION}")
    with open(filepath, "w", encoding="utf-8") as handle:
        handle.write(header + "\n")
        for instance in dataset:
            handle.write(encode_instance(instance) + "\n")
    logger.info(f"wrote {len(dataset)} instances to {filepath}")
