"""Feature extraction pipeline and the on-disk feature-file format."""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .config import PipelineConfig
from .finger_motion import finger_features
from .global_motion import dad_config_for_sequence, global_features
from .hand_model import DEFAULT_TEMPLATE, HandTemplate, reference_palm
from .skeleton import (
    DEFAULT_LAYOUT,
    JointLayout,
    SkeletonSequence,
    normalize_skeleton_branch,
    validate_sequence,
)

FEATURE_MAGIC = "GESTREC-FEAT 1"
FEATURE_KINDS = ("global", "finger", "skeleton")


class FeatureError(Exception):
    pass


def extract_features(seq: SkeletonSequence, config: PipelineConfig = PipelineConfig(),
                     layout: JointLayout = DEFAULT_LAYOUT,
                     template: HandTemplate = DEFAULT_TEMPLATE,
                     kinds: tuple[str, ...] = FEATURE_KINDS) -> dict[str, np.ndarray]:
    """All requested per-frame feature streams for one validated sequence."""
    validate_sequence(seq, layout)
    streams = {}
    if "global" in kinds:
        dad = dad_config_for_sequence(seq, layout, config.dad_bins, config.sigma_scale)
        streams["global"] = global_features(
            seq, layout, reference_palm(template), dad, config.lags, config.euler_convention)
    if "finger" in kinds:
        streams["finger"] = finger_features(seq, layout, template, config.lags)
    if "skeleton" in kinds:
        streams["skeleton"] = normalize_skeleton_branch(seq, layout)
    return streams


def feature_filename(gesture: int, finger: int, subject: int, trial: int, kind: str) -> str:
    return f"g{gesture:02d}_f{finger:02d}_s{subject:02d}_t{trial:02d}_{kind}.feat"


def write_feature_file(path: str | Path, kind: str, array: np.ndarray,
                       gesture: int, finger: int, subject: int, trial: int) -> None:
    """Self-describing header + frame-major float64 LE payload."""
    array = np.asarray(array, dtype=np.float64)
    header = {
        "kind": kind,
        "dims": int(array.shape[1]),
        "frames": int(array.shape[0]),
        "gesture": gesture,
        "finger": finger,
        "subject": subject,
        "trial": trial,
    }
    with open(path, "wb") as fh:
        fh.write(f"{FEATURE_MAGIC}\n".encode())
        fh.write((json.dumps(header, sort_keys=True) + "\n").encode())
        fh.write(b"BINARY\n")
        fh.write(np.ascontiguousarray(array, dtype="<f8").tobytes())


def read_feature_file(path: str | Path):
    """Returns (metadata dict, (frames, dims) float64 array)."""
    with open(path, "rb") as fh:
        magic = fh.readline().decode().rstrip("\n")
        if magic != FEATURE_MAGIC:
            raise FeatureError(f"{path}: bad magic line {magic!r}")
        header = json.loads(fh.readline().decode())
        if fh.readline() != b"BINARY\n":
            raise FeatureError(f"{path}: missing BINARY marker")
        payload = fh.read()
    expected = 8 * header["frames"] * header["dims"]
    if len(payload) != expected:
        raise FeatureError(f"{path}: payload is {len(payload)} bytes, expected {expected}")
    array = np.frombuffer(payload, dtype="<f8").reshape(header["frames"], header["dims"]).copy()
    return header, array


def load_feature_dir(directory: str | Path, kinds: tuple[str, ...] = FEATURE_KINDS):
    """Group feature files by sequence.

    Returns a list of (meta, streams) sorted by (gesture, finger, subject,
    trial); every requested kind must be present for every sequence.
    """
    directory = Path(directory)
    groups: dict[tuple, dict] = {}
    for path in sorted(directory.glob("*.feat")):
        header, array = read_feature_file(path)
        key = (header["gesture"], header["finger"], header["subject"], header["trial"])
        groups.setdefault(key, {})[header["kind"]] = array
    if not groups:
        raise FeatureError(f"no .feat files under {directory}")
    out = []
    for key in sorted(groups):
        streams = groups[key]
        missing = [k for k in kinds if k not in streams]
        if missing:
            raise FeatureError(f"sequence {key}: missing feature kind(s) {missing}")
        lengths = {k: streams[k].shape[0] for k in kinds}
        if len(set(lengths.values())) != 1:
            raise FeatureError(f"sequence {key}: inconsistent frame counts {lengths}")
        meta = dict(zip(("gesture", "finger", "subject", "trial"), key))
        out.append((meta, {k: streams[k] for k in kinds}))
    return out
