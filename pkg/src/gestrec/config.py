"""Pipeline configuration: every tunable default, overridable from a plain
`key = value` text file."""

from __future__ import annotations

from dataclasses import dataclass, fields, replace
from pathlib import Path


class ConfigError(Exception):
    pass


@dataclass(frozen=True)
class PipelineConfig:
    # feature extraction
    dad_bins: int = 5
    sigma_scale: float = 1.5
    lags: tuple[int, ...] = (1, 5, 10)
    euler_convention: str = "xyz"
    # network architecture
    branches: tuple[str, ...] = ("global", "finger", "skeleton")
    lstm_hidden: int = 100
    fc_out: int = 128
    head: tuple[int, ...] = (256, 128)
    dropout: float = 0.3
    bidirectional: bool = True
    # optimization
    learning_rate: float = 0.001
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8
    batch_size: int = 32
    epochs: int = 100
    clip_norm: float = 5.0
    stop_accuracy: float = 0.0
    # evaluation
    fine_gestures: tuple[int, ...] = (1, 3, 4, 5, 6)

    def __post_init__(self):
        if not 0.0 <= self.dropout < 1.0:
            raise ConfigError(f"dropout must be in [0, 1): {self.dropout}")
        if self.euler_convention not in ("xyz", "zyx"):
            raise ConfigError(f"euler_convention must be xyz or zyx: {self.euler_convention}")
        for name in self.branches:
            if name not in ("global", "finger", "skeleton"):
                raise ConfigError(f"unknown branch: {name}")
        if not self.branches:
            raise ConfigError("at least one branch required")

    @property
    def global_dim(self) -> int:
        return 12 + 6 * len(self.lags)

    @property
    def finger_dim(self) -> int:
        return 40 + 20 * len(self.lags)


_INT_TUPLES = {"lags", "head", "fine_gestures"}
_STR_TUPLES = {"branches"}
_BOOLS = {"bidirectional"}


def _parse_value(name: str, text: str, target_type: type):
    if name in _INT_TUPLES:
        return tuple(int(x) for x in text.replace(",", " ").split())
    if name in _STR_TUPLES:
        return tuple(x.strip() for x in text.split(",") if x.strip())
    if name in _BOOLS:
        lowered = text.lower()
        if lowered in ("true", "1", "yes"):
            return True
        if lowered in ("false", "0", "no"):
            return False
        raise ConfigError(f"{name}: expected a boolean, got {text!r}")
    return target_type(text)


def load_config(path: str | Path | None,
                base: PipelineConfig | None = None) -> PipelineConfig:
    """Apply `key = value` overrides from a text file to the defaults."""
    config = base or PipelineConfig()
    if path is None:
        return config
    known = {f.name: f.type for f in fields(PipelineConfig)}
    typed = {f.name: type(getattr(config, f.name)) for f in fields(PipelineConfig)}
    overrides = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in known:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        try:
            overrides[key] = _parse_value(key, value, typed[key])
        except (ValueError, TypeError) as e:
            raise ConfigError(f"{path}:{lineno}: {e}") from e
    return replace(config, **overrides)
