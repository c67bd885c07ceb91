"""Configuration management for bandit conformal runs."""

import hashlib
import os
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Callable, Dict, List, Mapping, Optional

from dotenv import dotenv_values, load_dotenv

from banditcp.core.models import ScoreKind, ScoreSpec
from banditcp.data.records import DataSource, DataSpec
from banditcp.errors import ConfigError, InvalidInputError
from banditcp.policy.base_policy import PolicyKind, PolicySpec

# Load environment variables from .env file
load_dotenv()


@dataclass
class APIConfig:
    """Configuration for the API server."""

    host: str
    port: int


@dataclass
class Config:
    """Process-wide settings taken from the environment."""

    output_dir: str
    random_seed: int
    api: APIConfig
    log_level: str
    log_file: Optional[str] = None


def load_config() -> Config:
    """
    Load configuration from environment variables.

    Returns:
        Config: Complete configuration object
    """
    return Config(
        output_dir=os.getenv("OUTPUT_DIR", "runs"),
        random_seed=int(os.getenv("RANDOM_SEED", "42")),
        api=APIConfig(
            host=os.getenv("API_HOST", "0.0.0.0"),
            port=int(os.getenv("API_PORT", "8000")),
        ),
        log_level=os.getenv("LOG_LEVEL", "INFO"),
        log_file=os.getenv("LOG_FILE"),
    )


# Default configuration instance
config = load_config()


class Algorithm(str, Enum):
    """Online threshold algorithms."""

    ALG1 = "alg1"
    ALG2 = "alg2"


DEFAULT_ETA2_GRID = [0.1, 0.01, 0.001, 0.0001]
SCORE_LOG_AUTO_LIMIT = 10**6

# Keys that do not change what a run computes
HASH_EXCLUDED = {"out", "seed", "reps", "workers"}

POLICY_ALIASES = {
    "uniform": PolicyKind.UNIFORM,
    "softmax": PolicyKind.SOFTMAX,
    "bayes": PolicyKind.BAYES_ORACLE,
    "bayes_oracle": PolicyKind.BAYES_ORACLE,
    "label-oracle": PolicyKind.LABEL_ORACLE,
    "label_oracle": PolicyKind.LABEL_ORACLE,
}


@dataclass
class RunConfig:
    """
    Fully resolved settings of one run (or one replicate set).

    ``T`` counts stream instances and ``log_every`` counts batches.
    ``score_log=None`` turns true-class score logging on when ``T < 10**6``.
    """

    algorithm: Algorithm = Algorithm.ALG1
    alpha: float = 0.05
    eta1: float = 1e-4
    eta2: float = 0.01
    eta2_grid: List[float] = field(default_factory=lambda: list(DEFAULT_ETA2_GRID))
    score: ScoreSpec = field(default_factory=ScoreSpec)
    policy: PolicySpec = field(default_factory=PolicySpec)
    data: DataSpec = field(default_factory=DataSpec)
    hidden: int = 0
    optimizer: str = "sgd"
    T: int = 20000
    batch_size: int = 256
    replications: int = 5
    seed: int = field(default_factory=lambda: config.random_seed)
    out: str = field(default_factory=lambda: config.output_dir)
    log_every: int = 1
    score_log: Optional[bool] = None
    delta: float = 0.1
    trace: bool = False
    snapshot: bool = False
    event_log: bool = False
    label_audit: bool = False
    workers: int = 1

    def __post_init__(self):
        self.algorithm = Algorithm(self.algorithm)
        self.validate()

    @property
    def log_scores(self) -> bool:
        if self.score_log is None:
            return self.T < SCORE_LOG_AUTO_LIMIT
        return self.score_log

    @property
    def rates(self) -> List[float]:
        """Learning rates of the threshold trackers for this algorithm."""
        return [self.eta2] if self.algorithm == Algorithm.ALG1 else list(self.eta2_grid)

    def validate(self) -> None:
        """
        Check every constraint on the settings.

        Raises:
            ConfigError: Naming the first offending key
        """
        if not 0.0 < self.alpha < 1.0:
            raise ConfigError("alpha", f"must lie in (0, 1), got {self.alpha}")
        if self.eta1 < 0:
            raise ConfigError("eta1", f"must be >= 0, got {self.eta1}")
        if not self.eta2 > 0:
            raise ConfigError("eta2", f"must be > 0, got {self.eta2}")
        if not self.eta2_grid or any(not rate > 0 for rate in self.eta2_grid):
            raise ConfigError("eta2_grid", "must be a non-empty list of positive rates")
        if self.algorithm == Algorithm.ALG2 and len(self.eta2_grid) < 2:
            raise ConfigError("eta2_grid", "alg2 needs at least 2 experts")
        if self.hidden < 0:
            raise ConfigError("hidden", f"must be >= 0, got {self.hidden}")
        if self.optimizer != "sgd":
            raise ConfigError("optimizer", f"only 'sgd' is supported, got '{self.optimizer}'")
        if self.T < 1:
            raise ConfigError("T", f"must be >= 1, got {self.T}")
        if self.batch_size < 1:
            raise ConfigError("batch", f"must be >= 1, got {self.batch_size}")
        if self.replications < 1:
            raise ConfigError("reps", f"must be >= 1, got {self.replications}")
        if self.log_every < 1:
            raise ConfigError("log_every", f"must be >= 1, got {self.log_every}")
        if not 0.0 < self.delta < 1.0:
            raise ConfigError("delta", f"must lie in (0, 1), got {self.delta}")
        if self.workers < 1:
            raise ConfigError("workers", f"must be >= 1, got {self.workers}")
        if self.policy.floor >= 1.0:
            raise ConfigError("floor", f"must lie in [0, 1/K], got {self.policy.floor}")
        if (
            self.policy.kind == PolicyKind.BAYES_ORACLE
            and self.data.source != DataSource.GAUSSIAN_MIXTURE
        ):
            raise ConfigError("policy", "bayes_oracle needs the synthetic mixture data")

    def flat(self) -> Dict[str, Any]:
        """Canonical flat key/value view, the inverse of :func:`parse_config`."""
        return {
            "algorithm": self.algorithm.value,
            "alpha": self.alpha,
            "eta1": self.eta1,
            "eta2": self.eta2,
            "eta2_grid": list(self.eta2_grid),
            "score": self.score.kind.value,
            "lambda": self.score.lam,
            "kreg": self.score.k_reg,
            "policy": self.policy.kind.value,
            "floor": self.policy.floor,
            "data": self.data.describe() if self.data.source == DataSource.FILE else "gm",
            "gm_preset": self.data.preset,
            "features": self.data.n_features,
            "classes": self.data.n_classes,
            "header": self.data.header,
            "delimiter": self.data.delimiter,
            "shuffle": self.data.shuffle,
            "shuffle_buffer": self.data.shuffle_buffer,
            "hidden": self.hidden,
            "optimizer": self.optimizer,
            "T": self.T,
            "batch": self.batch_size,
            "reps": self.replications,
            "seed": self.seed,
            "out": self.out,
            "log_every": self.log_every,
            "score_log": self.score_log,
            "delta": self.delta,
            "trace": self.trace,
            "snapshot": self.snapshot,
            "event_log": self.event_log,
            "label_audit": self.label_audit,
            "workers": self.workers,
        }

    def render(self) -> str:
        """Sorted ``key=value`` text of :meth:`flat`."""
        return "\n".join(
            f"{key}={_render_value(value)}" for key, value in sorted(self.flat().items())
        )

    def config_hash(self) -> str:
        """Digest of every setting that can change a run's results."""
        canonical = "\n".join(
            f"{key}={_render_value(value)}"
            for key, value in sorted(self.flat().items())
            if key not in HASH_EXCLUDED
        )
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()

    def replace(self, **changes) -> "RunConfig":
        """Copy with flat-key changes applied, validated like a parsed file."""
        flat = self.flat()
        flat.update(changes)
        return _build(flat)


def _render_value(value) -> str:
    if value is None:
        return "auto"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, list):
        return ",".join(_render_value(v) for v in value)
    return str(value)


def _to_bool(value) -> bool:
    if isinstance(value, bool):
        return value
    text = str(value).strip().lower()
    if text in {"1", "true", "yes", "on"}:
        return True
    if text in {"0", "false", "no", "off"}:
        return False
    raise ValueError(f"expected a boolean, got '{value}'")


def _to_int(value) -> int:
    if isinstance(value, bool):
        raise ValueError("expected an integer")
    if isinstance(value, int):
        return value
    text = str(value).strip()
    try:
        return int(text)
    except ValueError:
        number = float(text)
        if number != int(number):
            raise
        return int(number)


def _to_grid(value) -> List[float]:
    if isinstance(value, (list, tuple)):
        return [float(v) for v in value]
    return [float(v) for v in str(value).split(",") if v.strip()]


def _to_optional_int(value) -> Optional[int]:
    if value is None or str(value).strip().lower() in {"", "auto", "none"}:
        return None
    return _to_int(value)


def _to_optional_bool(value) -> Optional[bool]:
    if value is None or str(value).strip().lower() == "auto":
        return None
    return _to_bool(value)


def _to_delimiter(value) -> Optional[str]:
    if value is None:
        return None
    text = str(value)
    if text.strip().lower() in {"", "whitespace", "space", "auto", "none"}:
        return None
    if text.strip().lower() in {"tab", "\\t"}:
        return "\t"
    return text


def _to_policy(value) -> str:
    text = str(getattr(value, "value", value)).strip().lower()
    if text not in POLICY_ALIASES:
        raise ValueError(f"unknown policy '{value}'")
    return POLICY_ALIASES[text].value


def _choice(*allowed: str) -> Callable[[Any], str]:
    def _coerce(value) -> str:
        text = str(getattr(value, "value", value)).strip().lower()
        if text not in allowed:
            raise ValueError(f"expected one of {list(allowed)}, got '{value}'")
        return text

    return _coerce


def _to_str(value) -> str:
    return str(value).strip()


COERCERS: Dict[str, Callable[[Any], Any]] = {
    "algorithm": _choice("alg1", "alg2"),
    "alpha": float,
    "eta1": float,
    "eta2": float,
    "eta2_grid": _to_grid,
    "score": _choice(*(kind.value for kind in ScoreKind)),
    "lambda": float,
    "kreg": _to_int,
    "policy": _to_policy,
    "floor": float,
    "data": _to_str,
    "gm_preset": _to_str,
    "features": _to_optional_int,
    "classes": _to_optional_int,
    "header": _to_bool,
    "delimiter": _to_delimiter,
    "shuffle": _to_bool,
    "shuffle_buffer": _to_int,
    "hidden": _to_int,
    "optimizer": _to_str,
    "T": _to_int,
    "batch": _to_int,
    "reps": _to_int,
    "seed": _to_int,
    "out": _to_str,
    "log_every": _to_int,
    "score_log": _to_optional_bool,
    "delta": float,
    "trace": _to_bool,
    "snapshot": _to_bool,
    "event_log": _to_bool,
    "label_audit": _to_bool,
    "workers": _to_int,
}


def normalize_key(key: str) -> str:
    """Map flag or file spellings (``eta2-grid``, ``t``) to canonical keys."""
    key = key.strip().lstrip("-").replace("-", "_")
    if key.lower() == "t":
        return "T"
    if key == "batch_size":
        return "batch"
    if key in {"replications", "reps"}:
        return "reps"
    return key.lower()


def _coerce_all(raw: Mapping[str, Any]) -> Dict[str, Any]:
    values: Dict[str, Any] = {}
    for key, value in raw.items():
        canonical = normalize_key(key)
        if canonical not in COERCERS:
            raise ConfigError(canonical, "unknown key")
        try:
            values[canonical] = COERCERS[canonical](value)
        except (TypeError, ValueError) as e:
            raise ConfigError(canonical, f"invalid value '{value}': {e}")
    return values


def _build(flat: Mapping[str, Any]) -> RunConfig:
    values = _coerce_all(flat)
    data_value = values.get("data", "gm")
    if data_value == "gm":
        source, path = DataSource.GAUSSIAN_MIXTURE, None
    elif data_value.startswith("file:") and len(data_value) > len("file:"):
        source, path = DataSource.FILE, data_value[len("file:") :]
    else:
        raise ConfigError("data", f"expected 'gm' or 'file:PATH', got '{data_value}'")

    # Component constructors raise InvalidInputError; report the key behind it
    try:
        score = ScoreSpec(
            kind=ScoreKind(values.get("score", ScoreKind.RAPS.value)),
            lam=values.get("lambda", 0.01),
            k_reg=values.get("kreg", 1),
        )
    except InvalidInputError as e:
        raise ConfigError("lambda" if "lambda" in str(e) else "kreg", str(e))
    try:
        policy = PolicySpec(
            kind=PolicyKind(values.get("policy", PolicyKind.SOFTMAX.value)),
            floor=values.get("floor", 0.0),
        )
    except InvalidInputError as e:
        raise ConfigError("floor", str(e))
    try:
        data = DataSpec(
            source=source,
            preset=values.get("gm_preset", "separated3"),
            path=path,
            n_features=values.get("features"),
            n_classes=values.get("classes"),
            header=values.get("header", False),
            delimiter=values.get("delimiter", ","),
            shuffle=values.get("shuffle", True),
            shuffle_buffer=values.get("shuffle_buffer", 0),
        )
    except InvalidInputError as e:
        raise ConfigError("data", str(e))

    kwargs = {
        "algorithm": values.get("algorithm", Algorithm.ALG1.value),
        "alpha": values.get("alpha", 0.05),
        "eta1": values.get("eta1", 1e-4),
        "eta2": values.get("eta2", 0.01),
        "eta2_grid": values.get("eta2_grid", list(DEFAULT_ETA2_GRID)),
        "score": score,
        "policy": policy,
        "data": data,
        "hidden": values.get("hidden", 0),
        "optimizer": values.get("optimizer", "sgd"),
        "T": values.get("T", 20000),
        "batch_size": values.get("batch", 256),
        "replications": values.get("reps", 5),
        "log_every": values.get("log_every", 1),
        "score_log": values.get("score_log"),
        "delta": values.get("delta", 0.1),
        "trace": values.get("trace", False),
        "snapshot": values.get("snapshot", False),
        "event_log": values.get("event_log", False),
        "label_audit": values.get("label_audit", False),
        "workers": values.get("workers", 1),
    }
    if "seed" in values:
        kwargs["seed"] = values["seed"]
    if "out" in values:
        kwargs["out"] = values["out"]
    return RunConfig(**kwargs)


def parse_config(
    path: Optional[str] = None, overrides: Optional[Mapping[str, Any]] = None
) -> RunConfig:
    """
    Resolve a run configuration from a key=value file plus overrides.

    The file is read with python-dotenv, so ``#`` comments and quoting work
    as in a ``.env`` file. Keys may use ``-`` or ``_``. Overrides (typically
    command-line flags) win over file values; ``None`` overrides are ignored.

    Args:
        path: Optional configuration file
        overrides: Optional key/value overrides

    Returns:
        The validated configuration with defaults applied

    Raises:
        ConfigError: On a missing file, unknown key, bad value or violated
            constraint, naming the offending key
    """
    raw: Dict[str, Any] = {}
    if path is not None:
        if not os.path.exists(path):
            raise ConfigError("config", f"file not found: {path}")
        for key, value in dotenv_values(path).items():
            if value is None:
                raise ConfigError(normalize_key(key), "missing value")
            raw[normalize_key(key)] = value
    for key, value in (overrides or {}).items():
        if value is not None:
            raw[normalize_key(key)] = value
    return _build(raw)
