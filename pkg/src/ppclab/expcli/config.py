"""Experiment configuration: one JSON document, unknown keys rejected."""
import hashlib
import json
from typing import List, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from ppclab.errors import ConfigError

TASKS = ("paircorr", "energy", "variance", "selberg-check", "watt-check")


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid")


class SequenceSpec(_Strict):
    family: Literal["power", "nlog", "file"]
    theta: Optional[List[float]] = None
    A: Optional[float] = None
    n0: Optional[int] = None
    path: Optional[str] = None

    @model_validator(mode="after")
    def _family_params(self):
        problems = []
        if self.family == "power" and not self.theta:
            problems.append("sequence.theta is required for family 'power'")
        if self.family == "nlog" and self.A is None:
            problems.append("sequence.A is required for family 'nlog'")
        if self.family == "file" and not self.path:
            problems.append("sequence.path is required for family 'file'")
        if problems:
            raise ValueError("; ".join(problems))
        return self


class AlphaSpec(_Strict):
    measure: Literal["mu", "fixed"] = "mu"
    samples: Optional[int] = Field(default=None, ge=2)
    seed: Optional[int] = None
    values: Optional[List[List[float]]] = None
    gamma: float = Field(default=0.5, gt=0)


class SelbergSpec(_Strict):
    k: int = Field(default=64, ge=1)
    s: float = Field(default=1.0, gt=0)
    scale: float = Field(default=10.0, gt=0)
    grid: int = Field(default=10000, ge=16)


class WattSpec(_Strict):
    A: List[int] = Field(default_factory=lambda: list(range(1, 9)), min_length=1)
    M: List[int] = Field(default_factory=lambda: [1, 2], min_length=1)
    delta: List[float] = Field(default_factory=lambda: [0.5, 0.25, 0.125], min_length=1)
    exponent: float = 1.0


class VarianceSpec(_Strict):
    s: float = Field(default=1.0, gt=0)


class OutputSpec(_Strict):
    dir: str = "ppclab-out"
    formats: List[Literal["csv", "json", "svg"]] = Field(default_factory=lambda: ["csv", "json", "svg"])


class ExperimentConfig(_Strict):
    sequence: SequenceSpec
    d: Optional[int] = Field(default=None, ge=1)
    tasks: List[Literal[TASKS]] = Field(min_length=1)
    s_grid: List[float] = Field(default_factory=lambda: [0.5, 1.0, 2.0], min_length=1)
    gamma: Optional[List[float]] = None
    subset: Optional[List[int]] = None
    N_grid: List[int] = Field(min_length=1)
    alpha: AlphaSpec = Field(default_factory=AlphaSpec)
    r: int = Field(default=1, ge=1)
    norm: Literal["sup", "euclid"] = "sup"
    method: Literal["grid", "brute"] = "grid"
    variance: VarianceSpec = Field(default_factory=VarianceSpec)
    selberg: SelbergSpec = Field(default_factory=SelbergSpec)
    watt: WattSpec = Field(default_factory=WattSpec)
    output: OutputSpec = Field(default_factory=OutputSpec)

    @model_validator(mode="after")
    def _cross_checks(self):
        problems = cross_field_problems(self.model_dump(mode="json"))
        if problems:
            raise ValueError("; ".join(problems))
        return self


def _numbers(v):
    if isinstance(v, list) and all(isinstance(x, (int, float)) and not isinstance(x, bool)
                                   for x in v):
        return v
    return None


def cross_field_problems(raw):
    """Checks spanning several fields, run on the raw document so they are
    reported even when individual fields also fail."""
    problems = []
    tasks = raw.get("tasks") if isinstance(raw.get("tasks"), list) else []
    alpha = raw.get("alpha") if isinstance(raw.get("alpha"), dict) else {}
    grid = _numbers(raw.get("N_grid"))
    if grid is not None:
        if any(b <= a for a, b in zip(grid, grid[1:])):
            problems.append("N_grid: must be strictly increasing")
        if any(n < 1 for n in grid):
            problems.append("N_grid: entries must be >= 1")
    s_grid = _numbers(raw.get("s_grid"))
    if s_grid:
        if any(b <= a for a, b in zip(s_grid, s_grid[1:])) or min(s_grid) <= 0:
            problems.append("s_grid: must be positive and strictly increasing")
    gamma = _numbers(raw.get("gamma"))
    if gamma is not None and any(not 0 < g <= 1 for g in gamma):
        problems.append("gamma: entries must lie in (0, 1]")
    measure = alpha.get("measure", "mu")
    stochastic = "variance" in tasks or ("paircorr" in tasks and measure == "mu")
    if stochastic and alpha.get("seed") is None:
        problems.append("alpha.seed: required when a stochastic task is listed")
    if stochastic and alpha.get("samples") is None:
        problems.append("alpha.samples: required when drawing alpha from mu")
    if "paircorr" in tasks and measure == "fixed" and not alpha.get("values"):
        problems.append("alpha.values: required for measure 'fixed'")
    if len(set(map(str, tasks))) != len(tasks):
        problems.append("tasks: duplicate entries")
    return problems


def _format_errors(err):
    out = []
    for e in err.errors():
        loc = ".".join(str(p) for p in e["loc"]) or "<root>"
        msg = e["msg"]
        if msg.startswith("Value error, "):
            out.extend(m.strip() for m in msg[len("Value error, "):].split(";"))
        else:
            out.append(f"{loc}: {msg}")
    return out


def parse_config(raw):
    """Validate a decoded JSON document; raises ConfigError listing every problem."""
    if not isinstance(raw, dict):
        raise ConfigError(["<root>: config must be a JSON object"])
    try:
        return ExperimentConfig.model_validate(raw)
    except ValidationError as err:
        problems = _format_errors(err)
    for extra in cross_field_problems(raw):
        if extra not in problems:
            problems.append(extra)
    raise ConfigError(problems)


def load_config(path):
    with open(path, encoding="utf-8") as fh:
        try:
            raw = json.load(fh)
        except json.JSONDecodeError as err:
            raise ConfigError([f"<root>: not valid JSON ({err})"]) from None
    return parse_config(raw)


def config_hash(config):
    """SHA-256 of the canonical JSON form; independent of key order."""
    if isinstance(config, BaseModel):
        config = config.model_dump(mode="json")
    blob = json.dumps(config, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode("utf-8")).hexdigest()
