"""Analysis configuration."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, fields, replace
from typing import Optional

from .errors import SpecError
from .stattests import CorrelationKind


@dataclass(frozen=True)
class AnalysisConfig:
    """Knobs shared by the whole pipeline.

    ``alpha`` is global on purpose: every gate and test uses the same level.
    ``correlation`` overrides the automatic choice (Pearson when both
    samples pass the normality gate, Spearman otherwise).
    """

    alpha: float = 0.05
    correlation: Optional[str] = None
    strong_r: float = 0.8
    lilliefors: bool = False
    format: str = "text"

    def __post_init__(self):
        if not 0.0 < self.alpha < 1.0:
            raise SpecError(f"alpha must lie in (0, 1), got {self.alpha}")
        if not 0.0 < self.strong_r <= 1.0:
            raise SpecError(f"strong_r must lie in (0, 1], got {self.strong_r}")
        if self.correlation is not None:
            try:
                CorrelationKind(self.correlation.capitalize())
            except ValueError:
                raise SpecError(f"unknown correlation kind {self.correlation!r}") from None
            object.__setattr__(self, "correlation", self.correlation.capitalize())
        if self.format not in ("text", "json"):
            raise SpecError(f"format must be 'text' or 'json', got {self.format!r}")

    @classmethod
    def from_dict(cls, d: dict) -> "AnalysisConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise SpecError(f"unknown config keys: {sorted(unknown)}")
        try:
            return cls(**d)
        except TypeError as exc:
            raise SpecError(str(exc)) from None

    @classmethod
    def from_json_file(cls, path) -> "AnalysisConfig":
        try:
            with open(path, encoding="utf-8") as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise SpecError(f"cannot read config {path}: {exc}") from None
        if not isinstance(data, dict):
            raise SpecError("config must be a JSON object")
        return cls.from_dict(data)

    def with_overrides(self, **kwargs) -> "AnalysisConfig":
        return replace(self, **{k: v for k, v in kwargs.items() if v is not None})

    def to_dict(self):
        return asdict(self)
