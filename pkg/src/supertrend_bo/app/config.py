"""Run configuration and the flat key=value config-file format.

Defaults mirror the reference workflow: capital 100, leverage 1, default
indicator params (15, 3), split 0.8, budget 5 initial + 50 guided
evaluations. Config-file keys mirror the CLI flag names with underscores;
explicit CLI flags win over file values.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

from ..bayes_opt import SearchSpace
from ..errors import UsageError

DEFAULT_PERIOD = 15
DEFAULT_MULTIPLIER = 3


@dataclass(frozen=True, slots=True)
class RunConfig:
    csv_path: Path | None = None
    symbol: str | None = None  # defaults to the CSV stem
    split_ratio: float = 0.8
    capital: float = 100.0
    leverage: float = 1.0
    mode: str = "long_flat"
    default_period: int = DEFAULT_PERIOD
    default_multiplier: int = DEFAULT_MULTIPLIER
    space: SearchSpace = field(default_factory=SearchSpace)
    n_init: int = 5
    n_iter: int = 50
    acq: str = "ei"
    seed: int = 0
    out_dir: Path = Path("runs")
    fill_policy: str = "forward_fill"

    def resolved_symbol(self) -> str:
        if self.symbol:
            return self.symbol
        if self.csv_path is not None:
            return Path(self.csv_path).stem
        return "SERIES"


def parse_config_file(path: str | Path) -> dict[str, str]:
    """Read `key = value` lines; '#' starts a comment, blanks are skipped."""
    values: dict[str, str] = {}
    text = Path(path).read_text(encoding="utf-8")
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected key = value, got {raw!r}")
        key, value = line.split("=", 1)
        values[key.strip().replace("-", "_")] = value.strip()
    return values


def parse_bounds(text: str) -> tuple[float, float]:
    """Parse 'lo,hi' flag values like '5,30'."""
    parts = text.split(",")
    if len(parts) != 2:
        raise UsageError(f"bounds must be 'lo,hi', got {text!r}")
    try:
        lo, hi = float(parts[0]), float(parts[1])
    except ValueError:
        raise UsageError(f"bounds must be numeric, got {text!r}") from None
    if not lo < hi:
        raise UsageError(f"bounds need lo < hi, got {text!r}")
    return lo, hi
