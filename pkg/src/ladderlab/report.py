"""Report records shared by the verification engine, puzzles, and the CLI."""

import json
from dataclasses import dataclass, field

CSV_HEADER = "formula,params,lhs,rhs,ratio,elapsed_ms"


def _format_one(value):
    if isinstance(value, float):
        return f"{value:g}"
    if isinstance(value, (tuple, list)):
        return "|".join(_format_one(v) for v in value)
    return str(value)


def _format_params(params):
    """Stable ``k=v`` rendering, semicolon-separated so CSV needs no quoting."""
    return ";".join(f"{k}={_format_one(params[k])}" for k in sorted(params))


@dataclass(frozen=True)
class RatioReport:
    """One finite-parameter check of an asymptotic identity: lhs vs rhs."""

    formula: str
    params: dict
    lhs: float
    rhs: float
    ratio: float
    elapsed_ms: float

    def to_json_dict(self):
        return {
            "formula": self.formula,
            "params": dict(self.params),
            "lhs": self.lhs,
            "rhs": self.rhs,
            "ratio": self.ratio,
            "elapsed_ms": self.elapsed_ms,
        }

    def to_json(self):
        return json.dumps(self.to_json_dict(), sort_keys=True)

    def to_csv_row(self):
        return (
            f"{self.formula},{_format_params(self.params)},"
            f"{self.lhs!r},{self.rhs!r},{self.ratio!r},{self.elapsed_ms:g}"
        )


@dataclass(frozen=True)
class TrendReport:
    """A functional evaluated along a parameter grid, with its limit target."""

    label: str
    grid: tuple
    values: tuple
    target: float
    distance_from_one: tuple = field(default=())

    @property
    def improving(self):
        """Whether the distance to the target shrank from first to last point."""
        if len(self.values) < 2:
            return True
        first = abs(self.values[0] - self.target)
        last = abs(self.values[-1] - self.target)
        return last <= first
