"""Analytic demonstration curves and the formula-mode counterpart.

Two modes ship side by side. Figure-reproduction mode evaluates the pinned
closed forms of the bundled toy panels exactly as plotted (coefficients are
constants here, including the /5 and /20 decay rates, which intentionally
differ from the /2 used by the plain-text description of the same toy
model). Formula mode rebuilds the same picture from the bounds module so the
two can be compared.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .bounds import old_bound
from .errors import DomainError
from .info import binary_entropy

# panel name -> (x_hi, decay, [(series, slope_coeff, offset)]); slope/offset
# encode value = base(x) - slope * x - offset; the old panel is special-cased.
_PANELS = {
    "low_entropy_new": (21.0, 5.0, [
        ("I(Y;Z*)", 0.0, 0.0),
        ("10000", 2 * 0.01, 0.2),
        ("5000", 2 * 0.02, 0.26),
        ("2000", 2 * 0.03, 0.38),
    ]),
    "low_entropy_old": (6.0, 5.0, [
        ("I(Y;Z*)", 0.0, 0.0),
        ("10000", None, 0.03),  # None slope: subtract offset * 2^x instead
    ]),
    "high_entropy_new": (100.0, 20.0, [
        ("I(Y;Z*)", 0.0, 0.0),
        ("10000", 2 * 0.01, 0.2),
    ]),
}

_H_Y = 3.32  # pinned plotted ceiling of the demonstration curves


@dataclass(frozen=True)
class ToyFigSpec:
    panel: str
    x_range: tuple[float, float]
    step: float

    def __post_init__(self):
        if self.panel not in _PANELS:
            raise DomainError(f"unknown panel {self.panel!r}; choose from {sorted(_PANELS)}")
        hi = _PANELS[self.panel][0]
        if self.x_range != (0.0, hi):
            raise DomainError(
                f"panel {self.panel!r} is pinned to x range (0, {hi}), got {self.x_range!r}"
            )
        if self.step <= 0.0:
            raise DomainError(f"step must be positive, got {self.step!r}")


@dataclass(frozen=True)
class CurvePoint:
    i_xz: float
    series: str
    value: float


def make_toy_spec(panel: str, step: float = 0.25) -> ToyFigSpec:
    if panel not in _PANELS:
        raise DomainError(f"unknown panel {panel!r}; choose from {sorted(_PANELS)}")
    return ToyFigSpec(panel=panel, x_range=(0.0, _PANELS[panel][0]), step=step)


def _grid(lo: float, hi: float, step: float) -> list[float]:
    n = round((hi - lo) / step)
    if abs(lo + n * step - hi) > 1e-9:
        raise DomainError(f"step {step!r} does not divide the range ({lo}, {hi})")
    return [lo + k * step for k in range(n + 1)]


def emit_toyfig(spec: ToyFigSpec) -> list[CurvePoint]:
    """Evaluate the pinned closed-form curves of one panel on its grid."""
    _, decay, series = _PANELS[spec.panel]
    points = []
    for name, slope, offset in series:
        for x in _grid(spec.x_range[0], spec.x_range[1], spec.step):
            base = _H_Y - _H_Y * math.exp(-x / decay)
            if slope is None:
                value = base - offset * 2.0 ** x
            else:
                value = base - slope * x - offset
            points.append(CurvePoint(i_xz=x, series=name, value=value))
    return points


def emit_bound_fig(params: dict) -> list[CurvePoint]:
    """Formula-mode figure: the same curve family computed from the bound
    formulas rather than pinned constants.

    params keys: h_y, decay, x_hi, step, mode ("new"|"old"), and series —
    a list of {"label", "delta_bar"} in new mode (value = base - 2(delta_bar
    x + h2(delta_bar)), the relevance-gap cap at compression level x) or
    {"label", "m", "c"} with y_card in old mode.
    """
    known = {"h_y", "decay", "x_hi", "step", "mode", "series", "y_card"}
    unknown = set(params) - known
    if unknown:
        raise DomainError(f"unknown figure parameter {sorted(unknown)[0]!r}")
    h_y = float(params.get("h_y", _H_Y))
    decay = float(params.get("decay", 5.0))
    x_hi = float(params.get("x_hi", 21.0))
    step = float(params.get("step", 0.25))
    mode = params.get("mode", "new")
    if mode not in ("new", "old"):
        raise DomainError(f"mode must be 'new' or 'old', got {mode!r}")
    if decay <= 0.0 or h_y <= 0.0:
        raise DomainError("h_y and decay must be positive")
    series = params.get("series", [])

    xs = _grid(0.0, x_hi, step)
    points = [
        CurvePoint(i_xz=x, series="I(Y;Z*)", value=h_y * (1.0 - math.exp(-x / decay)))
        for x in xs
    ]
    for spec in series:
        label = str(spec.get("label", "series"))
        if mode == "new":
            if "delta_bar" not in spec:
                raise DomainError(f"series {label!r} needs 'delta_bar' in new mode")
            db = float(spec["delta_bar"])
            drop = [2.0 * (db * x + binary_entropy(db)) for x in xs]
        else:
            if "m" not in spec:
                raise DomainError(f"series {label!r} needs 'm' in old mode")
            y_card = int(params.get("y_card", 10))
            c = float(spec.get("c", 1.0))
            drop = [old_bound(y_card, int(spec["m"]), x, c) for x in xs]
        for x, d in zip(xs, drop):
            base = h_y * (1.0 - math.exp(-x / decay))
            points.append(CurvePoint(i_xz=x, series=label, value=base - d))
    return points


CURVES_CSV_HEADER = ["series", "i_xz_bits", "value_bits"]


def write_curves_csv(path, points: list[CurvePoint]) -> None:
    """CSV with mandatory header and 12 significant digits."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(",".join(CURVES_CSV_HEADER) + "\n")
        for p in points:
            fh.write(f"{p.series},{p.i_xz:.12g},{p.value:.12g}\n")


def read_curves_csv(path) -> list[CurvePoint]:
    points = []
    with open(path, "r", encoding="utf-8", newline="") as fh:
        header = fh.readline().strip().split(",")
        if header != CURVES_CSV_HEADER:
            raise DomainError(f"unexpected curve CSV header {header!r}")
        for line in fh:
            series, x, v = line.rstrip("\n").split(",")
            points.append(CurvePoint(i_xz=float(x), series=series, value=float(v)))
    return points
