"""Survival laws: Gompertz and table-backed mortality models.

A model exposes the force of mortality (hazard), survival probabilities
and the death density.  Two laws are provided: the analytic Gompertz
law, with hazard ``exp((age - m) / varsigma) / varsigma``, and a
table-backed law that interpolates the integrated hazard piecewise
linearly between integer ages (which preserves the survival semigroup
exactly at the table knots).

Four parameter sets fitted to Ontario (Canada) population tables,
conditional on survival to age 35, ship as named labels; the matching
synthetic ``age,lx`` tables are bundled under ``data/`` for the
table-driven workflow.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

from .errors import (
    ConfigError,
    DomainError,
    FittingError,
    OutOfRangeError,
    ValidationError,
)
from .numerics import minimize_loss_2d

__all__ = [
    "GompertzParams",
    "MortalityTable",
    "MortalityModel",
    "GompertzModel",
    "TabularModel",
    "fit_gompertz",
    "load_table",
    "resolve_model",
    "CANONICAL_GOMPERTZ",
    "bundled_table_path",
]


@dataclass(frozen=True)
class GompertzParams:
    """Modal age ``m`` and dispersion ``varsigma``, both in years."""

    m: float
    varsigma: float

    def __post_init__(self):
        if self.m <= 0:
            raise ValidationError("modal age m must be positive")
        if self.varsigma <= 0:
            raise ValidationError("dispersion varsigma must be positive")


#: Gompertz parameters fitted to Ontario female/male population tables
#: (1970 and 2004 vintages), conditional on survival to age 35.
CANONICAL_GOMPERTZ: dict[str, GompertzParams] = {
    "ON-female-1970": GompertzParams(85.3758, 10.5098),
    "ON-female-2004": GompertzParams(89.7615, 9.3216),
    "ON-male-1970": GompertzParams(79.1089, 11.5890),
    "ON-male-2004": GompertzParams(85.8651, 10.1379),
}


class MortalityModel:
    """Common interface for survival laws.  Immutable once constructed."""

    label: str = ""

    @property
    def max_age(self) -> float:
        """Largest queryable age (infinite for analytic laws)."""
        return math.inf

    def force_of_mortality(self, age):
        """Hazard rate (1/year) at ``age``; accepts scalars or arrays."""
        raise NotImplementedError

    def survival_probability(self, age, t):
        """P(alive at age + t | alive at age); ``t`` scalar or array."""
        raise NotImplementedError

    def death_density(self, age, t):
        """Density (1/year) of the remaining-lifetime distribution at age."""
        t = np.asarray(t, dtype=float)
        if np.any(t < 0):
            raise DomainError("elapsed time t must be nonnegative")
        out = np.asarray(
            self.force_of_mortality(age + t) * self.survival_probability(age, t)
        )
        return out if out.ndim else float(out)


class GompertzModel(MortalityModel):
    """Analytic Gompertz law.

    Survival uses the closed form
    ``exp(-exp((age - m)/varsigma) * (exp(t/varsigma) - 1))``, i.e. the
    integrated hazard between age and age + t.
    """

    def __init__(self, params: GompertzParams, label: str = ""):
        self.params = params
        self.label = label or f"gompertz(m={params.m}, varsigma={params.varsigma})"

    def __repr__(self):
        return f"GompertzModel({self.label!r})"

    def force_of_mortality(self, age):
        age = np.asarray(age, dtype=float)
        if np.any(age < 0):
            raise DomainError("age must be nonnegative")
        out = np.exp((age - self.params.m) / self.params.varsigma) / self.params.varsigma
        return out if out.ndim else float(out)

    def survival_probability(self, age, t):
        t = np.asarray(t, dtype=float)
        if np.any(t < 0):
            raise DomainError("elapsed time t must be nonnegative")
        z = math.exp((age - self.params.m) / self.params.varsigma)
        out = np.exp(-z * np.expm1(t / self.params.varsigma))
        return out if out.ndim else float(out)


@dataclass(frozen=True)
class MortalityTable:
    """Survivorship by integer age, conditional on reaching ``base_age``.

    ``survivorship`` may be raw counts (l_x) or probabilities; it is
    normalized at ``base_age`` on construction, which makes the two
    conventions equivalent.
    """

    base_age: int
    ages: np.ndarray
    survivorship: np.ndarray

    @classmethod
    def from_rows(cls, rows, base_age=None) -> "MortalityTable":
        ages = np.asarray([r[0] for r in rows], dtype=float)
        lx = np.asarray([r[1] for r in rows], dtype=float)
        if len(ages) < 2:
            raise ValidationError("mortality table needs at least two rows")
        if np.any(np.diff(ages) <= 0):
            raise ValidationError("table ages must be strictly increasing")
        # A terminal run of zeros marks the end of the table.
        positive = lx > 0
        if not positive[0]:
            raise ValidationError("survivorship must be positive at the first age")
        if not np.all(positive):
            cut = int(np.argmin(positive))
            if np.any(lx[cut:] > 0):
                raise ValidationError("survivorship must not recover after zero")
            ages, lx = ages[:cut], lx[:cut]
        if np.any(np.diff(lx) > 0):
            raise ValidationError("survivorship must be nonincreasing")
        if base_age is None:
            base_age = int(ages[0])
        if float(base_age) not in ages:
            raise ValidationError(f"base age {base_age} is not a table age")
        base_ix = int(np.searchsorted(ages, float(base_age)))
        return cls(
            base_age=int(base_age),
            ages=ages,
            survivorship=lx / lx[base_ix],
        )


def load_table(path, base_age=None) -> MortalityTable:
    """Read a ``age,lx`` CSV file (header row required, ages ascending)."""
    path = Path(path)
    rows = []
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ConfigError(f"{path}: line 1: empty file, expected 'age,lx' header")
        if [c.strip().lower() for c in header[:2]] != ["age", "lx"]:
            raise ConfigError(f"{path}: line 1: expected header 'age,lx'")
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            try:
                rows.append((float(row[0]), float(row[1])))
            except (ValueError, IndexError):
                raise ConfigError(f"{path}: line {lineno}: expected 'age,lx' numbers")
    try:
        return MortalityTable.from_rows(rows, base_age=base_age)
    except ValidationError as exc:
        raise ConfigError(f"{path}: {exc}") from exc


class TabularModel(MortalityModel):
    """Survival law backed by a mortality table.

    The integrated hazard is linear between table knots, so the hazard
    is piecewise constant within each year of age.  Queries outside the
    table's age range raise OutOfRangeError.
    """

    def __init__(self, table: MortalityTable, label: str = ""):
        self.table = table
        self.label = label or f"table(base={table.base_age})"
        self._ages = table.ages
        # Integrated hazard from the first table age.
        self._cumhaz = -np.log(table.survivorship / table.survivorship[0])

    def __repr__(self):
        return f"TabularModel({self.label!r})"

    @property
    def max_age(self) -> float:
        return float(self._ages[-1])

    def _check_range(self, age):
        if np.any(age < self._ages[0]) or np.any(age > self._ages[-1]):
            raise OutOfRangeError(
                f"age outside table range [{self._ages[0]:g}, {self._ages[-1]:g}]"
            )

    def _integrated_hazard(self, age):
        self._check_range(age)
        return np.interp(age, self._ages, self._cumhaz)

    def force_of_mortality(self, age):
        age = np.asarray(age, dtype=float)
        self._check_range(age)
        ix = np.clip(np.searchsorted(self._ages, age, side="right") - 1, 0,
                     len(self._ages) - 2)
        slope = (self._cumhaz[ix + 1] - self._cumhaz[ix]) / (
            self._ages[ix + 1] - self._ages[ix]
        )
        return slope if slope.ndim else float(slope)

    def survival_probability(self, age, t):
        t = np.asarray(t, dtype=float)
        if np.any(t < 0):
            raise DomainError("elapsed time t must be nonnegative")
        out = np.exp(-(self._integrated_hazard(age + t) - self._integrated_hazard(age)))
        return out if out.ndim else float(out)


def fit_gompertz(table: MortalityTable, base_age=None, weights=None) -> GompertzParams:
    """Fit (m, varsigma) to a table by least squares on survival curves.

    The loss is the sum over table ages past ``base_age`` of squared
    differences between model and empirical survival conditional on the
    base age.  ``weights``, when given, must align with those ages;
    the default is unweighted.
    """
    if base_age is None:
        base_age = table.base_age
    if float(base_age) not in table.ages:
        raise FittingError(f"base age {base_age} is not a table age")
    base_ix = int(np.searchsorted(table.ages, float(base_age)))
    ages = table.ages[base_ix:]
    emp = table.survivorship[base_ix:] / table.survivorship[base_ix]
    if len(ages) - 1 < 10:
        raise FittingError(
            f"need at least 10 table rows past the base age, got {len(ages) - 1}"
        )
    if emp[-1] >= emp[0] - 1e-12:
        raise FittingError("survivorship is constant past the base age")
    if weights is None:
        w = np.ones_like(emp)
    else:
        w = np.asarray(weights, dtype=float)
        if w.shape != emp.shape:
            raise FittingError("weights must align with table ages past base age")

    dt = ages - float(base_age)

    def loss(m, log_vs):
        vs = math.exp(log_vs)
        model = np.exp(-math.exp((base_age - m) / vs) * np.expm1(dt / vs))
        return float(np.sum(w * (model - emp) ** 2))

    # Initial modal age: where the empirical curve crosses 1/2.
    below = np.nonzero(emp <= 0.5)[0]
    m0 = float(ages[below[0]]) if below.size else float(ages[-1]) + 5.0
    m_fit, log_vs_fit = minimize_loss_2d(loss, (m0, math.log(10.0)), tolerance=1e-14)
    return GompertzParams(m=m_fit, varsigma=math.exp(log_vs_fit))


def bundled_table_path(label: str) -> Path:
    """Filesystem path of a bundled ``age,lx`` table."""
    if label not in CANONICAL_GOMPERTZ:
        raise ConfigError(f"no bundled table named {label!r}")
    return Path(str(resources.files("gaoval") / "data" / f"{label}.csv"))


def write_model_file(path, params: GompertzParams, label: str = "") -> None:
    """Persist fitted parameters as a small ``key = value`` text file."""
    text = (
        "kind = gompertz\n"
        f"m = {params.m!r}\n"
        f"varsigma = {params.varsigma!r}\n"
        f"label = {label}\n"
    )
    Path(path).write_text(text, encoding="utf-8")


def read_model_file(path) -> GompertzModel:
    path = Path(path)
    fields = {}
    for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"{path}: line {lineno}: expected 'key = value'")
        key, _, value = line.partition("=")
        fields[key.strip()] = value.strip()
    if fields.get("kind") != "gompertz":
        raise ConfigError(f"{path}: unsupported model kind {fields.get('kind')!r}")
    try:
        params = GompertzParams(float(fields["m"]), float(fields["varsigma"]))
    except (KeyError, ValueError) as exc:
        raise ConfigError(f"{path}: missing or invalid m/varsigma") from exc
    return GompertzModel(params, label=fields.get("label") or str(path))


def resolve_model(spec: str) -> MortalityModel:
    """Turn a model label, table CSV path, or model file path into a model."""
    if spec in CANONICAL_GOMPERTZ:
        return GompertzModel(CANONICAL_GOMPERTZ[spec], label=spec)
    path = Path(spec)
    if path.suffix == ".model":
        return read_model_file(path)
    if path.suffix == ".csv" or path.exists():
        return TabularModel(load_table(path), label=path.stem)
    raise ConfigError(
        f"unknown mortality model {spec!r}; expected one of "
        f"{sorted(CANONICAL_GOMPERTZ)} or a .csv/.model path"
    )
