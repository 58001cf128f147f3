# Copyright (c) 2024 sarlevel contributors
# This software is distributed under the terms of the MIT License.

"""
Accuracy of estimated level series against reference series, and calibration of the speckle kernel radius.

Series are exchanged as CSV with the header ``date,level_m``.
Reference levels at or below the DEM floor (the water surface captured in the DEM itself) are unobservable
and are excluded from the comparison.
"""

from __future__ import annotations
import io
import math
import logging
import datetime
import dataclasses
from pathlib import Path
from concurrent.futures import Executor
from typing import Any, Callable, Iterable, Optional, Sequence, TextIO
import numpy as np
import pandas as pd
from sarlevel.scene import Scene
from sarlevel.estimator import EstimatorConfig, estimate_level


class MetricsError(ValueError):
    pass


SERIES_COLUMNS = ("date", "level_m")


@dataclasses.dataclass(frozen=True)
class TimeSeries:
    """Levels in meters keyed by unique dates in ascending order."""

    dates: tuple[datetime.date, ...]
    values: tuple[float, ...]

    def __post_init__(self) -> None:
        if len(self.dates) != len(self.values):
            raise MetricsError("Dates and values differ in length")
        if any(a >= b for a, b in zip(self.dates, self.dates[1:])):
            raise MetricsError("Dates shall be unique and ascending")
        if not all(math.isfinite(v) for v in self.values):
            raise MetricsError("Levels shall be finite")

    @staticmethod
    def from_pairs(pairs: Iterable[tuple[datetime.date, float]]) -> TimeSeries:
        """Sorts by date; duplicate dates are rejected."""
        items = sorted(pairs, key=lambda x: x[0])
        for (a, _), (b, _) in zip(items, items[1:]):
            if a == b:
                raise MetricsError(f"Duplicate date {a.isoformat()}")
        return TimeSeries(tuple(d for d, _ in items), tuple(float(v) for _, v in items))

    def __len__(self) -> int:
        return len(self.dates)

    def as_dict(self) -> dict[datetime.date, float]:
        return dict(zip(self.dates, self.values))

    def without(self, dates: Iterable[datetime.date]) -> TimeSeries:
        drop = set(dates)
        return TimeSeries.from_pairs((d, v) for d, v in zip(self.dates, self.values) if d not in drop)


def load_series(source: str | Path | TextIO) -> TimeSeries:
    try:
        df = pd.read_csv(source, dtype={"date": str}, skipinitialspace=True)
    except pd.errors.EmptyDataError:
        raise MetricsError(f"{source}: empty file") from None
    except (OSError, pd.errors.ParserError) as ex:
        raise MetricsError(f"{source}: cannot read series: {ex}") from ex
    absent = [c for c in SERIES_COLUMNS if c not in df.columns]
    if absent:
        raise MetricsError(f"{source}: missing columns: {', '.join(absent)}")
    try:
        pairs = [
            (datetime.date.fromisoformat(str(d).strip()), float(v)) for d, v in zip(df["date"], df["level_m"])
        ]
    except ValueError as ex:
        raise MetricsError(f"{source}: malformed row: {ex}") from ex
    return TimeSeries.from_pairs(pairs)


def write_series(series: TimeSeries, dest: str | Path | TextIO) -> None:
    """Levels are written with four decimals."""
    df = pd.DataFrame({"date": [d.isoformat() for d in series.dates], "level_m": list(series.values)})
    df.to_csv(dest, index=False, float_format="%.4f", lineterminator="\n")


def append_series_row(path: str | Path, date: datetime.date, level: float) -> None:
    """Creates the file with the header if it does not exist yet. The date shall not be present already."""
    path = Path(path)
    exists = path.exists() and path.stat().st_size > 0
    if exists and date in load_series(path).dates:
        raise MetricsError(f"{path}: date {date.isoformat()} is already listed")
    df = pd.DataFrame({"date": [date.isoformat()], "level_m": [float(level)]})
    df.to_csv(path, mode="a", header=not exists, index=False, float_format="%.4f", lineterminator="\n")


def load_dates(source: str | Path | TextIO) -> list[datetime.date]:
    """A CSV with a ``date`` column; other columns are ignored. Returned sorted and deduplicated."""
    try:
        df = pd.read_csv(source, dtype=str, skipinitialspace=True)
    except pd.errors.EmptyDataError:
        return []
    except (OSError, pd.errors.ParserError) as ex:
        raise MetricsError(f"{source}: cannot read dates: {ex}") from ex
    if "date" not in df.columns:
        raise MetricsError(f"{source}: missing column: date")
    try:
        return sorted({datetime.date.fromisoformat(str(d).strip()) for d in df["date"]})
    except ValueError as ex:
        raise MetricsError(f"{source}: malformed date: {ex}") from ex


def write_dates(dates: Iterable[datetime.date], dest: str | Path | TextIO) -> None:
    df = pd.DataFrame({"date": [d.isoformat() for d in sorted(set(dates))]})
    df.to_csv(dest, index=False, lineterminator="\n")


def format_series(series: TimeSeries) -> str:
    """
    >>> print(format_series(TimeSeries.from_pairs([(datetime.date(2021, 3, 4), 191.3359375)])), end="")
    date,level_m
    2021-03-04,191.3359
    """
    buf = io.StringIO()
    write_series(series, buf)
    return buf.getvalue()


@dataclasses.dataclass(frozen=True)
class Pair:
    date: datetime.date
    estimate: float
    reference: float


@dataclasses.dataclass(frozen=True)
class JoinResult:
    pairs: tuple[Pair, ...]
    excluded_below_floor: int


def join_series(estimates: TimeSeries, reference: TimeSeries, dem_floor: float = -math.inf) -> JoinResult:
    """
    Inner join on date. Dates whose reference level is at or below the DEM floor are dropped and counted.
    """
    ref = reference.as_dict()
    common = [(d, v) for d, v in zip(estimates.dates, estimates.values) if d in ref]
    kept = tuple(Pair(d, v, ref[d]) for d, v in common if ref[d] > dem_floor)
    excluded = len(common) - len(kept)
    if not kept:
        if common:
            raise MetricsError(f"No evaluable dates: all {excluded} common dates are at or below the DEM floor")
        raise MetricsError("No evaluable dates: the series have no dates in common")
    _logger.debug("Joined %d dates, %d excluded below floor %s", len(kept), excluded, dem_floor)
    return JoinResult(kept, excluded)


@dataclasses.dataclass(frozen=True)
class EvalReport:
    r2: Optional[float]
    """None when the reference is constant over the compared dates."""
    rmse: float
    mae: float
    n_dates: int
    excluded_below_floor: int = 0

    def to_dict(self) -> dict[str, Any]:
        return dataclasses.asdict(self)

    def rows(self) -> list[tuple[str, str]]:
        return [
            ("R²", "n/a" if self.r2 is None else f"{self.r2:.2f}"),
            ("RMSE, m", f"{self.rmse:.2f}"),
            ("MAE, m", f"{self.mae:.2f}"),
            ("# of dates", str(self.n_dates)),
            ("# excluded below floor", str(self.excluded_below_floor)),
        ]


def evaluate(pairs: Sequence[Pair], excluded_below_floor: int = 0) -> EvalReport:
    """
    >>> d = datetime.date(2000, 1, 1)
    >>> r = evaluate([Pair(d, 1.5, 1), Pair(d, 2, 2), Pair(d, 2.5, 3)])
    >>> round(r.mae, 4), round(r.rmse, 4), r.r2
    (0.3333, 0.4082, 0.75)
    """
    if not pairs:
        raise MetricsError("Nothing to evaluate")
    est = np.array([p.estimate for p in pairs], dtype=np.float64)
    ref = np.array([p.reference for p in pairs], dtype=np.float64)
    residual = est - ref
    ss_res = float(np.sum(residual**2))
    ss_tot = float(np.sum((ref - ref.mean()) ** 2))
    return EvalReport(
        r2=(1.0 - ss_res / ss_tot) if ss_tot > 0 else None,
        rmse=math.sqrt(ss_res / len(pairs)),
        mae=float(np.mean(np.abs(residual))),
        n_dates=len(pairs),
        excluded_below_floor=excluded_below_floor,
    )


def select_calibration_dates(dates: Sequence[datetime.date], count: int = 8, seed: int = 0) -> list[datetime.date]:
    """
    Reproducible random subset, returned in ascending order. Asking for more dates than available returns all.

    >>> ds = [datetime.date(2020, 1, k) for k in range(1, 21)]
    >>> select_calibration_dates(ds, 8, seed=1) == select_calibration_dates(list(reversed(ds)), 8, seed=1)
    True
    """
    if count < 0:
        raise MetricsError(f"Negative count {count}")
    pool = sorted(set(dates))
    if count >= len(pool):
        return pool
    picked = np.random.default_rng(seed).choice(len(pool), count, replace=False)
    return sorted(pool[i] for i in picked)


def score_kernels(
    scenes: Sequence[Scene],
    radii: Sequence[int],
    config: EstimatorConfig,
    executor: Optional[Executor] = None,
) -> dict[int, float]:
    """
    MAE of the estimates against the scenes' reference levels for every candidate radius.
    Scenes without a reference are ignored.
    """
    usable = [s for s in scenes if s.reference is not None]
    if not usable:
        raise MetricsError("None of the calibration scenes has a reference level")
    if not radii:
        raise MetricsError("No kernel radii to choose from")
    radii = sorted(set(radii))
    jobs = [(r, s) for r in radii for s in usable]

    def run(job: tuple[int, Scene]) -> float:
        r, s = job
        assert s.reference is not None
        return abs(estimate_level(s, config.replace(speckle_radius=r)).level - s.reference)

    mapper: Callable[..., Any] = executor.map if executor is not None else map
    errors = list(mapper(run, jobs))
    out: dict[int, float] = {}
    for r in radii:
        out[r] = float(np.mean([e for (jr, _), e in zip(jobs, errors) if jr == r]))
        _logger.info("Kernel radius %d: MAE %.4f m over %d scenes", r, out[r], len(usable))
    return out


def calibrate_kernel(
    scenes: Sequence[Scene],
    radii: Sequence[int],
    config: EstimatorConfig,
    executor: Optional[Executor] = None,
) -> int:
    """The radius with the smallest MAE; the smallest radius on ties."""
    return best_radius(score_kernels(scenes, radii, config, executor))


def best_radius(scores: dict[int, float]) -> int:
    """
    >>> best_radius({3: 0.5, 1: 0.5, 2: 0.7})
    1
    """
    return min(scores, key=lambda r: (scores[r], r))


_logger = logging.getLogger(__name__)


def _unittest_series_io(tmp_path: Path) -> None:
    import pytest

    (tmp_path / "ref.csv").write_text("date,level_m\n2021-03-16,12.5\n2021-03-04,11.25\n")
    s = load_series(tmp_path / "ref.csv")
    assert s.dates == (datetime.date(2021, 3, 4), datetime.date(2021, 3, 16))
    assert s.values == (11.25, 12.5)
    write_series(s, tmp_path / "out.csv")
    assert (tmp_path / "out.csv").read_text() == "date,level_m\n2021-03-04,11.2500\n2021-03-16,12.5000\n"

    (tmp_path / "dup.csv").write_text("date,level_m\n2021-03-04,1\n2021-03-04,2\n")
    with pytest.raises(MetricsError):
        load_series(tmp_path / "dup.csv")
    (tmp_path / "bad.csv").write_text("date,level_m\nyesterday,1\n")
    with pytest.raises(MetricsError):
        load_series(tmp_path / "bad.csv")
    (tmp_path / "empty.csv").write_text("")
    with pytest.raises(MetricsError):
        load_series(tmp_path / "empty.csv")
    assert len(load_series(io.StringIO("date,level_m\n"))) == 0

    ref = tmp_path / "appended.csv"
    append_series_row(ref, datetime.date(2020, 1, 2), 12.0)
    append_series_row(ref, datetime.date(2020, 1, 1), 11.123456)
    assert ref.read_text() == "date,level_m\n2020-01-02,12.0000\n2020-01-01,11.1235\n"
    assert load_series(ref).dates[0] == datetime.date(2020, 1, 1)
    with pytest.raises(MetricsError, match="already listed"):
        append_series_row(ref, datetime.date(2020, 1, 1), 1.0)


def _unittest_dates_io(tmp_path: Path) -> None:
    ds = [datetime.date(2021, 5, 1), datetime.date(2020, 1, 1), datetime.date(2021, 5, 1)]
    write_dates(ds, tmp_path / "dates.csv")
    assert (tmp_path / "dates.csv").read_text() == "date\n2020-01-01\n2021-05-01\n"
    assert load_dates(tmp_path / "dates.csv") == sorted(set(ds))
    # A level series works as a date list too.
    assert load_dates(io.StringIO("date,level_m\n2020-01-01,3\n")) == [datetime.date(2020, 1, 1)]
    assert load_dates(io.StringIO("")) == []


def _unittest_join_series() -> None:
    import pytest

    d1, d2, d3, d4 = (datetime.date(2021, 1, k) for k in (1, 2, 3, 4))
    est = TimeSeries.from_pairs([(d1, 330.0), (d2, 331.0), (d3, 332.0)])
    ref = TimeSeries.from_pairs([(d1, 320.0), (d2, 330.5), (d3, 331.5), (d4, 340.0)])
    joined = join_series(est, ref, dem_floor=324.0)
    assert [p.date for p in joined.pairs] == [d2, d3] and joined.excluded_below_floor == 1
    assert len(join_series(est, ref).pairs) == 3

    with pytest.raises(MetricsError, match="no dates in common"):
        join_series(est, TimeSeries.from_pairs([(d4, 1.0)]))
    with pytest.raises(MetricsError, match="DEM floor"):
        join_series(est, ref, dem_floor=1000.0)


def _unittest_evaluate() -> None:
    d = datetime.date(2000, 1, 1)
    perfect = evaluate([Pair(d, 1.0, 1.0), Pair(d, 2.0, 2.0)])
    assert (perfect.r2, perfect.rmse, perfect.mae) == (1.0, 0.0, 0.0)

    offset = evaluate([Pair(d, 1.0, 0.0), Pair(d, 1.0, 0.0)])
    assert offset.r2 is None and offset.mae == 1.0 and offset.rmse == 1.0

    shifted = evaluate([Pair(d, 101.5, 101), Pair(d, 102, 102), Pair(d, 102.5, 103)])
    assert abs(shifted.r2 - 0.75) < 1e-9  # type: ignore
