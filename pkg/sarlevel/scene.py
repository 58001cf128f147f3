# Copyright (c) 2024 sarlevel contributors
# This software is distributed under the terms of the MIT License.

"""
Scenes (one dated SAR acquisition with its DEM and reservoir outline) and scene manifests.

A manifest lists one scene per row with the columns ``date,vv_path,vh_path,dem_path,aoi_path``.
It can be a CSV file or a YAML/JSON list of mappings with the same keys.
Relative paths are resolved against the directory containing the manifest.
"""

from __future__ import annotations
import logging
import datetime
import dataclasses
from pathlib import Path
from typing import Any, Optional, Sequence
import pandas as pd
from sarlevel.raster import Raster, Polygon, load_raster, load_polygon


class ManifestError(ValueError):
    pass


MANIFEST_COLUMNS = ("date", "vv_path", "vh_path", "dem_path", "aoi_path")


@dataclasses.dataclass(frozen=True, eq=False)
class Scene:
    vv: Raster
    vh: Raster
    dem: Raster
    aoi: Polygon
    date: Optional[datetime.date] = None
    reference: Optional[float] = None
    """Known water level in meters, if available (synthetic scenes, calibration dates)."""

    @property
    def name(self) -> str:
        return self.date.isoformat() if self.date else "scene"


@dataclasses.dataclass(frozen=True)
class ManifestRow:
    date: datetime.date
    vv_path: Path
    vh_path: Path
    dem_path: Path
    aoi_path: Path

    def load(self, reference: Optional[float] = None) -> Scene:
        return load_scene(self.vv_path, self.vh_path, self.dem_path, self.aoi_path, self.date, reference)

    def to_record(self, base: Optional[Path] = None) -> dict[str, str]:
        def rel(p: Path) -> str:
            if base is not None:
                try:
                    return p.resolve().relative_to(base).as_posix()
                except ValueError:
                    pass
            return str(p)

        return {
            "date": self.date.isoformat(),
            "vv_path": rel(self.vv_path),
            "vh_path": rel(self.vh_path),
            "dem_path": rel(self.dem_path),
            "aoi_path": rel(self.aoi_path),
        }


def load_scene(
    vv: str | Path,
    vh: str | Path,
    dem: str | Path,
    aoi: str | Path,
    date: Optional[datetime.date] = None,
    reference: Optional[float] = None,
) -> Scene:
    scene = Scene(
        vv=load_raster(vv),
        vh=load_raster(vh),
        dem=load_raster(dem),
        aoi=load_polygon(aoi),
        date=date,
        reference=reference,
    )
    _logger.info("Loaded scene %s: SAR %r, DEM %r", scene.name, scene.vv, scene.dem)
    return scene


def parse_date(text: Any) -> datetime.date:
    """
    >>> parse_date(" 2021-03-04 ")
    datetime.date(2021, 3, 4)
    """
    try:
        return datetime.date.fromisoformat(str(text).strip())
    except ValueError:
        raise ManifestError(f"Not an ISO-8601 date: {text!r}") from None


def load_manifest(path: str | Path) -> list[ManifestRow]:
    """
    Rows are returned in file order. Dates shall be unique. Missing files are not detected here.
    """
    path = Path(path)
    if path.suffix.lower() in (".yaml", ".yml", ".json"):
        records = _read_mapping_list(path)
    else:
        records = _read_csv(path)
    base = path.resolve().parent
    rows: list[ManifestRow] = []
    for idx, rec in enumerate(records):
        missing = [c for c in MANIFEST_COLUMNS if not str(rec.get(c) or "").strip()]
        if missing:
            raise ManifestError(f"{path}: row #{idx + 1} lacks {', '.join(missing)}")
        rows.append(
            ManifestRow(
                parse_date(rec["date"]),
                *(base / Path(str(rec[c]).strip()) for c in MANIFEST_COLUMNS[1:]),  # type: ignore
            )
        )
    seen: set[datetime.date] = set()
    for r in rows:
        if r.date in seen:
            raise ManifestError(f"{path}: duplicate date {r.date.isoformat()}")
        seen.add(r.date)
    _logger.debug("Manifest %s: %d rows", path, len(rows))
    return rows


def _read_csv(path: Path) -> list[dict[str, Any]]:
    try:
        df = pd.read_csv(path, dtype=str, keep_default_na=False, skipinitialspace=True)
    except pd.errors.EmptyDataError:
        return []
    except (OSError, pd.errors.ParserError) as ex:
        raise ManifestError(f"{path}: cannot read manifest: {ex}") from ex
    absent = [c for c in MANIFEST_COLUMNS if c not in df.columns]
    if absent:
        raise ManifestError(f"{path}: missing columns: {', '.join(absent)}")
    return list(df.to_dict(orient="records"))


def _read_mapping_list(path: Path) -> list[dict[str, Any]]:
    from sarlevel.yaml import Loader

    try:
        doc = Loader().load(path.read_text(encoding="utf8"))
    except OSError as ex:
        raise ManifestError(f"{path}: cannot read manifest: {ex}") from ex
    except Exception as ex:
        raise ManifestError(f"{path}: malformed manifest: {ex}") from ex
    if doc is None:
        return []
    if not isinstance(doc, list) or not all(isinstance(x, dict) for x in doc):
        raise ManifestError(f"{path}: expected a list of mappings")
    return doc


def append_manifest_row(path: str | Path, row: ManifestRow) -> None:
    """Appends one CSV row, writing the header first if the file is new or empty."""
    path = Path(path)
    fresh = not path.exists() or path.stat().st_size == 0
    base = path.resolve().parent
    df = pd.DataFrame([row.to_record(base)], columns=list(MANIFEST_COLUMNS))
    df.to_csv(path, mode="a", header=fresh, index=False, lineterminator="\n")


def write_manifest(path: str | Path, rows: Sequence[ManifestRow]) -> None:
    path = Path(path)
    base = path.resolve().parent
    df = pd.DataFrame([r.to_record(base) for r in rows], columns=list(MANIFEST_COLUMNS))
    df.to_csv(path, index=False, lineterminator="\n")


_logger = logging.getLogger(__name__)


def _unittest_manifest(tmp_path: Path) -> None:
    import pytest

    (tmp_path / "m.csv").write_text(
        "date,vv_path,vh_path,dem_path,aoi_path\n"
        "2021-03-16,b/vv.tif,b/vh.tif,dem.tif,aoi.geojson\n"
        "2021-03-04,a/vv.tif,a/vh.tif,dem.tif,/abs/aoi.geojson\n"
    )
    rows = load_manifest(tmp_path / "m.csv")
    assert [r.date.isoformat() for r in rows] == ["2021-03-16", "2021-03-04"]
    assert rows[0].vv_path == tmp_path.resolve() / "b" / "vv.tif"
    assert rows[1].aoi_path == Path("/abs/aoi.geojson")

    write_manifest(tmp_path / "copy.csv", rows)
    assert load_manifest(tmp_path / "copy.csv") == rows
    assert "b/vv.tif" in (tmp_path / "copy.csv").read_text()

    (tmp_path / "m.yaml").write_text(
        "- {date: 2021-03-04, vv_path: a/vv.tif, vh_path: a/vh.tif, dem_path: dem.tif, aoi_path: aoi.geojson}\n"
    )
    (row,) = load_manifest(tmp_path / "m.yaml")
    assert row.dem_path == tmp_path.resolve() / "dem.tif"

    (tmp_path / "empty.csv").write_text("date,vv_path,vh_path,dem_path,aoi_path\n")
    assert load_manifest(tmp_path / "empty.csv") == []
    (tmp_path / "blank.csv").write_text("")
    assert load_manifest(tmp_path / "blank.csv") == []

    (tmp_path / "dup.csv").write_text(
        "date,vv_path,vh_path,dem_path,aoi_path\n2021-03-04,a,b,c,d\n2021-03-04,e,f,g,h\n"
    )
    with pytest.raises(ManifestError, match="duplicate"):
        load_manifest(tmp_path / "dup.csv")
    (tmp_path / "cols.csv").write_text("date,vv_path\n2021-03-04,a\n")
    with pytest.raises(ManifestError, match="missing columns"):
        load_manifest(tmp_path / "cols.csv")
    with pytest.raises(ManifestError):
        load_manifest(tmp_path / "nonexistent.csv")


def _unittest_append_manifest_row(tmp_path: Path) -> None:
    row = ManifestRow(datetime.date(2020, 1, 2), *(tmp_path / n for n in ("vv.tif", "vh.tif", "dem.tif", "a.geojson")))
    append_manifest_row(tmp_path / "m.csv", row)
    append_manifest_row(tmp_path / "m.csv", dataclasses.replace(row, date=datetime.date(2020, 1, 3)))
    lines = (tmp_path / "m.csv").read_text().splitlines()
    assert lines == [
        "date,vv_path,vh_path,dem_path,aoi_path",
        "2020-01-02,vv.tif,vh.tif,dem.tif,a.geojson",
        "2020-01-03,vv.tif,vh.tif,dem.tif,a.geojson",
    ]
    odd = dataclasses.replace(row, date=datetime.date(2020, 1, 4), vv_path=tmp_path / "a,b" / "vv.tif")
    append_manifest_row(tmp_path / "m.csv", odd)
    loaded = load_manifest(tmp_path / "m.csv")
    assert [r.date.day for r in loaded] == [2, 3, 4]
    assert loaded[-1].vv_path == tmp_path.resolve() / "a,b" / "vv.tif"

    (tmp_path / "blank.csv").write_text("")
    append_manifest_row(tmp_path / "blank.csv", row)
    assert (tmp_path / "blank.csv").read_text().startswith("date,vv_path,")
