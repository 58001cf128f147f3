# Copyright (c) 2024 sarlevel contributors
# This software is distributed under the terms of the MIT License.

from __future__ import annotations
import logging
import warnings
from pathlib import Path
from typing import Any
import numpy as np
import rasterio
import rasterio.crs
import rasterio.errors
import simplejson as json  # type: ignore
from ._types import Raster, Polygon, GeoTransform, RasterError


def load_raster(path: str | Path) -> Raster:
    """
    Reads a single-band GeoTIFF. Integer and float32 samples are widened to float64 without loss.
    Files without georeferencing are rejected because every operation depends on the pixel size.
    """
    path = Path(path)
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", rasterio.errors.NotGeoreferencedWarning)
            with rasterio.open(path, "r") as ds:
                if ds.count != 1:
                    raise RasterError(f"{path}: expected a single-band raster, found {ds.count} bands")
                if ds.transform == rasterio.Affine.identity() and not ds.gcps[0]:
                    raise RasterError(f"{path}: the raster has no geotransform")
                transform = GeoTransform.from_affine(ds.transform)
                values = ds.read(1).astype(np.float64)
                nodata = ds.nodata
                crs = ds.crs.to_string() if ds.crs else ""
    except rasterio.errors.RasterioError as ex:
        raise RasterError(f"{path}: cannot read raster: {ex}") from ex
    _logger.debug("Loaded %s: %dx%d nodata=%r crs=%r", path, values.shape[1], values.shape[0], nodata, crs)
    return Raster(values, transform, nodata=nodata, crs=crs)


def write_raster(raster: Raster, path: str | Path) -> None:
    if raster.width == 0 or raster.height == 0:
        raise RasterError(f"Refusing to write an empty {raster.width}x{raster.height} raster")
    path = Path(path)
    profile: dict[str, Any] = {
        "driver": "GTiff",
        "width": raster.width,
        "height": raster.height,
        "count": 1,
        "dtype": "float64",
        "transform": raster.transform.to_affine(),
        "crs": rasterio.crs.CRS.from_string(raster.crs) if raster.crs else None,
        "nodata": raster.nodata,
    }
    try:
        with rasterio.open(path, "w", **profile) as ds:
            ds.write(raster.values, 1)
    except rasterio.errors.RasterioError as ex:
        raise RasterError(f"{path}: cannot write raster: {ex}") from ex
    _logger.debug("Written %r to %s", raster, path)


def load_polygon(path: str | Path) -> Polygon:
    """
    Accepts a GeoJSON Polygon geometry, a Feature with such geometry,
    or a FeatureCollection whose first feature is a Polygon.
    """
    path = Path(path)
    try:
        doc = json.loads(path.read_text(encoding="utf8"))
    except (OSError, ValueError) as ex:
        raise RasterError(f"{path}: cannot read GeoJSON: {ex}") from ex
    return polygon_from_geojson(doc)


def polygon_from_geojson(doc: Any) -> Polygon:
    if isinstance(doc, dict) and doc.get("type") == "FeatureCollection":
        features = doc.get("features") or []
        if not features:
            raise RasterError("GeoJSON FeatureCollection is empty")
        doc = features[0]
    if isinstance(doc, dict) and doc.get("type") == "Feature":
        doc = doc.get("geometry")
    if not isinstance(doc, dict) or doc.get("type") != "Polygon":
        kind = doc.get("type") if isinstance(doc, dict) else type(doc).__name__
        raise RasterError(f"Expected a GeoJSON Polygon, found {kind}")
    try:
        return Polygon.from_rings(*[[(float(x), float(y)) for x, y, *_ in ring] for ring in doc["coordinates"]])
    except (KeyError, TypeError, ValueError) as ex:
        raise RasterError(f"Malformed GeoJSON polygon: {ex}") from ex


def polygon_to_geojson(poly: Polygon) -> dict[str, Any]:
    return {
        "type": "Feature",
        "properties": {},
        "geometry": {"type": "Polygon", "coordinates": [[list(v) for v in ring] for ring in poly.rings]},
    }


def write_polygon(poly: Polygon, path: str | Path) -> None:
    Path(path).write_text(json.dumps(polygon_to_geojson(poly), indent=2) + "\n", encoding="utf8")


_logger = logging.getLogger(__name__)


def _unittest_raster_io(tmp_path: Path) -> None:
    import pytest

    gt = GeoTransform(500_000.0, 6_000_000.0, 10.0, -10.0)
    ref = Raster(np.array([[1.0, 2.5, -3.0], [-9999.0, 0.125, 7.0]]), gt, nodata=-9999.0, crs="EPSG:32755")
    write_raster(ref, tmp_path / "a.tif")
    assert load_raster(tmp_path / "a.tif") == ref
    with rasterio.open(tmp_path / "a.tif") as ds:
        assert ds.nodata == -9999.0

    plain = Raster(np.arange(6.0).reshape(2, 3), gt)
    write_raster(plain, tmp_path / "b.tif")
    assert load_raster(tmp_path / "b.tif") == plain

    with pytest.raises(RasterError):
        write_raster(Raster(np.zeros((0, 0)), gt), tmp_path / "c.tif")
    with pytest.raises(RasterError):
        write_raster(plain, tmp_path / "no-such-dir" / "d.tif")
    with pytest.raises(RasterError):
        load_raster(tmp_path / "missing.tif")


def _unittest_raster_io_external(tmp_path: Path) -> None:
    import pytest

    # A file produced by the GIS stack directly, int16 samples, must load in row-major order.
    with rasterio.open(
        tmp_path / "ext.tif",
        "w",
        driver="GTiff",
        width=3,
        height=2,
        count=1,
        dtype="int16",
        transform=rasterio.transform.from_origin(100.0, 200.0, 5.0, 5.0),
    ) as ds:
        ds.write(np.array([[1, 2, 3], [4, 5, 6]], dtype=np.int16), 1)
    r = load_raster(tmp_path / "ext.tif")
    assert r.values.ravel().tolist() == [1.0, 2.0, 3.0, 4.0, 5.0, 6.0]
    assert r.transform == GeoTransform(100.0, 200.0, 5.0, -5.0)

    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        with rasterio.open(
            tmp_path / "bare.tif", "w", driver="GTiff", width=2, height=2, count=1, dtype="float32"
        ) as ds:
            ds.write(np.zeros((2, 2), dtype=np.float32), 1)
    with pytest.raises(RasterError):
        load_raster(tmp_path / "bare.tif")

    with rasterio.open(
        tmp_path / "multi.tif",
        "w",
        driver="GTiff",
        width=2,
        height=2,
        count=2,
        dtype="float32",
        transform=rasterio.transform.from_origin(0.0, 2.0, 1.0, 1.0),
    ) as ds:
        ds.write(np.zeros((2, 2, 2), dtype=np.float32))
    with pytest.raises(RasterError):
        load_raster(tmp_path / "multi.tif")


def _unittest_polygon_io(tmp_path: Path) -> None:
    import pytest

    poly = Polygon.rectangle(0.0, 0.0, 10.0, 20.0)
    write_polygon(poly, tmp_path / "aoi.geojson")
    assert load_polygon(tmp_path / "aoi.geojson") == poly
    fc = {"type": "FeatureCollection", "features": [polygon_to_geojson(poly)]}
    assert polygon_from_geojson(fc) == poly
    assert polygon_from_geojson(polygon_to_geojson(poly)["geometry"]) == poly
    with pytest.raises(RasterError):
        polygon_from_geojson({"type": "Point", "coordinates": [0, 0]})
