# Copyright (c) 2024 sarlevel contributors
# This software is distributed under the terms of the MIT License.

"""
Raster and vector primitives. All inputs of a scene are expected to be in one projected CRS with meter units;
reprojection is out of scope.
"""

from ._types import GeoTransform as GeoTransform, Grid as Grid
from ._types import Raster as Raster, RegionMask as RegionMask, Polygon as Polygon, RegionStats as RegionStats
from ._types import RasterError as RasterError, GridMismatchError as GridMismatchError
from ._types import EmptyRegionError as EmptyRegionError, CRSMismatchError as CRSMismatchError
from ._types import ensure_same_grid as ensure_same_grid

from ._io import load_raster as load_raster, write_raster as write_raster
from ._io import load_polygon as load_polygon, write_polygon as write_polygon
from ._io import polygon_from_geojson as polygon_from_geojson, polygon_to_geojson as polygon_to_geojson

from ._ops import rasterize_polygon as rasterize_polygon, dilate_mask as dilate_mask
from ._ops import clip_stats as clip_stats, align_to as align_to, Resampling as Resampling
