# Copyright (c) 2024 sarlevel contributors
# This software is distributed under the terms of the MIT License.

"""
Water level estimation: the shoreline fitness of a candidate level and the coarse-to-fine search maximizing it.
"""

from ._config import EstimatorConfig as EstimatorConfig, ConfigError as ConfigError

from ._search import Evaluation as Evaluation, Objective as Objective
from ._search import SearchIteration as SearchIteration, FitnessTrace as FitnessTrace, SearchError as SearchError
from ._search import linspace as linspace, iteration_bound as iteration_bound, search as search

from ._fitness import fitness as fitness, evaluate_level as evaluate_level
from ._fitness import Prepared as Prepared, prepare as prepare, ShorelineFitness as ShorelineFitness

from ._pipeline import EstimateResult as EstimateResult
from ._pipeline import estimate_level as estimate_level, estimate_level_otsu as estimate_level_otsu
