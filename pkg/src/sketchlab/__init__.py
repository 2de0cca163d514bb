"""Streaming sketches (Count-Sketch / Count-Min) with an experiment harness."""

from .backend import active_backend
from .estimators import (EstimateVector, PartitionScheme, estimate_items,
                         estimate_vector, median_of_medians_estimate,
                         point_estimate, point_estimate_countmin,
                         top_k_indices)
from .hashing import HashKey, derive_seed, hash_column, hash_sign, splitmix64
from .metrics import (countmin_comparison, m_value, point_error_experiment,
                      tail_curve_experiment, topk_error, topk_experiment)
from .signals import (SignalSpec, decay_condition_ratio, generate_lognormal,
                      generate_pareto, generate_power_law, pareto_scale,
                      tail_stats)
from .sketch import (COUNT_MIN, COUNT_SKETCH, SketchConfig, SketchTable,
                     new_table, sketch_vector)

__version__ = "0.1.0"
