"""loopgas: uniform random rooted 4-regular planar maps and their loop gas.

Exact O(p) sampling via the blossom-tree closure bijection, exhaustive
small-size enumeration as the oracle layer, a reproducible Monte Carlo
harness for the mean loop count, and the asymptotic growth-law machinery
(gravity exponent, candidate central charges, weighted fits).
"""

__version__ = "0.1.0"

from .errors import (CapacityError, ConditioningError, DomainError,
                     LoopgasError, SeriesError, SizeError, StatisticsError,
                     StructuralError, UnderdeterminedError, WeightError)
from .rng import Rng, derive_key
from .maps import (LEG, Dart, MapDiagnostics, QuadMap, canonical_code,
                   face_count, read_maps, validate, write_maps)
from .sampler import (BlossomTree, CompleteBinaryTree, PartialClosure,
                      attach_buds, choose_root, closure, root_both_ways,
                      sample_binary_tree, sample_map)
from .strands import (StrandDecomposition, count_loops, gauss_code,
                      gauss_code_text, strand_decomposition,
                      strand_successor)
from .enumeration import (ExactCount, asymptotic_ratio, count_blossom_trees,
                          count_quartic_maps, closure_census,
                          enumerate_maps_brute, exact_counts,
                          exact_mean_loops)
from .stats import (Estimate, USeries, monte_carlo, size_sweep, u_series)
from .asymptotics import (FitResult, ModelId, central_charge, fit_loop_growth,
                          fit_scan, gamma_exponent, gamma_prime_prediction,
                          load_table1)

__all__ = [
    "__version__", "Rng", "derive_key",
    "LEG", "Dart", "MapDiagnostics", "QuadMap", "canonical_code",
    "face_count", "read_maps", "validate", "write_maps",
    "BlossomTree", "CompleteBinaryTree", "PartialClosure", "attach_buds",
    "choose_root", "closure", "root_both_ways", "sample_binary_tree",
    "sample_map",
    "StrandDecomposition", "count_loops", "gauss_code", "gauss_code_text",
    "strand_decomposition", "strand_successor",
    "ExactCount", "asymptotic_ratio", "count_blossom_trees",
    "count_quartic_maps", "closure_census", "enumerate_maps_brute",
    "exact_counts", "exact_mean_loops",
    "Estimate", "USeries", "monte_carlo", "size_sweep", "u_series",
    "FitResult", "ModelId", "central_charge", "fit_loop_growth", "fit_scan",
    "gamma_exponent", "gamma_prime_prediction", "load_table1",
    "LoopgasError", "SizeError", "StructuralError", "CapacityError",
    "StatisticsError", "SeriesError", "DomainError", "UnderdeterminedError",
    "WeightError", "ConditioningError",
]
