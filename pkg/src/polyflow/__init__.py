"""polyflow: holomorphic self-maps of the poly-half-plane fixing the
diagonal, their translation/unipotent flows, Schwarz-defect extremality,
flow averaging, orbit statistics, and rigidity diagnostics."""

from .domains import (Domain, INFINITY, Infinity, Mobius, PolyPoint, cayley,
                      cayley_inv, poincare_dist, polyplane_dist)
from .expr import EvaluationError, ExprParseError, parse_expr
from .maps import (ClassCheckError, ClassReport, HoloMap, MapClass,
                   cayley_conjugate, check_class, conjugate_action,
                   coordinate_map, eval_many, eval_map, linear_map, mean_map,
                   normalize_to_uniform, partials, partials_many, tree_map)
from .schwarz import (BalancedDisk, DefectSample, defect_many, disk_defect,
                      is_extreme_disk, restrict_to_disk, schwarz_defect)
from .dim2 import (ExtremalParam, SchurParam, blend, blend_slope,
                   equivariance_residual, extremal_disk, extremal_halfplane,
                   from_schur_disk, from_schur_halfplane, schur_flow)
from .flow import (Exhaustion, OrbitStats, PeriodicityResult, average,
                   co_metric, default_exhaustion, invariant_target,
                   orbit_stats, periodicity_residual, translate,
                   unipotent_flow, unipotent_subgroup)
from .entire import (EntireMap, entire_from_text, entire_grid, fix_diagonal,
                     free_part, mean_entire, periodic_map, shift_arguments,
                     sup_grid_residual, time_one, translate_entire)
from .rigidity import (CircleSamples, MeanGapCoords, PolarizationReport,
                       Rectangle, abs_identity_residual, from_mean_gaps,
                       gap_domain_contains, poisson_eval, polarization_check,
                       rigidity_residual, to_mean_gaps)
from .catalog import family_from_spec, sample_interior, shipped_families

__version__ = "0.1.0"
