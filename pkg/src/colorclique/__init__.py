"""Few-color connectivity, random Cayley generating sets and exact cliques."""

from ._kernels import USING_NUMBA
from .groups import (DilationOrbit, Element, GroupSpec, SignClassPartition,
                     dilation_orbits, find_scalar_of_order, format_group,
                     lines_through_origin, parse_group, sign_classes)
from .coloring import (EdgeColoring, EntangledGraph, bipartite_product_coloring,
                       colors_within, difference_coloring, entangle,
                       load_coloring, properize, rainbow_coloring,
                       sample_entangled, split_large_classes)
from .fewcolor import (BallGrowthResult, CoalesceResult, KlogkResult, SpanTrace,
                       TreeCertificate, ball_growth, coalesce, efficient_tree,
                       expand_component, greedy_span, hard_instance,
                       klogk_growth, rich_subset, robust_color_count, span_from,
                       spanning_tree)
from .cayley import (CayleyColoring, SymmetricSet, build_cayley, cayley_clique,
                     cayley_independence, monochromatic_subset_probability_bound,
                     rcoloring_largep, rcoloring_smallp, rotational_coloring,
                     sample_coprime6, sample_uniform, sample_z5d,
                     verify_self_complementary)
from .clique import (CliqueCertificate, DenseGraph, brute_force_clique_number,
                     independence_number, is_clique, max_clique,
                     subgroup_clique_bound)
from .additive import (DimensionWitness, SetStats, clique_doubling_check,
                       common_dilate, count_small_doubling, difference_set,
                       dimension_witness, sumset)
from .freiman import (affine_span, compress, compression_inequality_check,
                      fminus_bound_check, initial_segment, is_star_compressed,
                      star_compress)
from .errors import BudgetExceeded, DomainError, StatisticalFailure, StructuralError

__version__ = "0.1.0"
