"""Exact rational tools for arithmetic on Cantor sets.

Sums, products and quotients of self-similar and Moran Cantor sets are
handled with interval unions over :class:`fractions.Fraction`, symbolic
expressions with certified derivative bounds, and checkers that decide
whether a sufficient condition for ``f(K_1, ..., K_d)`` being an interval
(or a finite union of intervals) holds.
"""

from .checkers import (
    INCONCLUSIVE,
    PROVED,
    THEOREM_IDS,
    Verdict,
    check_cor_arithmetic_two,
    check_cor_astels_ext,
    check_cor_interval_two,
    check_cor_multiplication,
    check_cor_sum,
    check_thm_arithmetic_sss,
    check_thm_cantor,
    check_thm_intersection,
    check_thm_main,
    check_thm_ratio_two,
)
from .errors import BudgetExceeded, DivisionDomainError, DomainError, ExprSyntaxError, SpecFileError
from .expr import differentiate, eval_interval, eval_point, parse_expr, partial_bounds, to_text
from .fractal import (
    AffineMap,
    MoranSystem,
    SelfSimilarSystem,
    bridges,
    cylinder,
    kappa,
    lambda_system,
    level_set,
    middle_third,
    moran_two_branch,
    reflect,
    s_min,
    thickness,
)
from .images import ImageResult, image_exact, image_outer, outer_measure_sequence, quotient_closed_form, scaled_intersection
from .numeric import Enclosure, Interval, IntervalUnion, constant_enclosure, root_enclosure, union_normalize
from .specfile import dumps, load_set_spec, parse_set_spec

__version__ = "0.1.0"
