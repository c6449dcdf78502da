"""stlab: numerical laboratory for Sato-Tate statistics of parametric
elliptic-curve families."""

from .family import (
    CurveInstance,
    FamilyPoly,
    build_family,
    check_nondeg_global,
    check_nondeg_mod_p,
    delta_at,
    fingerprint,
    fingerprint_hex,
    good_reduction,
    reduce_at,
)
from .sato_tate import AngleSample, Interval, mu_st, st_cdf, star_discrepancy
from .traces import TraceRecord, angle, angle_sample, batch_traces, count_points_naive, trace

__version__ = "0.1.0"
