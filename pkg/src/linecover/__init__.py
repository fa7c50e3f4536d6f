"""Certified covering line families for convex curves with thin slope sets."""
from .boxdim import BoxCountReport, boxes_of_segments, family_report, fit_dimension, slope_cover_check
from .cantor_c1 import CantorCurve, CantorSpec, GapRegistry, cantor_F, cantor_f, gap_image_bound, phi
from .digit_curve import DigitCurve, Parabola, tbinc_F, tbinc_f
from .exactnum import DigitString, Dyadic, Enclosure
from .lines import (
    Line,
    LineFamily,
    SampleSpec,
    Verdict,
    Window,
    build_family,
    clip,
    single_intersection,
    tangent_at,
    verify_code_lipschitz,
)

__version__ = "0.1.0"
