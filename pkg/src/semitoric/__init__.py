"""Semi-toric moment polygons: exact polygon algebra, DH measures, example systems."""
from .affine import (
    INF,
    NEG_INF,
    IntegralAffineMap,
    Point2,
    TElement,
    UnimodularMatrix,
    VerticalShear,
    apply_affine,
    apply_multi_shear,
    apply_vertical_shear,
    compose_t,
)
from .cuts import (
    Cut,
    SemitoricPolygon,
    canonical_form,
    flip,
    is_free_action,
    make_semitoric,
    orbit,
    t_act,
    validate,
)
from .dh import DHFunction, JumpRecord, compactness_report, jumps, rho_J, rho_K, rho_K_oracle
from .polygon import (
    PiecewiseLinear,
    Polygon,
    area,
    corner_weights,
    horizontal_slice,
    make_polygon,
    vertical_slice,
)

__all__ = [name for name in dir() if not name.startswith("_")]
