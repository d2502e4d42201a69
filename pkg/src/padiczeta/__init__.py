"""Exact Igusa local zeta functions of quadratic polynomials over unramified
p-adic rings, with a generating-function calculus and a counting oracle."""

from .fields import (
    INFINITY,
    ExtValuation,
    FieldDesc,
    RingElem,
    eta,
    is_square_unit,
    pick_nonsquare,
    pick_xi,
    teichmuller,
    trace,
    valuation,
)
from .genfun import (
    AssembledGF,
    CosetCombination,
    CosetTerm,
    ModularGF,
    assemble_gf,
    closed_form_head,
    coset_mul,
    gr_mul,
    head_unimodular,
    hensel_head,
    ig_truncated,
    modular_gf,
    truncated_gf,
)
from .oracle import ValueHistogram, convolve, count_exhaustive, verify_series, zeta_series_oracle
from .quadform import (
    JordanForm,
    PrecisionError,
    QuadPoly,
    UnimodularClass,
    UnsupportedReduction,
    add_forms,
    classify_unimodular,
    invariants,
    jordan_decompose,
    reduce_standard,
)
from .ratfunc import (
    DenominatorShape,
    Poly,
    RationalFunction,
    geometric_unit_ball,
    poincare_from_zeta,
    zeta_from_poincare,
)
from .zeta import (
    ZetaResult,
    head_zeta_odd,
    head_zeta_two,
    reduced_denominator_odd,
    tail_term_odd,
    zeta_odd,
    zeta_of_jordan,
    zeta_two_unramified,
)

__version__ = "0.1.0"
