"""New and old meromorphic 1-forms on P^1 and hyperelliptic curves.

A form is *old* when it is the pullback of a form on P^1 along a non-trivial
rational map, *new* otherwise.  The package classifies forms, decides
new/old with certificates, checks Hurwitz realizability of branch data and
builds explicit families of new forms.
"""

from .arith import Poly, RatFunc, antiderivative_without_logs, partial_fractions, rank_over_q
from .classify import EXACT, EXPONENTIAL, GENERAL, FormType, classify_type, exact_is_new, exponential_witness
from .curves import (
    CURVE_INF,
    CurveFormSpec,
    CurvePoint,
    DSet,
    HyperCurve,
    PrincipalPartForm,
    check_dim_count_lemma,
    check_main_lemma,
    check_simple_pole_theorem,
    coefficient_rank,
    construct_family,
    curve_form_divisor,
    d_set,
    omega_D_basis,
    ordinary,
    special,
)
from .decider import Decision, PullbackCandidate, decide, enumerate_candidates, synthesize_witness
from .divisor import (
    INF,
    AbstractForm,
    Divisor,
    ExplicitForm,
    PointP1,
    ResidueVal,
    pullback_form,
    ramification_profile,
    verify_pullback_laws,
)
from .errors import MeroformsError
from .hurwitz import BranchData, constellation_search, enumerate_branch_data, oracle_verdict, realizable
from .parse import parse_equation, parse_expr, parse_form, parse_input

__version__ = "0.1.0"
