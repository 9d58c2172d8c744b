"""Calculus over finite-dimensional real associative unital algebras.

Construct an algebra from structure constants, classify its elements, test
functions for differentiability over the algebra, generate the attached
first- and second-order PDE systems, expand in Taylor series, integrate
along curves and probe deleted difference quotients.
"""

from .algebra import (
    AElement,
    Algebra,
    Classification,
    Kind,
    classify,
    find_invertible_basis,
    invert,
    make_algebra,
    minimal_polynomial_witness,
    mul,
    norm,
    number_map,
    regrep,
    submult_bound,
)
from .calculus import (
    ConjugateFrame,
    DiffReport,
    adiff_test,
    conjugate_coords,
    conjugate_frame,
    derivative,
    higher_derivative,
    jacobian_fd,
    jacobian_sym,
    taylor_eval,
    wirtinger_apply,
)
from .diffquot import D2Options, D2Probe, d2_probe, deleted_quotient
from .eqgen import EquationSystem, check_residual, gen_cr, gen_laplace, gen_laplace_k, render_system
from .errors import AcalcError
from .expr import ExprFn, conjugate_fn, exprfn_mul, identity_fn, parse, poly_fn
from .fixtures import (
    bundled_algebras,
    cyclic_algebra,
    direct_product,
    get_algebra,
    load_algebra,
    wave_algebra,
)
from .integrate import (
    ParametricCurve,
    Polyline,
    antiderivative_probe,
    integrate_curve,
    load_curve,
    loop_integral,
    ml_bound_check,
)
from .isomorph import (
    LinMap,
    dalembert_solution,
    pairs_to_hyperbolic,
    transfer_function,
    verify_isomorphism,
    wave_isomorphism,
)

__version__ = "0.1.0"
