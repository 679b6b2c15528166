"""Exact values of Dirichlet L-functions at negative integers.

Four independent methods with a shared exact-arithmetic core: chi-Bernoulli
numbers, the complete functional equation, Hecke-Eisenstein constant-term
relations, and Eisenstein series of half-integral weight; all values are
exact elements of Q(zeta_u) and the methods cross-validate to equality.
"""

from .bernoulli import chi_bernoulli, l_via_bernoulli
from .characters import (
    DirichletCharacter,
    character_from_discriminant,
    conductor_and_primitive,
    gauss_sum,
    induce,
    induced_correction,
    parse_character_spec,
    trivial_character,
)
from .exact import Cyclotomic, Rational, bernoulli_number, cyclotomic_round, euler_number
from .funceq import (
    denominator_bound,
    euler_product,
    l_via_functional_equation,
    precision_target,
)
from .lvalues import (
    CoefficientCache,
    CoefficientSet,
    LValueReport,
    l_half_even,
    l_half_odd,
    l_hecke_even,
    l_hecke_odd,
    l_weight_one,
    select_level_even,
    select_level_odd,
)
from .nt import (
    Factorization,
    WeightPolynomial,
    class_number,
    divisor_sum_twisted,
    factorize,
    is_fundamental_discriminant,
    kronecker,
    s_sum,
    s_sum_many,
)
from .qseries import QSeries

__version__ = "0.1.0"
