"""Numerics for the little q-Bessel function family.

q-shifted factorials, a basic hypergeometric series engine, the related
orthogonal-polynomial zoo, and a harness that numerically certifies the
family's addition formula, product formula, kernel positivity/symmetry,
limit transitions, and bounds with controlled truncation error.
"""
from .errors import (BranchError, BudgetExceeded, DivergenceError, DomainError,
                     NegativeRadicand, Overflow, PoleError, QFunctionError,
                     ZeroDivisor)
from .qcore import (INFINITY, CompensatedSum, QBase, TruncationPolicy,
                    DEFAULT_POLICY, qpochhammer, qpochhammer_ex,
                    qpochhammer_multi, qpoch_qexp, qpoch_qexp_signed,
                    qpoch_inf_qexp)
from .hyperq import (PhiSpec, SeriesResult, eval_phi, phi11, phi11_shifted,
                     phi11_weighted)
from .qspecial import (affine_q_krawtchouk, affine_q_krawtchouk_int,
                       bessel_j_qexp, big_q_bessel, c_addition,
                       c_addition_general, c_norm, jacobi_orthogonality_rhs,
                       krawtchouk_hat, little_q_bessel_J, little_q_bessel_j,
                       little_q_jacobi, little_q_jacobi_std, r_poly)
from .identities import (DEFAULT_TOL, IdentityId, IdentityReport, KernelTable,
                         KernelValue, LimitReport, check_identity,
                         kernel_delta, kernel_symmetry_residual, kernel_table,
                         kernel_weighted, parse_identity, product_expand,
                         run_limit_check, addition_lhs, addition_rhs)

__version__ = "0.1.0"
