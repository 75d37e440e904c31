#pragma once

#include <cstddef>

namespace wmgf {

/// Regularized incomplete beta I_x(a, b), continued-fraction evaluation
/// (modified Lentz), absolute accuracy ~1e-14 for moderate a, b.
double regularized_incomplete_beta(double a, double b, double x);

/// Two-sided p-value of a t statistic with dof degrees of freedom:
/// p = I_{dof/(dof+t^2)}(dof/2, 1/2). Infinite t maps to p = 0.
double t_two_sided_p(double t, double dof);

} // namespace wmgf
