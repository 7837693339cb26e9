#pragma once

namespace geobench::stats {

// Regularized incomplete beta I_x(a, b), evaluated with the Lentz continued
// fraction; absolute accuracy better than 1e-12 over the supported domain.
double regularized_incomplete_beta(double x, double a, double b);

// CDF of Student's t with dof degrees of freedom.
double student_t_cdf(double t, double dof);

// Two-tailed tail mass P(|T| >= |t|) = I_{v/(t^2+v)}(v/2, 1/2).
double student_t_two_tailed_p(double t, double dof);

}  // namespace geobench::stats
