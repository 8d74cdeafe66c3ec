#pragma once

#include "medlda/var_core.hpp"

namespace medlda::detail {

// p(t) = softmax(base + t * dir). The score dir . p(t) is nondecreasing in t
// (its derivative is the variance of dir under p(t)). Finds t in [lo, hi]
// with dir . p(t) = target, given that the target is bracketed, and leaves
// p(t) in `row`.
double solve_tilt(const Vector& base, const Vector& dir, double target, double lo, double hi,
                  Vector& row);

// Exact minimizer over one phi row of
//   <-base, p> + sum p log p + C * eps-hinge(y - offset - dir . p)
// where dir = E[eta] / N and offset = E[eta] . others / N.
Vector exact_regression_row(const Vector& base, const Vector& dir, double offset, double y,
                            double c, double epsilon);

// Exact minimizer over one phi row of
//   <-base, p> + sum p log p + C * max(0, max_{y != y_d} 1 - a_y . (others + p))
// where row y of `directions` is a_y = (lambda_{y_d} - lambda_y) / N (row y_d
// is ignored). Solved through the row's small dual over the capped simplex.
Vector exact_classification_row(const Vector& base, const RowMatrix& directions,
                                const Vector& others, int true_label, double c);

}  // namespace medlda::detail
