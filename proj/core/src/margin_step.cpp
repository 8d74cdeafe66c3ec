#include "margin_step.hpp"

#include <algorithm>
#include <cmath>

namespace medlda::detail {
namespace {

Vector tilted(const Vector& base, const Vector& dir, double t) {
  Vector row = base + t * dir;
  softmax_inplace(row);
  return row;
}

}  // namespace

double solve_tilt(const Vector& base, const Vector& dir, double target, double lo, double hi,
                  Vector& row) {
  double t = 0.5 * (lo + hi);
  for (int it = 0; it < 200; ++it) {
    row = tilted(base, dir, t);
    const double score = dir.dot(row);
    const double err = score - target;
    if (err > 0.0) {
      hi = t;
    } else {
      lo = t;
    }
    if (std::abs(err) <= 1e-15 * std::max(1.0, std::abs(target)) || hi - lo <= 1e-15 * std::max(1.0, std::abs(t))) {
      break;
    }
    const double mean = score;
    const double var = (dir.array() - mean).square().matrix().dot(row);
    double next = var > 0.0 ? t - err / var : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    t = next;
  }
  return t;
}

Vector exact_regression_row(const Vector& base, const Vector& dir, double offset, double y,
                            double c, double epsilon) {
  Vector row = base;
  softmax_inplace(row);
  if (!(c > 0.0)) return row;
  const double residual = y - offset - dir.dot(row);
  if (residual > epsilon) {
    // Under-predicting: tilt toward larger predictions, multiplier in (0, C].
    const double target = y - epsilon - offset;
    Vector top = tilted(base, dir, c);
    if (dir.dot(top) <= target) return top;
    solve_tilt(base, dir, target, 0.0, c, row);
  } else if (residual < -epsilon) {
    const double target = y + epsilon - offset;
    Vector bottom = tilted(base, dir, -c);
    if (dir.dot(bottom) >= target) return bottom;
    solve_tilt(base, dir, target, -c, 0.0, row);
  }
  return row;
}

Vector exact_classification_row(const Vector& base, const RowMatrix& directions,
                                const Vector& others, int true_label, double c) {
  const auto m = directions.rows();
  Vector row = base;
  softmax_inplace(row);
  if (!(c > 0.0)) return row;

  // grad_y = 1 - a_y . (others + p): the row's dual gradient; the true-label
  // slot is the budget slack and has gradient 0.
  Vector offsets(m);
  for (Eigen::Index y = 0; y < m; ++y) {
    offsets(y) = y == true_label ? 0.0 : 1.0 - directions.row(y).dot(others);
  }
  auto gradient = [&](const Vector& p, Eigen::Index y) {
    return y == true_label ? 0.0 : offsets(y) - directions.row(y).dot(p);
  };
  bool active = false;
  for (Eigen::Index y = 0; y < m; ++y) active = active || gradient(row, y) > 0.0;
  if (!active) return row;

  Vector mu = Vector::Zero(m);
  mu(true_label) = c;  // slack slot holds the unused budget
  Vector tilt_base = base;
  for (int step = 0; step < 50 * static_cast<int>(m); ++step) {
    Eigen::Index up = 0;
    Eigen::Index down = -1;
    for (Eigen::Index y = 0; y < m; ++y) {
      if (gradient(row, y) > gradient(row, up)) up = y;
      if (mu(y) > 0.0 && (down < 0 || gradient(row, y) < gradient(row, down))) down = y;
    }
    if (down < 0 || up == down || gradient(row, up) - gradient(row, down) <= 1e-13) break;
    const Vector a_up = up == true_label ? Vector::Zero(base.size()) : Vector(directions.row(up).transpose());
    const Vector a_down =
        down == true_label ? Vector::Zero(base.size()) : Vector(directions.row(down).transpose());
    const Vector dir = a_up - a_down;
    const double off_up = up == true_label ? 0.0 : offsets(up);
    const double off_down = down == true_label ? 0.0 : offsets(down);
    const double target = off_up - off_down;
    const double room = mu(down);
    double t;
    Vector far = tilt_base + room * dir;
    softmax_inplace(far);
    if (dir.dot(far) <= target) {
      t = room;
      row = far;
    } else {
      t = solve_tilt(tilt_base, dir, target, 0.0, room, row);
    }
    mu(up) += t;
    mu(down) = std::max(0.0, mu(down) - t);
    tilt_base += t * dir;
  }
  return row;
}

}  // namespace medlda::detail
