#include "medlda/svm.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <vector>

#include <Eigen/QR>

#include "medlda/error.hpp"

namespace medlda::svm {
namespace {

double eps_hinge(double residual, double epsilon) { return std::max(0.0, std::abs(residual) - epsilon); }

// Projected-gradient KKT residual of the signed coefficient c in [-C, C]
// with dual gradient g = y - w.x (mu sees g - eps, mu* sees -g - eps).
double svr_violation(double c, double g, double cap, double epsilon) {
  const double up = g - epsilon;     // d/d mu
  const double down = -g - epsilon;  // d/d mu*
  if (c > 0.0) {
    return c < cap ? std::abs(up) : std::max(0.0, -up);
  }
  if (c < 0.0) {
    return c > -cap ? std::abs(down) : std::max(0.0, -down);
  }
  return std::max({0.0, up, down});
}

double soft_threshold(double v, double t) {
  if (v > t) return v - t;
  if (v < -t) return v + t;
  return 0.0;
}

// Active-set step on the coordinates strictly inside (0, C) or (-C, 0),
// signs held fixed. On that face the dual is rhs.c - 1/2 c^T G c. If rhs has
// a component r in the null space of G the dual grows linearly along r;
// otherwise the least-squares point maximizes it. Either way the move stops
// at the first coordinate reaching 0 or the box, which then leaves the face.
// Every move raises the dual.
void free_subspace_step(const SvrInstance& inst, Vector& coef) {
  const double cap = inst.c;
  std::vector<int> free;
  for (int d = 0; d < inst.size(); ++d) {
    if (coef(d) != 0.0 && std::abs(coef(d)) < cap) free.push_back(d);
  }
  const int rounds = 2 * static_cast<int>(free.size()) + 2;
  for (int round = 0; round < rounds && !free.empty(); ++round) {
    const auto f = static_cast<Eigen::Index>(free.size());
    RowMatrix xf(f, inst.dim());
    Vector cf(f);
    for (Eigen::Index i = 0; i < f; ++i) {
      xf.row(i) = inst.x.row(free[static_cast<std::size_t>(i)]);
      cf(i) = coef(free[static_cast<std::size_t>(i)]);
    }
    const Vector w_fixed = inst.x.transpose() * coef - xf.transpose() * cf;
    Vector rhs(f);
    for (Eigen::Index i = 0; i < f; ++i) {
      const int d = free[static_cast<std::size_t>(i)];
      rhs(i) = inst.y(d) - (cf(i) > 0.0 ? inst.epsilon : -inst.epsilon) - inst.x.row(d).dot(w_fixed);
    }
    const Matrix gram = xf * xf.transpose();
    const Vector target = gram.completeOrthogonalDecomposition().solve(rhs);
    if (!target.allFinite()) return;
    const Vector null_part = rhs - gram * target;
    const bool unbounded = null_part.norm() > 1e-10 * std::max(1.0, rhs.norm());
    const Vector dir = unbounded ? null_part : Vector(target - cf);

    double t = unbounded ? std::numeric_limits<double>::infinity() : 1.0;
    Eigen::Index hit = -1;
    for (Eigen::Index i = 0; i < f; ++i) {
      if (dir(i) == 0.0) continue;
      const double limit = cf(i) > 0.0 ? (dir(i) > 0.0 ? cap - cf(i) : cf(i))
                                       : (dir(i) < 0.0 ? cap + cf(i) : -cf(i));
      const double ti = limit / std::abs(dir(i));
      if (ti < t) {
        t = ti;
        hit = i;
      }
    }
    if (!std::isfinite(t) || !(t > 0.0)) return;
    for (Eigen::Index i = 0; i < f; ++i) {
      coef(free[static_cast<std::size_t>(i)]) = std::clamp(cf(i) + t * dir(i), -cap, cap);
    }
    if (hit < 0) return;  // reached the face maximizer
    const int d = free[static_cast<std::size_t>(hit)];
    coef(d) = std::abs(coef(d)) * 2.0 > cap ? std::copysign(cap, cf(hit)) : 0.0;
    free.erase(free.begin() + hit);
  }
}

// Face step for the multi-class dual, written as the minimization of
// q(mu) = 1/2 |A mu|^2 - 1.mu. The face keeps every positive multiplier free,
// pins the zero ones, and turns each exhausted budget sum_y mu_d(y) = C into
// an equality. On the face it moves along the projected Newton direction, or
// along a direction where q falls linearly when the face is unbounded, up to
// the first multiplier reaching zero or budget reaching C. Returns true when
// it changed mu.
bool mc_face_step(const McSvmInstance& inst, RowMatrix& mu) {
  const int n = inst.size();
  const int m = inst.classes;
  const int k = inst.topics();
  const double cap = inst.c;
  bool changed = false;
  struct Slot {
    int d;
    int y;
  };
  std::vector<Slot> free;
  std::vector<char> tight(static_cast<std::size_t>(n), 0);
  for (int d = 0; d < n; ++d) {
    const int yd = inst.labels[static_cast<std::size_t>(d)];
    double used = 0.0;
    for (int y = 0; y < m; ++y) {
      if (y != yd && mu(d, y) > 0.0) {
        free.push_back({d, y});
        used += mu(d, y);
      }
    }
    if (used >= cap * (1.0 - 1e-14) && used > 0.0) tight[static_cast<std::size_t>(d)] = 1;
  }
  const int rounds = 2 * static_cast<int>(free.size()) + 2;
  for (int round = 0; round < rounds && !free.empty(); ++round) {
    const auto f = static_cast<Eigen::Index>(free.size());
    Matrix a = Matrix::Zero(static_cast<Eigen::Index>(m) * k, f);
    Vector x(f);
    for (Eigen::Index i = 0; i < f; ++i) {
      const auto [d, y] = free[static_cast<std::size_t>(i)];
      const int yd = inst.labels[static_cast<std::size_t>(d)];
      a.block(static_cast<Eigen::Index>(yd) * k, i, k, 1) = inst.features.row(d).transpose();
      a.block(static_cast<Eigen::Index>(y) * k, i, k, 1) = -inst.features.row(d).transpose();
      x(i) = mu(d, y);
    }
    // Projector onto the null space of the tight budget rows.
    Matrix proj = Matrix::Identity(f, f);
    for (Eigen::Index i = 0; i < f;) {
      const int d = free[static_cast<std::size_t>(i)].d;
      Eigen::Index j = i;
      while (j < f && free[static_cast<std::size_t>(j)].d == d) ++j;
      if (tight[static_cast<std::size_t>(d)]) proj.block(i, i, j - i, j - i).array() -= 1.0 / static_cast<double>(j - i);
      i = j;
    }
    const Matrix gram = a.transpose() * a;
    const Matrix hess = proj * gram * proj;
    const Vector grad = proj * (gram * x - Vector::Ones(f));
    const Vector newton = hess.completeOrthogonalDecomposition().solve(grad);
    if (!newton.allFinite()) return changed;
    const Vector residual = grad - hess * newton;
    const bool unbounded = residual.norm() > 1e-10 * std::max(1.0, grad.norm());
    const Vector dir = unbounded ? Vector(-residual) : Vector(-newton);

    double t = unbounded ? std::numeric_limits<double>::infinity() : 1.0;
    Eigen::Index hit_slot = -1;
    int hit_doc = -1;
    for (Eigen::Index i = 0; i < f; ++i) {
      if (dir(i) < 0.0 && x(i) / -dir(i) < t) {
        t = x(i) / -dir(i);
        hit_slot = i;
        hit_doc = -1;
      }
    }
    for (Eigen::Index i = 0; i < f;) {
      const int d = free[static_cast<std::size_t>(i)].d;
      Eigen::Index j = i;
      double used = 0.0;
      double rate = 0.0;
      while (j < f && free[static_cast<std::size_t>(j)].d == d) {
        used += x(j);
        rate += dir(j);
        ++j;
      }
      if (!tight[static_cast<std::size_t>(d)] && rate > 0.0 && (cap - used) / rate < t) {
        t = std::max(0.0, cap - used) / rate;
        hit_slot = -1;
        hit_doc = d;
      }
      i = j;
    }
    if (!std::isfinite(t) || !(t > 0.0)) return changed;
    const Vector next = x + t * dir;
    auto q = [&](const Vector& v) { return 0.5 * (a * v).squaredNorm() - v.sum(); };
    if (!(q(next) < q(x))) return changed;
    for (Eigen::Index i = 0; i < f; ++i) {
      const auto [d, y] = free[static_cast<std::size_t>(i)];
      mu(d, y) = std::max(0.0, next(i));
    }
    changed = true;
    if (hit_slot >= 0) {
      const auto [d, y] = free[static_cast<std::size_t>(hit_slot)];
      mu(d, y) = 0.0;
      free.erase(free.begin() + hit_slot);
    } else if (hit_doc >= 0) {
      // Snap the budget to exactly C.
      const int yd = inst.labels[static_cast<std::size_t>(hit_doc)];
      double used = 0.0;
      for (int y = 0; y < m; ++y) {
        if (y != yd) used += mu(hit_doc, y);
      }
      if (used > 0.0) {
        for (int y = 0; y < m; ++y) {
          if (y != yd) mu(hit_doc, y) *= cap / used;
        }
      }
      tight[static_cast<std::size_t>(hit_doc)] = 1;
    } else {
      return changed;  // reached the face minimizer
    }
  }
  return changed;
}

}  // namespace

void SvrInstance::validate() const {
  if (x.rows() < 1) throw ValidationError("SVR instance needs at least one point");
  if (y.size() != x.rows()) throw ValidationError("SVR instance: one response per point required");
  if (!(c > 0.0) || !std::isfinite(c)) throw ValidationError("SVR: C must be positive");
  if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) throw ValidationError("SVR: epsilon must be >= 0");
  if (!x.allFinite() || !y.allFinite()) throw ValidationError("SVR instance has non-finite entries");
}

double svr_primal_objective(const SvrInstance& inst, const Vector& weights) {
  double loss = 0.0;
  for (int d = 0; d < inst.size(); ++d) {
    loss += eps_hinge(inst.y(d) - inst.x.row(d).dot(weights), inst.epsilon);
  }
  return 0.5 * weights.squaredNorm() + inst.c * loss;
}

double svr_dual_objective(const SvrInstance& inst, const Vector& mu, const Vector& mu_star) {
  const Vector coef = mu - mu_star;
  const Vector w = inst.x.transpose() * coef;
  return -0.5 * w.squaredNorm() - inst.epsilon * (mu.sum() + mu_star.sum()) + inst.y.dot(coef);
}

SvrSolution solve_svr(const SvrInstance& inst, const SolverOptions& options,
                      const std::optional<Vector>& warm_start) {
  inst.validate();
  const int n = inst.size();
  const double cap = inst.c;
  Vector coef = Vector::Zero(n);
  if (warm_start) {
    if (warm_start->size() != n) throw ValidationError("SVR warm start has the wrong length");
    coef = warm_start->cwiseMax(-cap).cwiseMin(cap);
  }
  Vector q_diag(n);
  for (int d = 0; d < n; ++d) q_diag(d) = inst.x.row(d).squaredNorm();

  Vector w = inst.x.transpose() * coef;
  Vector grad(n);

  SvrSolution sol;
  const long max_updates = options.max_passes * n;
  long updates = 0;
  while (true) {
    // Once per pass: refresh w from scratch and take the exact step on the
    // free coordinates.
    if (updates % n == 0) {
      if (updates > 0) free_subspace_step(inst, coef);
      w = inst.x.transpose() * coef;
    }
    grad = inst.y - inst.x * w;
    int worst = -1;
    double worst_v = 0.0;
    for (int d = 0; d < n; ++d) {
      const double v = svr_violation(coef(d), grad(d), cap, inst.epsilon);
      if (v > worst_v) {
        worst_v = v;
        worst = d;
      }
    }
    if (worst_v <= options.tolerance) {
      const Vector mu = coef.cwiseMax(0.0);
      const Vector mu_star = (-coef).cwiseMax(0.0);
      const double primal = svr_primal_objective(inst, w);
      const double dual = svr_dual_objective(inst, mu, mu_star);
      const double scale = std::max(1.0, std::abs(primal));
      if (primal - dual <= options.tolerance * scale || worst_v == 0.0) {
        sol.converged = true;
        break;
      }
      // Within the residual tolerance but the gap is still open: keep
      // polishing the worst coordinate.
      if (worst < 0) {
        sol.converged = true;
        break;
      }
    }
    if (updates >= max_updates) break;

    const int d = worst;
    double next;
    if (q_diag(d) > 0.0) {
      next = soft_threshold(grad(d) + q_diag(d) * coef(d), inst.epsilon) / q_diag(d);
    } else {
      next = grad(d) > inst.epsilon ? cap : (grad(d) < -inst.epsilon ? -cap : 0.0);
    }
    next = std::clamp(next, -cap, cap);
    const double delta = next - coef(d);
    coef(d) = next;
    w += delta * inst.x.row(d).transpose();
    ++updates;
  }

  w = inst.x.transpose() * coef;
  sol.weights = w;
  sol.mu = coef.cwiseMax(0.0);
  sol.mu_star = (-coef).cwiseMax(0.0);
  sol.primal_objective = svr_primal_objective(inst, w);
  sol.dual_objective = svr_dual_objective(inst, sol.mu, sol.mu_star);
  sol.passes = (updates + n - 1) / n;
  return sol;
}

void McSvmInstance::validate() const {
  if (classes < 2) throw ValidationError("multi-class SVM needs at least 2 classes");
  if (!(c >= 0.0) || !std::isfinite(c)) throw ValidationError("multi-class SVM: C must be >= 0");
  if (static_cast<Eigen::Index>(labels.size()) != features.rows()) {
    throw ValidationError("multi-class SVM: one label per document required");
  }
  for (int y : labels) {
    if (y < 0 || y >= classes) throw ValidationError("multi-class SVM: label out of range");
  }
  if (!features.allFinite()) throw ValidationError("multi-class SVM: non-finite features");
}

Vector feature_vector(int label, const Vector& zbar, int classes) {
  if (label < 0 || label >= classes) {
    throw ValidationError("class " + std::to_string(label + 1) + " out of range 1.." +
                          std::to_string(classes));
  }
  const auto k = zbar.size();
  Vector f = Vector::Zero(classes * k);
  f.segment(label * k, k) = zbar;
  return f;
}

Vector mc_lambda_from_duals(const McSvmInstance& inst, const RowMatrix& mu) {
  const int k = inst.topics();
  Vector lambda = Vector::Zero(static_cast<Eigen::Index>(inst.classes) * k);
  for (int d = 0; d < inst.size(); ++d) {
    const int yd = inst.labels[static_cast<std::size_t>(d)];
    for (int y = 0; y < inst.classes; ++y) {
      if (y == yd || mu(d, y) == 0.0) continue;
      lambda.segment(yd * k, k) += mu(d, y) * inst.features.row(d).transpose();
      lambda.segment(y * k, k) -= mu(d, y) * inst.features.row(d).transpose();
    }
  }
  return lambda;
}

namespace {

// Loss-augmented score 1 - (lambda_{y_d} - lambda_y).z for every wrong label.
double mc_hinge(const McSvmInstance& inst, const Vector& lambda, int d) {
  const int k = inst.topics();
  const int yd = inst.labels[static_cast<std::size_t>(d)];
  const auto z = inst.features.row(d).transpose();
  const double own = lambda.segment(yd * k, k).dot(z);
  double worst = 0.0;
  for (int y = 0; y < inst.classes; ++y) {
    if (y == yd) continue;
    worst = std::max(worst, 1.0 - (own - lambda.segment(y * k, k).dot(z)));
  }
  return worst;
}

}  // namespace

double mc_primal_objective(const McSvmInstance& inst, const Vector& lambda) {
  double loss = 0.0;
  for (int d = 0; d < inst.size(); ++d) loss += mc_hinge(inst, lambda, d);
  return 0.5 * lambda.squaredNorm() + inst.c * loss;
}

double mc_dual_objective(const McSvmInstance& inst, const RowMatrix& mu) {
  double total = 0.0;
  for (int d = 0; d < inst.size(); ++d) {
    const int yd = inst.labels[static_cast<std::size_t>(d)];
    for (int y = 0; y < inst.classes; ++y) {
      if (y != yd) total += mu(d, y);
    }
  }
  return -0.5 * mc_lambda_from_duals(inst, mu).squaredNorm() + total;
}

McSvmSolution solve_multiclass_svm(const McSvmInstance& inst, const SolverOptions& options,
                                   const std::optional<RowMatrix>& warm_start) {
  inst.validate();
  const int n = inst.size();
  const int m = inst.classes;
  const int k = inst.topics();
  const double cap = inst.c;

  McSvmSolution sol;
  sol.mu = RowMatrix::Zero(n, m);
  if (warm_start && warm_start->rows() == n && warm_start->cols() == m) {
    for (int d = 0; d < n; ++d) {
      const int yd = inst.labels[static_cast<std::size_t>(d)];
      double total = 0.0;
      for (int y = 0; y < m; ++y) {
        if (y == yd) continue;
        sol.mu(d, y) = std::max(0.0, (*warm_start)(d, y));
        total += sol.mu(d, y);
      }
      if (total > cap) {
        if (total > 0.0) sol.mu.row(d) *= cap / total;
      }
      sol.mu(d, yd) = 0.0;
    }
  } else if (warm_start) {
    throw ValidationError("multi-class SVM warm start has the wrong shape");
  }
  Vector lambda = mc_lambda_from_duals(inst, sol.mu);

  Vector grad(m);
  // Gradient of every coordinate of block d; the true-label slot stands for
  // the slack C - sum mu_d and has zero gradient.
  auto block_gradient = [&](int d) {
    const int yd = inst.labels[static_cast<std::size_t>(d)];
    const auto z = inst.features.row(d).transpose();
    const double own = lambda.segment(yd * k, k).dot(z);
    for (int y = 0; y < m; ++y) {
      grad(y) = y == yd ? 0.0 : 1.0 - (own - lambda.segment(y * k, k).dot(z));
    }
  };
  auto slot_value = [&](int d, int y) {
    const int yd = inst.labels[static_cast<std::size_t>(d)];
    if (y != yd) return sol.mu(d, y);
    double used = 0.0;
    for (int j = 0; j < m; ++j) {
      if (j != yd) used += sol.mu(d, j);
    }
    return std::max(0.0, cap - used);
  };
  // Largest gradient minus smallest gradient among slots that can give mass.
  auto block_violation = [&](int d, int& up, int& down) {
    up = 0;
    down = -1;
    for (int y = 0; y < m; ++y) {
      if (grad(y) > grad(up)) up = y;
      if (slot_value(d, y) > 0.0 && (down < 0 || grad(y) < grad(down))) down = y;
    }
    if (down < 0) return 0.0;
    return std::max(0.0, grad(up) - grad(down));
  };

  const int inner_cap = 10 * m;
  for (long pass = 0; pass < options.max_passes; ++pass) {
    double worst = 0.0;
    for (int d = 0; d < n; ++d) {
      const int yd = inst.labels[static_cast<std::size_t>(d)];
      const auto z = inst.features.row(d).transpose();
      const double zz = z.squaredNorm();
      for (int step = 0; step < inner_cap; ++step) {
        block_gradient(d);
        int up = 0;
        int down = 0;
        const double v = block_violation(d, up, down);
        if (step == 0) worst = std::max(worst, v);
        if (v <= 0.1 * options.tolerance || up == down) break;
        const double room = slot_value(d, down);
        double t = zz > 0.0 ? v / (2.0 * zz) : room;
        t = std::min(t, room);
        if (!(t > 0.0)) break;
        if (up != yd) {
          sol.mu(d, up) += t;
          lambda.segment(yd * k, k) += t * z;
          lambda.segment(up * k, k) -= t * z;
        }
        if (down != yd) {
          sol.mu(d, down) = std::max(0.0, sol.mu(d, down) - t);
          lambda.segment(yd * k, k) -= t * z;
          lambda.segment(down * k, k) += t * z;
        }
      }
    }
    mc_face_step(inst, sol.mu);
    // Refresh from the multipliers to avoid drift.
    lambda = mc_lambda_from_duals(inst, sol.mu);
    sol.dual_trace.push_back(-0.5 * lambda.squaredNorm() + [&] {
      double s = 0.0;
      for (int d = 0; d < n; ++d) {
        for (int y = 0; y < m; ++y) {
          if (y != inst.labels[static_cast<std::size_t>(d)]) s += sol.mu(d, y);
        }
      }
      return s;
    }());
    sol.passes = pass + 1;
    if (worst <= options.tolerance) {
      const double primal = mc_primal_objective(inst, lambda);
      const double gap = primal - sol.dual_trace.back();
      if (gap <= options.tolerance * std::max(1.0, std::abs(primal)) || worst == 0.0) {
        sol.converged = true;
        break;
      }
    }
  }

  sol.lambda = lambda;
  sol.primal_objective = mc_primal_objective(inst, lambda);
  sol.dual_objective = mc_dual_objective(inst, sol.mu);
  return sol;
}

std::string KktReport::to_text() const {
  char buf[512];
  std::snprintf(buf, sizeof buf,
                "max_primal_violation=%.6e\nmax_complementarity_violation=%.6e\n"
                "duality_gap=%.6e\nprimal_objective=%.17g\ndual_objective=%.17g\n",
                max_primal_violation, max_complementarity_violation, duality_gap,
                primal_objective, dual_objective);
  return buf;
}

KktReport kkt_report(const SvrSolution& solution, const SvrInstance& inst) {
  const int n = inst.size();
  if (solution.mu.size() != n || solution.mu_star.size() != n ||
      solution.weights.size() != inst.dim()) {
    throw ValidationError("KKT report: solution shape does not match instance");
  }
  KktReport r;
  const Vector coef = solution.mu - solution.mu_star;
  const Vector implied = inst.x.transpose() * coef;
  r.max_primal_violation = (solution.weights - implied).cwiseAbs().maxCoeff();
  for (int d = 0; d < n; ++d) {
    const double mu = solution.mu(d);
    const double ms = solution.mu_star(d);
    r.max_primal_violation = std::max({r.max_primal_violation, -mu, mu - inst.c, -ms, ms - inst.c});
    const double pred = inst.x.row(d).dot(solution.weights);
    const double xi = std::max(0.0, inst.y(d) - pred - inst.epsilon);
    const double xi_star = std::max(0.0, pred - inst.y(d) - inst.epsilon);
    const double cs = std::max({std::abs(mu * (inst.epsilon + xi - inst.y(d) + pred)),
                                std::abs(ms * (inst.epsilon + xi_star + inst.y(d) - pred)),
                                std::abs((inst.c - mu) * xi), std::abs((inst.c - ms) * xi_star),
                                std::abs(mu * ms)});
    r.max_complementarity_violation = std::max(r.max_complementarity_violation, cs);
  }
  r.primal_objective = svr_primal_objective(inst, solution.weights);
  r.dual_objective = svr_dual_objective(inst, solution.mu, solution.mu_star);
  r.duality_gap = r.primal_objective - r.dual_objective;
  return r;
}

KktReport kkt_report(const McSvmSolution& solution, const McSvmInstance& inst) {
  const int n = inst.size();
  const int m = inst.classes;
  const int k = inst.topics();
  if (solution.mu.rows() != n || solution.mu.cols() != m ||
      solution.lambda.size() != static_cast<Eigen::Index>(m) * k) {
    throw ValidationError("KKT report: solution shape does not match instance");
  }
  KktReport r;
  const Vector implied = mc_lambda_from_duals(inst, solution.mu);
  r.max_primal_violation = n == 0 ? solution.lambda.cwiseAbs().maxCoeff()
                                  : (solution.lambda - implied).cwiseAbs().maxCoeff();
  if (solution.lambda.size() == 0) r.max_primal_violation = 0.0;
  for (int d = 0; d < n; ++d) {
    const int yd = inst.labels[static_cast<std::size_t>(d)];
    const auto z = inst.features.row(d).transpose();
    const double own = solution.lambda.segment(yd * k, k).dot(z);
    const double xi = mc_hinge(inst, solution.lambda, d);
    double used = 0.0;
    for (int y = 0; y < m; ++y) {
      if (y == yd) continue;
      const double mu = solution.mu(d, y);
      used += mu;
      r.max_primal_violation = std::max(r.max_primal_violation, -mu);
      const double margin = own - solution.lambda.segment(y * k, k).dot(z);
      r.max_complementarity_violation =
          std::max(r.max_complementarity_violation, std::abs(mu * (margin + xi - 1.0)));
    }
    r.max_primal_violation = std::max(r.max_primal_violation, used - inst.c);
    r.max_complementarity_violation =
        std::max(r.max_complementarity_violation, std::abs((inst.c - used) * xi));
  }
  r.primal_objective = mc_primal_objective(inst, solution.lambda);
  r.dual_objective = mc_dual_objective(inst, solution.mu);
  r.duality_gap = r.primal_objective - r.dual_objective;
  return r;
}

}  // namespace medlda::svm
