#include "bcsfit/optim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "bcsfit/rng.hpp"

namespace bcsfit::optim {
namespace {

constexpr double kArmijo = 1e-4;

bool usable(double v) { return std::isfinite(v); }

double inf_norm(const Eigen::VectorXd& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

struct Point {
  Eigen::VectorXd x;
  double value = -std::numeric_limits<double>::infinity();
  Eigen::VectorXd grad;
};

class Runner {
 public:
  Runner(const Objective& f, const Control& c) : f_(f), c_(c) {}

  bool evaluate(Point& p) {
    ++evaluations_;
    p.grad.resize(p.x.size());
    p.value = f_(p.x, &p.grad);
    return usable(p.value) && p.grad.allFinite();
  }

  // Returns true when the gradient tolerance was reached.
  bool bfgs(Point& cur, int& iterations) {
    const Eigen::Index k = cur.x.size();
    Eigen::MatrixXd h = Eigen::MatrixXd::Identity(k, k);
    bool scaled = false;
    int stalls = 0;
    while (iterations < c_.max_iterations) {
      if (inf_norm(cur.grad) <= c_.gradient_tolerance) return true;
      // Ascent direction for the maximisation problem.
      Eigen::VectorXd dir = h * cur.grad;
      double slope = cur.grad.dot(dir);
      if (!(slope > 0.0)) {
        h.setIdentity();
        dir = cur.grad;
        slope = cur.grad.squaredNorm();
      }
      double step = 1.0;
      if (!scaled) step = std::min(1.0, 1.0 / std::max(1e-300, dir.norm()));
      Point next;
      bool accepted = false;
      for (int tries = 0; tries < 60; ++tries) {
        next.x = cur.x + step * dir;
        if (evaluate(next) && next.value >= cur.value + kArmijo * step * slope) {
          accepted = true;
          break;
        }
        step *= 0.5;
      }
      ++iterations;
      if (!accepted) return false;
      const Eigen::VectorXd s = next.x - cur.x;
      // Secant pair for the minimisation of -f.
      const Eigen::VectorXd y = cur.grad - next.grad;
      const double sy = s.dot(y);
      if (sy > 1e-12 * s.norm() * y.norm()) {
        if (!scaled) {
          h *= sy / y.squaredNorm();
          scaled = true;
        }
        const double rho = 1.0 / sy;
        const Eigen::MatrixXd v = Eigen::MatrixXd::Identity(k, k) - rho * s * y.transpose();
        h = v * h * v.transpose() + rho * s * s.transpose();
      }
      const double change = std::abs(next.value - cur.value);
      cur = std::move(next);
      if (change <= c_.relative_tolerance * (std::abs(cur.value) + c_.relative_tolerance)) {
        if (++stalls >= 2) return inf_norm(cur.grad) <= c_.gradient_tolerance;
      } else {
        stalls = 0;
      }
    }
    return inf_norm(cur.grad) <= c_.gradient_tolerance;
  }

  // Newton iterations on -H where H is the numeric Hessian. Returns true when
  // the gradient tolerance was reached.
  bool polish(Point& cur, int& iterations) {
    const GradientFn grad = [this](const Eigen::VectorXd& x) {
      Eigen::VectorXd g(x.size());
      ++evaluations_;
      const double v = f_(x, &g);
      if (!usable(v)) g.setConstant(std::numeric_limits<double>::quiet_NaN());
      return g;
    };
    for (int it = 0; it < c_.newton_polish_steps; ++it) {
      if (inf_norm(cur.grad) <= c_.gradient_tolerance) return true;
      const Eigen::MatrixXd info = -numeric_hessian(grad, cur.x);
      if (!info.allFinite()) return false;
      Eigen::LLT<Eigen::MatrixXd> llt(info);
      if (llt.info() != Eigen::Success) return false;
      const Eigen::VectorXd dir = llt.solve(cur.grad);
      double step = 1.0;
      bool accepted = false;
      Point next;
      for (int tries = 0; tries < 30; ++tries) {
        next.x = cur.x + step * dir;
        if (evaluate(next) &&
            (next.value >= cur.value - 1e-12 * std::max(1.0, std::abs(cur.value))) &&
            inf_norm(next.grad) < inf_norm(cur.grad)) {
          accepted = true;
          break;
        }
        step *= 0.5;
      }
      ++iterations;
      if (!accepted) return inf_norm(cur.grad) <= c_.gradient_tolerance;
      cur = std::move(next);
    }
    return inf_norm(cur.grad) <= c_.gradient_tolerance;
  }

  int evaluations() const { return evaluations_; }

 private:
  const Objective& f_;
  const Control& c_;
  int evaluations_ = 0;
};

}  // namespace

std::string_view status_name(Status s) {
  switch (s) {
    case Status::converged: return "converged";
    case Status::max_iter: return "max_iter";
    case Status::failed: return "failed";
  }
  return "failed";
}

Result maximize(const Objective& objective, const Eigen::VectorXd& start, const Control& control) {
  Runner runner(objective, control);
  Result result;
  Point best;
  int iterations = 0;
  UniformStream jitter(control.seed);

  for (int attempt = 0; attempt < (control.restart_on_failure ? 2 : 1); ++attempt) {
    Point cur;
    cur.x = start;
    if (attempt > 0) {
      // Jittered restart from the original start.
      for (Eigen::Index j = 0; j < cur.x.size(); ++j) {
        const double u = 2.0 * jitter.next() - 1.0;
        cur.x[j] += control.restart_jitter * u * std::max(1.0, std::abs(cur.x[j]));
      }
      ++result.restarts;
    }
    if (!runner.evaluate(cur)) {
      if (attempt == 0) continue;
      break;
    }
    bool done = runner.bfgs(cur, iterations);
    if (!done) done = runner.polish(cur, iterations);
    if (!usable(best.value) || cur.value > best.value) best = cur;
    if (done) {
      best = cur;
      result.status = Status::converged;
      break;
    }
  }

  result.iterations = iterations;
  result.evaluations = runner.evaluations();
  if (!usable(best.value)) {
    result.x = start;
    result.value = -std::numeric_limits<double>::infinity();
    result.gradient = Eigen::VectorXd::Constant(start.size(), std::numeric_limits<double>::quiet_NaN());
    result.gradient_norm = std::numeric_limits<double>::infinity();
    result.status = Status::failed;
    result.message = "objective not finite at the starting point";
    return result;
  }
  result.x = best.x;
  result.value = best.value;
  result.gradient = best.grad;
  result.gradient_norm = inf_norm(best.grad);
  if (result.status != Status::converged) {
    result.status = iterations >= control.max_iterations ? Status::max_iter : Status::failed;
    std::ostringstream msg;
    msg << "gradient norm " << result.gradient_norm << " above tolerance "
        << control.gradient_tolerance << " after " << iterations << " iterations";
    result.message = msg.str();
  }
  return result;
}

Eigen::MatrixXd numeric_hessian(const GradientFn& gradient, const Eigen::VectorXd& x,
                                double rel_step) {
  const Eigen::Index k = x.size();
  Eigen::MatrixXd h(k, k);
  Eigen::VectorXd xp = x;
  for (Eigen::Index j = 0; j < k; ++j) {
    const double step = rel_step * std::max(1.0, std::abs(x[j]));
    xp[j] = x[j] + step;
    const Eigen::VectorXd gp = gradient(xp);
    xp[j] = x[j] - step;
    const Eigen::VectorXd gm = gradient(xp);
    xp[j] = x[j];
    h.col(j) = (gp - gm) / (2.0 * step);
  }
  return 0.5 * (h + h.transpose());
}

}  // namespace bcsfit::optim
