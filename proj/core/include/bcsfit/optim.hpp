#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>

#include <Eigen/Dense>

namespace bcsfit::optim {

/// Objective to maximise. Returns the value and, when `gradient` is non-null,
/// writes the gradient. Infeasible points return -inf or NaN.
using Objective = std::function<double(const Eigen::VectorXd& x, Eigen::VectorXd* gradient)>;
using GradientFn = std::function<Eigen::VectorXd(const Eigen::VectorXd& x)>;

enum class Status { converged, max_iter, failed };
std::string_view status_name(Status s);

struct Control {
  double gradient_tolerance = 1e-6;  // infinity norm
  double relative_tolerance = 1e-10;
  int max_iterations = 500;
  bool restart_on_failure = true;
  double restart_jitter = 0.1;
  std::uint64_t seed = 0x5eed;
  int newton_polish_steps = 30;
};

struct Result {
  Eigen::VectorXd x;
  double value = 0.0;
  Eigen::VectorXd gradient;
  double gradient_norm = 0.0;
  int iterations = 0;
  int evaluations = 0;
  int restarts = 0;
  Status status = Status::failed;
  std::string message;
};

/// Quasi-Newton (BFGS) ascent with backtracking, followed by Newton steps on a
/// finite-difference Hessian of the gradient until the gradient tolerance is met.
Result maximize(const Objective& objective, const Eigen::VectorXd& start,
                const Control& control = {});

/// Central-difference Jacobian of `gradient`, symmetrised. Step per coordinate
/// is rel_step * max(1, |x_j|).
Eigen::MatrixXd numeric_hessian(const GradientFn& gradient, const Eigen::VectorXd& x,
                                double rel_step = 1e-5);

}  // namespace bcsfit::optim
