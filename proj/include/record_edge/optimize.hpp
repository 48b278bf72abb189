// Derivative-free optimisers and finite-difference curvature used by the
// likelihood code. Everything here minimises; callers negate log-likelihoods.

#pragma once

#include <functional>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace record_edge {

using Objective = std::function<double(std::span<const double>)>;

struct NelderMeadOptions {
  std::vector<double> initial_step;  // per coordinate; empty means 0.1 each
  int max_evaluations = 2000;
  double f_tolerance = 1e-10;  // spread of objective values over the simplex
  double x_tolerance = 1e-8;   // largest vertex distance from the best vertex
  int restarts = 1;
};

struct NelderMeadResult {
  std::vector<double> x;
  double value = 0.0;
  int evaluations = 0;
  bool converged = false;
};

NelderMeadResult nelder_mead(const Objective& f, std::vector<double> start,
                             const NelderMeadOptions& options = {});

struct LineSearchResult {
  double x = 0.0;
  double value = 0.0;
  int evaluations = 0;
};

/// Golden-section minimisation of a unimodal function on [lo, hi].
LineSearchResult golden_section_minimize(const std::function<double(double)>& f, double lo,
                                         double hi, double tolerance = 1e-10,
                                         int max_iterations = 200);

/// Central-difference Hessian with per-coordinate steps.
Eigen::MatrixXd finite_difference_hessian(const Objective& f, std::span<const double> x,
                                          std::span<const double> steps);

/// Central-difference gradient.
Eigen::VectorXd finite_difference_gradient(const Objective& f, std::span<const double> x,
                                           std::span<const double> steps);

}  // namespace record_edge
