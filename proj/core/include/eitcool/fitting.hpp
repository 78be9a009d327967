#pragma once

#include <Eigen/Dense>
#include <functional>

#include "eitcool/errors.hpp"

// Small dense nonlinear least squares: Levenberg-style damping with
// finite-difference Jacobians. Deterministic (no randomness anywhere), which
// keeps fitted outputs byte-reproducible.

namespace eitcool {

struct FitOptions {
    int max_iter = 300;
    double ftol = 1e-14;    // relative cost-decrease convergence threshold
    double xtol = 1e-14;    // relative step-size convergence threshold
    double lambda0 = 1e-3;  // initial damping
    double lambda_max = 1e14;
};

struct FitSolution {
    Eigen::VectorXd params;
    double rms_residual;
    int iterations;
};

/// Minimizes ||residuals(x)||^2 starting from x0. `residuals` maps an
/// m-vector of parameters to the n-vector of residuals (n >= m expected).
/// Throws FitDiverged when damping saturates without progress or the model
/// returns non-finite values at the current iterate.
FitSolution levenberg_fit(
    const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& residuals,
    Eigen::VectorXd x0, const FitOptions& opts = {});

} // namespace eitcool
