#include "eitcool/fitting.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace eitcool {

namespace {

Eigen::MatrixXd fd_jacobian(
    const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& f,
    const Eigen::VectorXd& x, const Eigen::VectorXd& fx) {
    const auto m = x.size();
    const auto n = fx.size();
    Eigen::MatrixXd j(n, m);
    for (Eigen::Index k = 0; k < m; ++k) {
        const double h = 1e-7 * std::max(1.0, std::abs(x[k]));
        Eigen::VectorXd xp = x, xm = x;
        xp[k] += h;
        xm[k] -= h;
        j.col(k) = (f(xp) - f(xm)) / (2.0 * h);
    }
    return j;
}

} // namespace

FitSolution levenberg_fit(
    const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& residuals,
    Eigen::VectorXd x, const FitOptions& opts) {
    Eigen::VectorXd r = residuals(x);
    if (!r.allFinite())
        throw FitDiverged("levenberg_fit: non-finite residuals at start");
    double cost = r.squaredNorm();
    double lambda = opts.lambda0;

    int iter = 0;
    for (; iter < opts.max_iter; ++iter) {
        const Eigen::MatrixXd j = fd_jacobian(residuals, x, r);
        if (!j.allFinite())
            throw FitDiverged("levenberg_fit: non-finite Jacobian");
        const Eigen::MatrixXd jtj = j.transpose() * j;
        const Eigen::VectorXd jtr = j.transpose() * r;

        if (jtr.lpNorm<Eigen::Infinity>() < 1e-16 * std::max(1.0, cost)) break;

        bool stepped = false;
        while (lambda <= opts.lambda_max) {
            // Marquardt scaling with an absolute floor so flat directions
            // stay regularized.
            Eigen::MatrixXd a = jtj;
            for (Eigen::Index k = 0; k < a.rows(); ++k)
                a(k, k) += lambda * std::max(jtj(k, k), 1e-12);
            const Eigen::VectorXd step = a.ldlt().solve(-jtr);
            const Eigen::VectorXd x_new = x + step;
            const Eigen::VectorXd r_new = residuals(x_new);
            const double cost_new =
                r_new.allFinite() ? r_new.squaredNorm()
                                  : std::numeric_limits<double>::infinity();
            if (cost_new <= cost) {
                const double df = cost - cost_new;
                const double dx = step.norm();
                x = x_new;
                r = r_new;
                cost = cost_new;
                lambda = std::max(1e-12, lambda / 3.0);
                stepped = true;
                if (df <= opts.ftol * std::max(cost, 1e-300) ||
                    dx <= opts.xtol * std::max(1.0, x.norm()))
                    iter = opts.max_iter; // converged: leave outer loop
                break;
            }
            lambda *= 7.0;
        }
        if (!stepped) {
            if (lambda > opts.lambda_max && cost > 1e-20)
                throw FitDiverged(
                    "levenberg_fit: damping saturated without progress");
            break;
        }
    }

    FitSolution s;
    s.params = x;
    s.rms_residual =
        std::sqrt(cost / static_cast<double>(std::max<Eigen::Index>(
                             1, residuals(x).size())));
    s.iterations = iter;
    return s;
}

} // namespace eitcool
