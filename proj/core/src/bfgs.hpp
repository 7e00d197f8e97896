#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <limits>

namespace poolmax::detail {

struct BfgsResult {
    Eigen::VectorXd x;
    double value = std::numeric_limits<double>::infinity();
    std::size_t iterations = 0;
    bool converged = false;
};

struct BfgsOptions {
    std::size_t max_iterations = 500;
    double gradient_tolerance = 1e-6;
    double value_tolerance = 1e-12;
    double step = 1e-5;  // central-difference step
};

// Central-difference gradient; non-finite objective values propagate as +inf.
template <typename F>
Eigen::VectorXd numeric_gradient(F& f, const Eigen::VectorXd& x, double step) {
    Eigen::VectorXd g(x.size());
    Eigen::VectorXd probe = x;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        const double h = step * std::max(1.0, std::abs(x(i)));
        probe(i) = x(i) + h;
        const double up = f(probe);
        probe(i) = x(i) - h;
        const double down = f(probe);
        probe(i) = x(i);
        g(i) = (up - down) / (2.0 * h);
        if (!std::isfinite(g(i))) g(i) = 0.0;
    }
    return g;
}

// Unconstrained BFGS with Armijo backtracking. Minimises f.
template <typename F>
BfgsResult minimize_bfgs(F&& f, Eigen::VectorXd x, const BfgsOptions& opt = {}) {
    const Eigen::Index dim = x.size();
    BfgsResult result;
    double fx = f(x);
    if (!std::isfinite(fx)) {
        result.x = x;
        return result;
    }
    Eigen::MatrixXd h_inv = Eigen::MatrixXd::Identity(dim, dim);
    Eigen::VectorXd g = numeric_gradient(f, x, opt.step);
    std::size_t stalled = 0;

    for (std::size_t iter = 1; iter <= opt.max_iterations; ++iter) {
        result.iterations = iter;
        if (g.lpNorm<Eigen::Infinity>() < opt.gradient_tolerance) {
            result.converged = true;
            break;
        }
        Eigen::VectorXd dir = -h_inv * g;
        double slope = g.dot(dir);
        if (!(slope < 0.0)) {
            h_inv.setIdentity();
            dir = -g;
            slope = -g.squaredNorm();
        }

        double t = 1.0;
        Eigen::VectorXd x_new;
        double f_new = std::numeric_limits<double>::infinity();
        bool accepted = false;
        for (int ls = 0; ls < 60; ++ls) {
            x_new = x + t * dir;
            f_new = f(x_new);
            if (std::isfinite(f_new) && f_new <= fx + 1e-4 * t * slope) {
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if (!accepted) {
            if (h_inv.isIdentity()) {
                // Steepest descent cannot make progress: a stationary point up
                // to the resolution of the numerical gradient.
                result.converged = true;
                break;
            }
            h_inv.setIdentity();
            continue;
        }

        const Eigen::VectorXd g_new = numeric_gradient(f, x_new, opt.step);
        const Eigen::VectorXd s = x_new - x;
        const Eigen::VectorXd y = g_new - g;
        const double sy = s.dot(y);
        if (sy > 1e-12 * s.norm() * y.norm()) {
            const double rho = 1.0 / sy;
            const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(dim, dim);
            h_inv = (eye - rho * s * y.transpose()) * h_inv * (eye - rho * y * s.transpose()) + rho * s * s.transpose();
        }

        const double change = std::abs(fx - f_new);
        x = x_new;
        g = g_new;
        fx = f_new;
        stalled = change <= opt.value_tolerance * (1.0 + std::abs(fx)) ? stalled + 1 : 0;
        if (stalled >= 3) {
            result.converged = true;
            break;
        }
    }
    result.x = x;
    result.value = fx;
    return result;
}

}  // namespace poolmax::detail
