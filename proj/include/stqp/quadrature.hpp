#pragma once

#include <functional>

namespace stqp::quad {

struct Result {
    double value = 0.0;
    double error = 0.0;
};

using Integrand = std::function<double(double)>;

/// Integral of f over [a, b]. Either endpoint may be infinite. Finite
/// intervals use tanh-sinh (robust to integrable endpoint singularities),
/// half-lines use exp-sinh, the real line sinh-sinh.
Result integrate(const Integrand& f, double a, double b, double rel_tol = 1e-10);

/// Adaptive Gauss-Kronrod (15 point) on a finite interval, for smooth
/// integrands where the cheaper rule suffices.
Result integrate_gk(const Integrand& f, double a, double b, double rel_tol = 1e-10);

}  // namespace stqp::quad
