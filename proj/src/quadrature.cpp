#include "stqp/quadrature.hpp"

#include <cmath>
#include <limits>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/sinh_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "stqp/errors.hpp"

namespace stqp::quad {

namespace {

void check_finite(const Result& r, const char* what) {
    if (!std::isfinite(r.value)) {
        throw NumericalFailure(std::string("quadrature produced a non-finite value (") + what + ")");
    }
}

}  // namespace

Result integrate(const Integrand& f, double a, double b, double rel_tol) {
    if (a == b) return {};
    if (a > b) {
        Result r = integrate(f, b, a, rel_tol);
        r.value = -r.value;
        return r;
    }
    Result r;
    auto g = [&](double x) { return f(x); };
    const bool lo_inf = std::isinf(a);
    const bool hi_inf = std::isinf(b);
    if (lo_inf && hi_inf) {
        thread_local boost::math::quadrature::sinh_sinh<double> integrator;
        r.value = integrator.integrate(g, rel_tol, &r.error);
    } else if (hi_inf) {
        thread_local boost::math::quadrature::exp_sinh<double> integrator;
        r.value = integrator.integrate([&](double s) { return f(a + s); }, 0.0,
                                       std::numeric_limits<double>::infinity(), rel_tol, &r.error);
    } else if (lo_inf) {
        thread_local boost::math::quadrature::exp_sinh<double> integrator;
        r.value = integrator.integrate([&](double s) { return f(b - s); }, 0.0,
                                       std::numeric_limits<double>::infinity(), rel_tol, &r.error);
    } else {
        thread_local boost::math::quadrature::tanh_sinh<double> integrator;
        r.value = integrator.integrate(g, a, b, rel_tol, &r.error);
    }
    check_finite(r, "tanh/exp/sinh-sinh");
    return r;
}

Result integrate_gk(const Integrand& f, double a, double b, double rel_tol) {
    if (!std::isfinite(a) || !std::isfinite(b)) return integrate(f, a, b, rel_tol);
    Result r;
    r.value = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(f, a, b, 20, rel_tol,
                                                                           &r.error);
    check_finite(r, "gauss-kronrod");
    return r;
}

}  // namespace stqp::quad
