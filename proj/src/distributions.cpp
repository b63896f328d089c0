#include "stqp/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/math/special_functions/erf.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "stqp/errors.hpp"

namespace stqp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// log of the regularized upper incomplete gamma Q(s, y). Falls back to the
// Legendre continued fraction when Q itself would underflow.
double log_gamma_q(double s, double y) {
    if (y <= 0.0) return 0.0;
    const double q = boost::math::gamma_q(s, y);
    if (q > 1e-250) return std::log(q);
    constexpr double tiny = 1e-300;
    double b = y + 1.0 - s;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < 10000; ++i) {
        const double an = -i * (i - s);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < 1e-16) break;
    }
    return -y + s * std::log(y) - std::lgamma(s) + std::log(h);
}

void require_probability(double u) {
    if (!(u > 0.0 && u < 1.0)) {
        throw DomainError("quantile: u must lie in (0,1), got " + std::to_string(u));
    }
}

// Shape constant s = (a+b)/b of the ExpTail family.
double exp_tail_shape(const TailParams& t) { return (t.a + t.b) / t.b; }

}  // namespace

void TailParams::validate() const {
    if (!(b > 0.0 && c > 0.0 && r > 0.0 && kappa > 0.0) || !std::isfinite(a) || !std::isfinite(x0)) {
        throw DomainError("TailParams: need b > 0, c > 0, r > 0, kappa > 0");
    }
}

void LeftEdgeParams::validate() const {
    if (!(nu > 0.0 && rho > 0.0 && beta >= 1.0) || !(B > A)) {
        throw DomainError("LeftEdgeParams: need nu > 0, rho > 0, beta >= 1, B > A");
    }
}

LeftEdgeParams LeftEdgeParams::power(double nu, double rho) {
    LeftEdgeParams p;
    p.nu = nu;
    p.rho = rho;
    p.B = std::pow(rho, -1.0 / nu);
    // f(x') / f(x) = (x'/x)^(nu-1) on x' in [x, 2x].
    p.beta = nu >= 1.0 ? std::pow(2.0, nu - 1.0) : 1.0;
    p.validate();
    return p;
}

std::string to_string(Family family) {
    switch (family) {
        case Family::Uniform01: return "uniform01";
        case Family::Exponential: return "exponential";
        case Family::LeftBoundedPower: return "left_bounded_power";
        case Family::ExpTail: return "exp_tail";
        case Family::Normal: return "normal";
        case Family::TwoSidedExponential: return "two_sided_exponential";
        case Family::Cosh: return "cosh";
    }
    return "unknown";
}

std::string to_string(Role role) { return role == Role::DiagonalG ? "diagonal_G" : "offdiagonal_F"; }

Family family_from_string(const std::string& name) {
    for (Family f : {Family::Uniform01, Family::Exponential, Family::LeftBoundedPower, Family::ExpTail,
                     Family::Normal, Family::TwoSidedExponential, Family::Cosh}) {
        if (to_string(f) == name) return f;
    }
    throw DomainError("unknown distribution family '" + name + "'");
}

Role role_from_string(const std::string& name) {
    if (name == "diagonal_G") return Role::DiagonalG;
    if (name == "offdiagonal_F") return Role::OffDiagonalF;
    throw DomainError("unknown distribution role '" + name + "'");
}

DistributionSpec DistributionSpec::uniform01() { return {Family::Uniform01, {}, {}}; }
DistributionSpec DistributionSpec::exponential() { return {Family::Exponential, {}, {}}; }
DistributionSpec DistributionSpec::normal() { return {Family::Normal, {}, {}}; }
DistributionSpec DistributionSpec::two_sided_exponential() { return {Family::TwoSidedExponential, {}, {}}; }
DistributionSpec DistributionSpec::cosh() { return {Family::Cosh, {}, {}}; }

DistributionSpec DistributionSpec::left_bounded_power(double nu, double rho) {
    return {Family::LeftBoundedPower, {}, LeftEdgeParams::power(nu, rho)};
}

DistributionSpec DistributionSpec::exp_tail(double a, double b, double r, double x0) {
    if (!(b > 0.0) || !(r > 0.0) || !(a + b > 0.0)) {
        throw DomainError("exp_tail: need b > 0, r > 0 and a + b > 0");
    }
    TailParams t;
    t.a = a;
    t.b = b;
    t.r = r;
    t.x0 = x0;
    const double s = (a + b) / b;
    t.c = std::pow(r, s - 1.0) / (2.0 * std::tgamma(s));
    t.kappa = b;
    t.validate();
    return {Family::ExpTail, t, {}};
}

DistributionSpec DistributionSpec::from_name(const std::string& name) {
    // Parametric forms: exp_tail:a,b[,r[,x0]] and power:nu[,rho].
    if (const auto colon = name.find(':'); colon != std::string::npos) {
        const std::string head = name.substr(0, colon);
        std::vector<double> args;
        std::size_t pos = colon + 1;
        while (pos <= name.size()) {
            const std::size_t comma = std::min(name.find(',', pos), name.size());
            try {
                std::size_t used = 0;
                const std::string field = name.substr(pos, comma - pos);
                args.push_back(std::stod(field, &used));
                if (used != field.size()) throw std::invalid_argument(field);
            } catch (const std::exception&) {
                throw DomainError("bad parameter list in distribution '" + name + "'");
            }
            pos = comma + 1;
        }
        if (head == "exp_tail" && args.size() >= 2 && args.size() <= 4) {
            return exp_tail(args[0], args[1], args.size() > 2 ? args[2] : 1.0, args.size() > 3 ? args[3] : 0.0);
        }
        if (head == "power" && !args.empty() && args.size() <= 2) {
            return left_bounded_power(args[0], args.size() > 1 ? args[1] : 1.0);
        }
        throw DomainError("unknown parametric distribution '" + name + "'");
    }
    if (name == "uniform" || name == "uniform01") return uniform01();
    if (name == "exponential" || name == "exp") return exponential();
    if (name == "normal" || name == "gaussian") return normal();
    if (name == "laplace" || name == "two_sided_exponential") return two_sided_exponential();
    if (name == "cosh") return cosh();
    throw DomainError("unknown distribution name '" + name +
                      "'");
}

DistributionSpec DistributionSpec::with_role(Role role) const {
    DistributionSpec copy = *this;
    copy.role_ = role;
    return copy;
}

std::string DistributionSpec::name() const {
    switch (family_) {
        case Family::LeftBoundedPower:
            return "left_bounded_power(nu=" + std::to_string(edge_.nu) + ")";
        case Family::ExpTail:
            return "exp_tail(a=" + std::to_string(tail_.a) + ",b=" + std::to_string(tail_.b) + ")";
        default: return to_string(family_);
    }
}

double DistributionSpec::cdf(double x) const {
    if (std::isnan(x)) throw DomainError("cdf: NaN argument");
    switch (family_) {
        case Family::Uniform01: return std::clamp(x, 0.0, 1.0);
        case Family::Exponential: return x <= 0.0 ? 0.0 : -std::expm1(-x);
        case Family::LeftBoundedPower:
            if (x <= 0.0) return 0.0;
            if (x >= edge_.B) return 1.0;
            return edge_.rho * std::pow(x, edge_.nu);
        case Family::ExpTail: {
            const double t = std::fabs(x - tail_.x0);
            const double half_q = 0.5 * boost::math::gamma_q(exp_tail_shape(tail_), tail_.r * std::pow(t, tail_.b));
            return x <= tail_.x0 ? half_q : 1.0 - half_q;
        }
        case Family::Normal: return 0.5 * std::erfc(-x / std::numbers::sqrt2);
        case Family::TwoSidedExponential: return x < 0.0 ? 0.5 * std::exp(x) : 1.0 - 0.5 * std::exp(-x);
        case Family::Cosh: return 2.0 / std::numbers::pi * std::atan(std::exp(x));
    }
    return 0.0;
}

double DistributionSpec::log_cdf(double x) const {
    if (std::isnan(x)) throw DomainError("log_cdf: NaN argument");
    switch (family_) {
        case Family::Uniform01: return x <= 0.0 ? -kInf : std::log(std::min(x, 1.0));
        case Family::Exponential: return x <= 0.0 ? -kInf : std::log(-std::expm1(-x));
        case Family::LeftBoundedPower:
            if (x <= 0.0) return -kInf;
            if (x >= edge_.B) return 0.0;
            return std::log(edge_.rho) + edge_.nu * std::log(x);
        case Family::ExpTail: {
            if (x > tail_.x0) return std::log1p(-0.5 * boost::math::gamma_q(exp_tail_shape(tail_), tail_.r * std::pow(x - tail_.x0, tail_.b)));
            const double y = tail_.r * std::pow(tail_.x0 - x, tail_.b);
            return -std::numbers::ln2 + log_gamma_q(exp_tail_shape(tail_), y);
        }
        case Family::Normal:
            if (x > -30.0) return std::log(cdf(x));
            return -std::numbers::ln2 + log_gamma_q(0.5, 0.5 * x * x);
        case Family::TwoSidedExponential: return x < 0.0 ? x - std::numbers::ln2 : std::log1p(-0.5 * std::exp(-x));
        case Family::Cosh:
            if (x < -20.0) return std::log(2.0 / std::numbers::pi) + x + std::log1p(-std::exp(2.0 * x) / 3.0);
            return std::log(cdf(x));
    }
    return 0.0;
}

double DistributionSpec::density(double x) const {
    switch (family_) {
        case Family::Uniform01: return (x >= 0.0 && x <= 1.0) ? 1.0 : 0.0;
        case Family::Exponential: return x < 0.0 ? 0.0 : std::exp(-x);
        case Family::LeftBoundedPower:
            if (x < 0.0 || x > edge_.B) return 0.0;
            if (x == 0.0) return edge_.nu < 1.0 ? kInf : (edge_.nu == 1.0 ? edge_.rho : 0.0);
            return edge_.rho * edge_.nu * std::pow(x, edge_.nu - 1.0);
        case Family::ExpTail: {
            const double s = exp_tail_shape(tail_);
            const double t = std::fabs(x - tail_.x0);
            const double p = tail_.a + tail_.b - 1.0;
            if (t == 0.0) return p < 0.0 ? kInf : (p == 0.0 ? tail_.b * std::pow(tail_.r, s) / (2.0 * std::tgamma(s)) : 0.0);
            const double log_k = std::log(tail_.b) + s * std::log(tail_.r) - std::numbers::ln2 - std::lgamma(s);
            return std::exp(log_k + p * std::log(t) - tail_.r * std::pow(t, tail_.b));
        }
        case Family::Normal: return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
        case Family::TwoSidedExponential: return 0.5 * std::exp(-std::fabs(x));
        case Family::Cosh: {
            const double ax = std::fabs(x);
            // 1/(pi cosh x) = 2 e^-|x| / (pi (1 + e^-2|x|))
            return 2.0 * std::exp(-ax) / (std::numbers::pi * (1.0 + std::exp(-2.0 * ax)));
        }
    }
    return 0.0;
}

double DistributionSpec::quantile(double u) const {
    require_probability(u);
    switch (family_) {
        case Family::Uniform01: return u;
        case Family::Exponential: return -std::log1p(-u);
        case Family::LeftBoundedPower: return std::pow(u / edge_.rho, 1.0 / edge_.nu);
        case Family::ExpTail: {
            const double s = exp_tail_shape(tail_);
            const bool left = u <= 0.5;
            const double y = boost::math::gamma_q_inv(s, left ? 2.0 * u : 2.0 * (1.0 - u));
            const double t = std::pow(y / tail_.r, 1.0 / tail_.b);
            return left ? tail_.x0 - t : tail_.x0 + t;
        }
        case Family::Normal: return -std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * u);
        case Family::TwoSidedExponential: return u < 0.5 ? std::log(2.0 * u) : -std::log(2.0 * (1.0 - u));
        case Family::Cosh: return std::log(std::tan(0.5 * std::numbers::pi * u));
    }
    return 0.0;
}

double DistributionSpec::sample(Stream& stream) const { return quantile(stream.uniform_open()); }

std::pair<double, double> DistributionSpec::support() const {
    switch (family_) {
        case Family::Uniform01: return {0.0, 1.0};
        case Family::Exponential: return {0.0, kInf};
        case Family::LeftBoundedPower: return {0.0, edge_.B};
        default: return {-kInf, kInf};
    }
}

std::optional<TailParams> DistributionSpec::tail() const {
    switch (family_) {
        case Family::ExpTail: return tail_;
        case Family::Normal: return TailParams{-1.0, 2.0, 1.0 / std::sqrt(2.0 * std::numbers::pi), 0.5, 0.0, 2.0};
        case Family::TwoSidedExponential: return TailParams{0.0, 1.0, 0.5, 1.0, 0.0, 1.0};
        case Family::Cosh: return TailParams{0.0, 1.0, 2.0 / std::numbers::pi, 1.0, 0.0, 2.0};
        default: return std::nullopt;
    }
}

std::optional<LeftEdgeParams> DistributionSpec::left_edge() const {
    switch (family_) {
        case Family::Uniform01: return LeftEdgeParams{0.0, 1.0, 1.0, 1.0, 1.0};
        case Family::Exponential: return LeftEdgeParams{0.0, kInf, 1.0, 1.0, 1.0};
        case Family::LeftBoundedPower: return edge_;
        default: return std::nullopt;
    }
}

nlohmann::json DistributionSpec::to_json() const {
    nlohmann::json params = nlohmann::json::object();
    if (family_ == Family::ExpTail) {
        params = {{"a", tail_.a}, {"b", tail_.b}, {"r", tail_.r}, {"x0", tail_.x0},
                  {"c", tail_.c}, {"kappa", tail_.kappa}};
    } else if (family_ == Family::LeftBoundedPower) {
        params = {{"nu", edge_.nu}, {"rho", edge_.rho}, {"A", edge_.A}, {"B", edge_.B}, {"beta", edge_.beta}};
    }
    return {{"family", to_string(family_)}, {"params", params}, {"role", to_string(role_)}};
}

DistributionSpec DistributionSpec::from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("family")) {
        throw DomainError("distribution JSON must be an object with a \"family\" field");
    }
    const Family family = family_from_string(j.at("family").get<std::string>());
    const nlohmann::json params = j.value("params", nlohmann::json::object());
    auto check_derived = [&](const char* key, double expected) {
        if (params.contains(key)) {
            const double given = params.at(key).get<double>();
            if (std::fabs(given - expected) > 1e-12 * std::max(1.0, std::fabs(expected))) {
                throw DomainError(std::string("distribution JSON: derived field '") + key +
                                  "' inconsistent with the other parameters");
            }
        }
    };
    DistributionSpec spec = uniform01();
    switch (family) {
        case Family::ExpTail:
            spec = exp_tail(params.at("a").get<double>(), params.at("b").get<double>(),
                            params.value("r", 1.0), params.value("x0", 0.0));
            check_derived("c", spec.tail_.c);
            check_derived("kappa", spec.tail_.kappa);
            break;
        case Family::LeftBoundedPower:
            spec = left_bounded_power(params.at("nu").get<double>(), params.value("rho", 1.0));
            check_derived("B", spec.edge_.B);
            check_derived("beta", spec.edge_.beta);
            check_derived("A", 0.0);
            break;
        default: spec = DistributionSpec(family, {}, {}); break;
    }
    if (j.contains("role")) spec.role_ = role_from_string(j.at("role").get<std::string>());
    return spec;
}

bool DistributionSpec::operator==(const DistributionSpec& other) const {
    if (family_ != other.family_ || role_ != other.role_) return false;
    if (family_ == Family::ExpTail) {
        return tail_.a == other.tail_.a && tail_.b == other.tail_.b && tail_.r == other.tail_.r &&
               tail_.x0 == other.tail_.x0;
    }
    if (family_ == Family::LeftBoundedPower) return edge_.nu == other.edge_.nu && edge_.rho == other.edge_.rho;
    return true;
}

double dominated_variation_beta(const DistributionSpec& spec, double j, int grid) {
    const auto edge = spec.left_edge();
    if (!edge) {
        throw UnsupportedFamily("dominated_variation_beta: " + spec.name() +
                                " has no left-bounded support with positive density");
    }
    if (!(j > 1.0)) throw DomainError("dominated_variation_beta: need j > 1");
    if (grid < 2) throw DomainError("dominated_variation_beta: grid must have at least 2 points");

    const double lo = spec.quantile(1e-9);
    const double hi = std::isfinite(edge->B) ? edge->B * (1.0 - 1e-12) : spec.quantile(1.0 - 1e-12);
    const double log_step = std::log(hi / lo) / (grid - 1);
    std::vector<double> xs(static_cast<std::size_t>(grid));
    std::vector<double> fs(xs.size());
    for (std::size_t m = 0; m < xs.size(); ++m) {
        xs[m] = lo * std::exp(log_step * static_cast<double>(m));
        fs[m] = spec.density(xs[m]);
        if (!(fs[m] > 0.0)) throw NumericalFailure("dominated_variation_beta: zero density on the grid");
    }
    double best = 1.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double limit = j * xs[i] * (1.0 + 1e-14);
        for (std::size_t m = i; m < xs.size() && xs[m] <= limit; ++m) {
            best = std::max(best, fs[m] / fs[i]);
        }
    }
    return best;
}

}  // namespace stqp
