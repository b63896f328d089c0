#include "stqp/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>

#include "stqp/errors.hpp"
#include "stqp/parallel.hpp"
#include "stqp/quadrature.hpp"

namespace stqp::bounds {

namespace {

constexpr double kE = std::numbers::e;

double log_add(double x, double y) {
    if (x == -std::numeric_limits<double>::infinity()) return y;
    if (y == -std::numeric_limits<double>::infinity()) return x;
    const double m = std::max(x, y);
    return m + std::log1p(std::exp(-std::fabs(x - y)));
}

// Welford accumulation over per-replication values indexed by replication.
McEstimate summarize(const std::vector<double>& values, std::uint64_t seed) {
    double mean = 0.0;
    double m2 = 0.0;
    std::int64_t count = 0;
    for (double v : values) {
        ++count;
        const double delta = v - mean;
        mean += delta / static_cast<double>(count);
        m2 += delta * (v - mean);
    }
    McEstimate out;
    out.mean = mean;
    out.reps = count;
    out.seed = seed;
    out.se = count > 1 ? std::sqrt(m2 / static_cast<double>(count - 1) / static_cast<double>(count)) : 0.0;
    return out;
}

void check_nk(std::int64_t n, std::int64_t k, std::int64_t reps, const char* what) {
    if (n < 2) throw DomainError(std::string(what) + ": n must be at least 2");
    if (k < 1 || k > n - 1) throw DomainError(std::string(what) + ": need 1 <= k <= n-1");
    if (reps < 1) throw DomainError(std::string(what) + ": reps must be positive");
}

double mean_quantile(const DistributionSpec& f, std::span<const double> u) {
    double s = 0.0;
    for (double v : u) s += f.quantile(v);
    return s / static_cast<double>(u.size());
}

// (1 - p)^m computed as exp(m log1p(-p)).
double pow_complement(double p, double m) {
    if (p >= 1.0) return 0.0;
    return std::exp(m * std::log1p(-p));
}

}  // namespace

double log_s_nk(std::int64_t n, std::int64_t k) {
    if (n < 1 || k < 1 || k > n) throw DomainError("s_nk: need 1 <= k <= n");
    const double nn = static_cast<double>(n);
    const double kk = static_cast<double>(k);
    return std::lgamma(nn + 1.0) - std::lgamma(kk + 1.0) - std::lgamma(nn - kk + 1.0) + kk * std::log(2.0) -
           std::lgamma(kk + 2.0);
}

double log_s_tail(std::int64_t n, std::int64_t k0) {
    if (n < 1) throw DomainError("s_nk tail: n must be positive");
    double acc = -std::numeric_limits<double>::infinity();
    for (std::int64_t k = std::max<std::int64_t>(1, k0); k <= n; ++k) {
        const double term = log_s_nk(n, k);
        acc = log_add(acc, term);
        // Terms decay super-exponentially once k passes sqrt(2n).
        if (term < acc - 60.0 && static_cast<double>(k) * k > 4.0 * static_cast<double>(n)) break;
    }
    return acc;
}

double gamma_alpha(double alpha) {
    const double threshold = kE * std::numbers::sqrt2;
    if (!(alpha > threshold)) throw DomainError("gamma_alpha: alpha must exceed e*sqrt(2)");
    return 2.0 * alpha * std::log(threshold / alpha);
}

std::int64_t k_n(std::int64_t n, double alpha) {
    if (n < 1 || !(alpha > 0.0)) throw DomainError("k_n: need n >= 1 and alpha > 0");
    return static_cast<std::int64_t>(std::ceil(alpha * std::sqrt(static_cast<double>(n))));
}

double lemma_bound2_rhs(std::int64_t n) {
    if (n < 2) throw DomainError("lemma_bound2_rhs: n must be at least 2");
    const double nn = static_cast<double>(n);
    return nn * std::log(2.0) - std::lgamma(nn + 2.0);
}

Threshold delta_n(std::int64_t n, std::int64_t kn) {
    if (n < 2) throw DomainError("delta_n: n must be at least 2");
    if (kn < 1) throw DomainError("delta_n: k_n must be positive");
    const double nn = static_cast<double>(n);
    const double raw = 2.1 * static_cast<double>(kn) * std::log(nn) / nn;
    Threshold t{raw, false};
    const double below_one = std::nextafter(1.0, 0.0);
    if (raw >= 1.0) t = {below_one, true};
    return t;
}

double c_nu(double nu) {
    if (!(nu > 0.0)) throw DomainError("c_nu: nu must be positive");
    return quad::integrate([nu](double x) { return std::log1p(std::pow(x, nu)); }, 0.0, 1.0, 1e-13).value;
}

double c_nu_series(double nu) {
    if (!(nu > 0.0)) throw DomainError("c_nu_series: nu must be positive");
    // Alternating series; repeated averaging of consecutive partial sums
    // (Euler's transform) removes the slow 1/j^2 oscillation.
    constexpr int kTerms = 400;
    constexpr int kLevels = 60;
    std::vector<double> partial;
    partial.reserve(kLevels + 1);
    double s = 0.0;
    for (int j = 1; j <= kTerms + kLevels; ++j) {
        const double term = (j % 2 == 1 ? 1.0 : -1.0) / (j * (nu * j + 1.0));
        s += term;
        if (j >= kTerms) partial.push_back(s);
    }
    for (int level = 0; level < kLevels; ++level) {
        for (std::size_t i = 0; i + 1 < partial.size(); ++i) partial[i] = 0.5 * (partial[i] + partial[i + 1]);
        partial.pop_back();
    }
    return partial.front();
}

std::vector<double> gamma_weights(int k, double nu, double gamma) {
    if (k < 1) throw DomainError("gamma_weights: k must be positive");
    if (!(nu >= 1.0)) throw DomainError("gamma_weights: nu must be at least 1");
    if (!(gamma > 0.0)) throw DomainError("gamma_weights: gamma must be positive");
    std::vector<double> w(static_cast<std::size_t>(k));
    const double kk = static_cast<double>(k);
    for (int j = 1; j <= k; ++j) {
        w[j - 1] = gamma * (std::pow(1.0 - (j - 1) / kk, nu) - std::pow(1.0 - j / kk, nu));
    }
    return w;
}

BoundValue phi_of_u(const DistributionSpec& f, std::span<const double> u) {
    if (u.empty()) throw DomainError("phi_of_u: empty sample");
    const double x = mean_quantile(f, u);
    return {f.cdf(x), f.log_cdf(x)};
}

McEstimate mc_key_expectation(const DistributionSpec& g, const DistributionSpec& f, std::int64_t n, std::int64_t k,
                              std::int64_t reps, std::uint64_t seed, int jobs) {
    check_nk(n, k, reps, "mc_key_expectation");
    std::vector<double> values(static_cast<std::size_t>(reps));
    const double nn = static_cast<double>(n);
    parallel_for(values.size(), jobs, [&](std::size_t r) {
        Stream stream(seed, r);
        const OrderStatSample s = sample_order_stats(n - 1, k, stream);
        const double x = mean_quantile(f, s.u);
        values[r] = pow_complement(g.cdf(x), nn);
    });
    return summarize(values, seed);
}

double h_nk(const DistributionSpec& g, std::int64_t n, std::int64_t k, double w) {
    if (n < 2 || k < 1) throw DomainError("h_nk: need n >= 2 and k >= 1");
    if (!std::isfinite(w)) throw DomainError("h_nk: w must be finite");
    const double nn = static_cast<double>(n);
    const double kp1 = static_cast<double>(k) + 1.0;
    const double head = -pow_complement(g.cdf(w / static_cast<double>(k)), nn) / (nn - 1.0);

    const auto [g_lo, g_hi] = g.support();
    double lo = std::max(w / static_cast<double>(k), (g_lo + w) / kp1);
    double hi = std::min(g_hi, (g_hi + w) / kp1);
    if (!(lo < hi)) return head;

    auto integrand = [&](double v) {
        const double dens = g.density(kp1 * v - w);
        if (dens == 0.0) return 0.0;
        return dens * pow_complement(g.cdf(v), nn - 1.0);
    };

    if (std::isinf(hi)) {
        // Truncate where the integrand has fallen below 1e-16 of its peak.
        const double scale = std::max(1e-3, g.quantile(0.75) - g.quantile(0.25));
        double peak = 0.0;
        double step = scale / 64.0;
        double v = lo;
        for (int i = 0; i < 4000; ++i) {
            v += step;
            const double val = integrand(v);
            peak = std::max(peak, val);
            if (peak > 0.0 && val < 1e-16 * peak && v > lo + scale) break;
            if (peak == 0.0 && v > lo + 1e6 * scale) break;
            step *= 1.05;
        }
        hi = v;
        if (peak == 0.0) return head;
    }

    // Split at the image of a kink of g (its mode for the symmetric families)
    // so each piece is smooth.
    std::vector<double> cuts{lo};
    if (const auto tail = g.tail()) {
        const double kink = (tail->x0 + w) / kp1;
        if (kink > lo && kink < hi) cuts.push_back(kink);
    } else if (g.family() == Family::TwoSidedExponential || g.family() == Family::Normal ||
               g.family() == Family::Cosh) {
        const double kink = w / kp1;
        if (kink > lo && kink < hi) cuts.push_back(kink);
    }
    cuts.push_back(hi);
    double integral = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        integral += quad::integrate(integrand, cuts[i], cuts[i + 1], 1e-10).value;
    }
    return head + nn * kp1 / (nn - 1.0) * integral;
}

McEstimate mc_rho_hat(const DistributionSpec& g, const DistributionSpec& f, std::int64_t n, std::int64_t k,
                      std::int64_t reps, std::uint64_t seed, int jobs) {
    check_nk(n, k, reps, "mc_rho_hat");
    std::vector<double> values(static_cast<std::size_t>(reps));
    const double nn = static_cast<double>(n);
    parallel_for(values.size(), jobs, [&](std::size_t r) {
        Stream stream(seed, r);
        const OrderStatSample s = sample_order_stats(n - 1, k, stream);
        double w = 0.0;
        for (double u : s.u) w += f.quantile(u);
        values[r] = (nn - 1.0) * h_nk(g, n, k, w);
    });
    return summarize(values, seed);
}

BoundValue thm_c_bound(std::int64_t n, std::int64_t k, double a, double b, double denom, double alpha) {
    if (!(b > 1.0)) throw DomainError("thm_c_bound: requires b > 1");
    if (n < 2 || k < 1) throw DomainError("thm_c_bound: need n >= 2 and k >= 1");
    if (k > k_n(n, alpha)) throw DomainError("thm_c_bound: k exceeds ceil(alpha sqrt n)");
    if (!(denom > 0.0)) throw DomainError("thm_c_bound: denominator must be positive");
    const double nn = static_cast<double>(n);
    const double kk = static_cast<double>(k);
    const double log_n = std::log(nn);
    const double first = log_n + kk / 4.0 * std::log(8.0 / 9.0);
    const double expo = std::min(0.0, a / b);
    const double ratio = std::log(nn / kk);
    // (log(n/k))^expo is only meaningful for n > k; at n = k it blows up
    // for negative expo and the term collapses to n.
    double second = log_n;
    if (ratio > 0.0) second = log_n - kk * std::pow(ratio, expo) / denom;
    else if (expo == 0.0) second = log_n - kk / denom;
    const double lv = log_add(first, second);
    return {std::exp(lv), lv};
}

double sigma_ab(double a, double b) {
    if (!(b > 0.0) || b > 1.0) throw DomainError("sigma_ab: requires 0 < b <= 1");
    return a > 0.0 ? 1.0 + (1.0 + 2.0 * a) / b : 1.0 + (1.0 + std::fabs(a)) / b;
}

double sigma2_star(double a, double b, double sigma) { return 1.0 + b * (sigma - sigma_ab(a, b)) / 2.0; }

ThmDBound thm_d_bound(std::int64_t n, double d, const std::optional<TailWindow>& window) {
    if (n < 3) throw DomainError("thm_d_bound: n must be at least 3");
    if (!(d > 0.0)) throw DomainError("thm_d_bound: d must be positive");
    ThmDBound out;
    out.threshold = std::pow(std::log(static_cast<double>(n)), 1.0 + d);
    out.log_value = -out.threshold;
    out.value = std::exp(out.log_value);
    if (window) {
        out.d_max = window->b * (window->sigma - sigma_ab(window->a, window->b)) / 2.0;
        out.in_window = d < *out.d_max;
    }
    return out;
}

std::pair<double, double> a_prime(double a, double b) {
    if (!(b > 0.0)) throw DomainError("a_prime: b must be positive");
    if (b <= 1.0 && !(a > -1.0)) throw DomainError("a_prime: requires a > -1 when b <= 1");
    const double r_prime = std::pow(2.0, std::min(1.0, b));
    if (b > 1.0) return {2.0 * a + b / 2.0, r_prime};
    if (b < 1.0) return {a + b - 1.0, r_prime};
    return {2.0 * a + 1.0, r_prime};
}

std::pair<double, double> euler_gamma_moments() {
    // Moments of log w for a unit exponential w: Gamma'(1) and Gamma''(1).
    // The integrands have an integrable log singularity at 0 and a split at 1
    // keeps both pieces on the rules they suit.
    auto first = [](double z) { return std::exp(-z) * std::log(z); };
    auto second = [](double z) {
        const double l = std::log(z);
        return std::exp(-z) * l * l;
    };
    const double inf = std::numeric_limits<double>::infinity();
    const double m1 = quad::integrate(first, 0.0, 1.0, 1e-13).value + quad::integrate(first, 1.0, inf, 1e-13).value;
    const double m2 = quad::integrate(second, 0.0, 1.0, 1e-13).value + quad::integrate(second, 1.0, inf, 1e-13).value;
    return {m1, m2};
}

PhiCheck phi_constants(const DistributionSpec& f, double delta) {
    const auto edge = f.left_edge();
    if (!edge) throw UnsupportedFamily("phi_constants: family has no left edge");
    if (!(delta > 0.0 && delta < 1.0)) throw DomainError("phi_constants: delta must lie in (0,1)");
    PhiCheck out;
    out.nu = edge->nu;
    const double x_max = f.quantile(delta) - edge->A;
    double lo = edge->rho;
    double hi = edge->rho;
    // Log-spaced grid down to the edge; the limit at the edge is rho.
    constexpr int kGrid = 4000;
    for (int i = 0; i <= kGrid; ++i) {
        const double x = x_max * std::pow(1e-8, static_cast<double>(i) / kGrid);
        const double ratio = f.cdf(edge->A + x) / std::pow(x, edge->nu);
        lo = std::min(lo, ratio);
        hi = std::max(hi, ratio);
    }
    out.sigma = lo;
    out.eta = hi;
    out.gamma = lo / hi;
    return out;
}

PhiCheck phi_lower_bound_check(const DistributionSpec& f, int k, double delta, std::int64_t trials,
                               std::uint64_t seed) {
    if (k < 1) throw DomainError("phi_lower_bound_check: k must be positive");
    if (trials < 1) throw DomainError("phi_lower_bound_check: trials must be positive");
    PhiCheck out = phi_constants(f, delta);
    if (!(out.nu >= 1.0)) throw DomainError("phi_lower_bound_check: requires nu >= 1");
    const std::vector<double> weights = gamma_weights(k, out.nu, out.gamma);
    out.trials = trials;
    out.worst_gap = std::numeric_limits<double>::infinity();
    std::vector<double> u(static_cast<std::size_t>(k));
    for (std::int64_t t = 0; t < trials; ++t) {
        Stream stream(seed, static_cast<std::uint64_t>(t));
        for (double& v : u) v = delta * stream.uniform_open();
        std::sort(u.begin(), u.end());
        const double phi = phi_of_u(f, u).value;
        double rhs = 0.0;
        for (int j = 0; j < k; ++j) rhs += weights[j] * u[j];
        const double gap = phi - rhs;
        out.worst_gap = std::min(out.worst_gap, gap);
        if (gap < -1e-10) ++out.violations;
    }
    return out;
}

void BoundReport::write_csv(std::ostream& out) const {
    out << "formula_id,n,k,value,log_value,se,reps,seed\n";
    out.precision(17);
    for (const auto& row : rows) {
        out << row.formula_id << ',' << row.n << ',' << row.k << ',' << row.value << ',' << row.log_value << ',';
        if (row.se) out << *row.se;
        out << ',';
        if (row.reps) out << *row.reps;
        out << ',';
        if (row.seed) out << *row.seed;
        out << '\n';
    }
}

const std::vector<std::string>& formula_ids() {
    static const std::vector<std::string> ids{"s_nk", "gamma_alpha", "lemma_bound2", "delta_n", "c_nu",
                                              "thm_c", "sigma_ab", "thm_d", "key_mc", "rho_hat_mc"};
    return ids;
}

BoundRow evaluate(const EvalRequest& req) {
    BoundRow row;
    row.formula_id = req.formula_id;
    row.n = req.n;
    row.k = req.k;
    auto set_log = [&](double lv) {
        row.log_value = lv;
        row.value = std::exp(lv);
    };
    auto set_value = [&](double v) {
        row.value = v;
        row.log_value = std::log(std::fabs(v));
    };
    const std::string& id = req.formula_id;
    if (id == "s_nk") {
        set_log(log_s_nk(req.n, req.k));
    } else if (id == "gamma_alpha") {
        set_value(gamma_alpha(req.alpha));
    } else if (id == "lemma_bound2") {
        set_log(lemma_bound2_rhs(req.n));
    } else if (id == "delta_n") {
        row.k = req.k > 0 ? req.k : k_n(req.n, req.alpha);
        set_value(delta_n(req.n, row.k).value);
    } else if (id == "c_nu") {
        set_value(c_nu(req.nu));
    } else if (id == "thm_c") {
        const BoundValue b = thm_c_bound(req.n, req.k, req.tail.a, req.tail.b, 2.0 * kE, req.alpha);
        row.value = b.value;
        row.log_value = b.log_value;
    } else if (id == "sigma_ab") {
        set_value(sigma_ab(req.tail.a, req.tail.b));
    } else if (id == "thm_d") {
        std::optional<TailWindow> window;
        if (req.sigma) window = TailWindow{req.tail.a, req.tail.b, *req.sigma};
        const ThmDBound b = thm_d_bound(req.n, req.d, window);
        row.value = b.value;
        row.log_value = b.log_value;
    } else if (id == "key_mc" || id == "rho_hat_mc") {
        const McEstimate e = id == "key_mc" ? mc_key_expectation(req.g, req.f, req.n, req.k, req.reps, req.seed, req.jobs)
                                            : mc_rho_hat(req.g, req.f, req.n, req.k, req.reps, req.seed, req.jobs);
        row.value = e.mean;
        row.log_value = e.mean > 0.0 ? std::log(e.mean) : -std::numeric_limits<double>::infinity();
        row.se = e.se;
        row.reps = e.reps;
        row.seed = e.seed;
    } else {
        throw DomainError("unknown formula id: " + id);
    }
    return row;
}

}  // namespace stqp::bounds
