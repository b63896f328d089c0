#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "stqp/distributions.hpp"

namespace stqp::bounds {

/// A probability bound kept in both domains.
struct BoundValue {
    double value = 0.0;
    double log_value = 0.0;
};

/// log S(n,k), S(n,k) = C(n,k) 2^k / (k+1)!. Requires 1 <= k <= n.
double log_s_nk(std::int64_t n, std::int64_t k);

/// log of sum_{k >= k0} S(n,k), summed stably in log space.
double log_s_tail(std::int64_t n, std::int64_t k0);

/// gamma(alpha) = 2 alpha log(e sqrt2 / alpha); alpha must exceed e sqrt2.
double gamma_alpha(double alpha);

/// k_n = ceil(alpha sqrt n).
std::int64_t k_n(std::int64_t n, double alpha = 4.0);

/// log(2^n / (n+1)!), n >= 2.
double lemma_bound2_rhs(std::int64_t n);

struct Threshold {
    double value = 0.0;
    bool clamped = false;
};

/// delta_n = 2.1 k_n log(n) / n, clamped into (0,1).
Threshold delta_n(std::int64_t n, std::int64_t k_n);

/// c(nu) = int_0^1 log(1 + x^nu) dx by quadrature.
double c_nu(double nu);
/// The same constant from sum_{j>=1} (-1)^(j-1) / (j (nu j + 1)).
double c_nu_series(double nu);

/// gamma_j = gamma [(1 - (j-1)/k)^nu - (1 - j/k)^nu], j = 1..k. nu >= 1.
std::vector<double> gamma_weights(int k, double nu, double gamma);

/// phi(u) = F(k^-1 sum F^-1(u_j)), with log phi for deep tails.
BoundValue phi_of_u(const DistributionSpec& f, std::span<const double> u);

struct McEstimate {
    double mean = 0.0;
    double se = 0.0;
    std::int64_t reps = 0;
    std::uint64_t seed = 0;
};

/// E[(1 - G(k^-1 sum_{j<=k} F^-1(U_j)))^n] with U the order statistics of
/// n-1 uniforms. Replication r uses stream r of `seed`, so the estimate
/// does not depend on `jobs`. Requires 1 <= k <= n-1.
McEstimate mc_key_expectation(const DistributionSpec& g, const DistributionSpec& f, std::int64_t n,
                              std::int64_t k, std::int64_t reps, std::uint64_t seed, int jobs = 1);

/// H_{n,k}(w) = -[1-G(w/k)]^n/(n-1)
///             + n(k+1)/(n-1) int_{w/k}^inf g((k+1)v - w) [1-G(v)]^(n-1) dv.
double h_nk(const DistributionSpec& g, std::int64_t n, std::int64_t k, double w);

/// (n-1) E[H_{n,k}(W_1 + ... + W_k)], W the order statistics of n-1 draws from F.
McEstimate mc_rho_hat(const DistributionSpec& g, const DistributionSpec& f, std::int64_t n, std::int64_t k,
                      std::int64_t reps, std::uint64_t seed, int jobs = 1);

/// n (8/9)^(k/4) + n exp(-k (log(n/k))^min(0, a/b) / denom) for b > 1 and
/// k <= ceil(alpha sqrt n). denom defaults to 2e; any c e with c in
/// (3/2, 2) is also admissible.
BoundValue thm_c_bound(std::int64_t n, std::int64_t k, double a, double b, double denom = 2.0 * 2.718281828459045,
                       double alpha = 4.0);

/// sigma(a,b) = 1 + (1+2a)/b for a > 0, 1 + (1+|a|)/b otherwise; 0 < b <= 1.
double sigma_ab(double a, double b);

/// sigma_2^* = 1 + b (sigma - sigma(a,b)) / 2.
double sigma2_star(double a, double b, double sigma);

struct ThmDBound {
    double value = 0.0;
    double log_value = 0.0;
    double threshold = 0.0;       ///< (log n)^(1+d)
    std::optional<double> d_max;  ///< b (sigma - sigma(a,b)) / 2 when (a, b, sigma) given
    std::optional<bool> in_window;
};

struct TailWindow {
    double a = 0.0;
    double b = 1.0;
    double sigma = 0.0;
};

/// exp(-(log n)^(1+d)). The admissible range of d is reported, not enforced.
ThmDBound thm_d_bound(std::int64_t n, double d, const std::optional<TailWindow>& window = std::nullopt);

/// Predicted tail exponents of (G*G)(2x): a' and r' (for r = 1). For b <= 1
/// requires a > -1.
std::pair<double, double> a_prime(double a, double b);

/// int_0^inf e^-z log(1/z) dz and int_0^inf e^-z log^2(1/z) dz.
std::pair<double, double> euler_gamma_moments();

struct PhiCheck {
    std::int64_t trials = 0;
    std::int64_t violations = 0;
    double worst_gap = 0.0;  ///< min over trials of phi(u) - sum gamma_j u_j
    double nu = 0.0;
    double sigma = 0.0;      ///< min F(x)/x^nu on [0, F^-1(delta)]
    double eta = 0.0;        ///< max F(x)/x^nu on the same range
    double gamma = 0.0;      ///< sigma / eta
};

/// sigma, eta and gamma = sigma/eta for a left-bounded F on [0, F^-1(delta)].
PhiCheck phi_constants(const DistributionSpec& f, double delta);

/// Counts trials where phi(u) < sum gamma_j u_j - 1e-10 for sorted u drawn
/// uniformly from {0 < u_1 <= ... <= u_k <= delta}. F must be left-bounded
/// with edge power nu >= 1.
PhiCheck phi_lower_bound_check(const DistributionSpec& f, int k, double delta, std::int64_t trials,
                               std::uint64_t seed);

struct BoundRow {
    std::string formula_id;
    std::int64_t n = 0;
    std::int64_t k = 0;
    double value = 0.0;
    double log_value = 0.0;
    std::optional<double> se;
    std::optional<std::int64_t> reps;
    std::optional<std::uint64_t> seed;
};

struct BoundReport {
    std::vector<BoundRow> rows;
    nlohmann::json inputs = nlohmann::json::object();

    /// formula_id,n,k,value,log_value,se,reps,seed; empty cells for
    /// non-Monte-Carlo rows.
    void write_csv(std::ostream& out) const;
};

/// Identifiers accepted by evaluate(): s_nk, gamma_alpha, lemma_bound2,
/// delta_n, c_nu, thm_c, sigma_ab, thm_d, key_mc, rho_hat_mc.
const std::vector<std::string>& formula_ids();

struct EvalRequest {
    std::string formula_id;
    std::int64_t n = 0;
    std::int64_t k = 0;
    double alpha = 4.0;
    double nu = 1.0;
    double d = 0.5;
    std::optional<double> sigma;
    TailParams tail;
    DistributionSpec g = DistributionSpec::uniform01();
    DistributionSpec f = DistributionSpec::uniform01();
    std::int64_t reps = 10000;
    std::uint64_t seed = 0;
    int jobs = 1;
};

/// One row for a named formula; used by the command line tool.
BoundRow evaluate(const EvalRequest& req);

}  // namespace stqp::bounds
