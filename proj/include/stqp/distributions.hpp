#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "stqp/rng.hpp"

namespace stqp {

/// Left-tail shape F(x) = (c + O(|x|^-kappa)) |x - x0|^a exp(-r |x - x0|^b), x -> -inf.
struct TailParams {
    double a = 0.0;
    double b = 1.0;
    double c = 1.0;
    double r = 1.0;
    double x0 = 0.0;
    double kappa = 1.0;

    void validate() const;
};

/// Left-bounded support [A, B) with F(x) = rho x^nu + O(x^(nu+1)) at the
/// left edge, and a dominated-variation constant beta for the density.
struct LeftEdgeParams {
    double A = 0.0;
    double B = 1.0;  ///< may be +infinity
    double nu = 1.0;
    double rho = 1.0;
    double beta = 1.0;

    void validate() const;

    /// Parameters of the pure power law F(x) = rho x^nu on [0, rho^(-1/nu)].
    static LeftEdgeParams power(double nu, double rho = 1.0);
};

enum class Family { Uniform01, Exponential, LeftBoundedPower, ExpTail, Normal, TwoSidedExponential, Cosh };

/// Which matrix entries a distribution describes: G (diagonal) or F (off-diagonal).
enum class Role { DiagonalG, OffDiagonalF };

std::string to_string(Family family);
std::string to_string(Role role);
Family family_from_string(const std::string& name);
Role role_from_string(const std::string& name);

/**
 * A continuous distribution from the fixed set of families used to populate
 * random StQP matrices.
 *
 * Families:
 *  - Uniform01: U(0,1).
 *  - Exponential: unit rate, F(x) = 1 - e^-x.
 *  - LeftBoundedPower: F(x) = rho x^nu on [0, rho^(-1/nu)].
 *  - ExpTail(a, b, r, x0): symmetric about x0 with density
 *    K |x - x0|^(a+b-1) exp(-r |x - x0|^b). Its left tail is exactly of the
 *    TailParams form with c = r^(s-1) / (2 Gamma(s)), s = (a+b)/b, kappa = b.
 *    Requires a + b > 0. (a, b) = (-1, 2) with r = 1 is the normal law with
 *    variance 1/2; (0, 1) is the two-sided exponential.
 *  - Normal: standard normal (a=-1, b=2, r=1/2 in the tail form).
 *  - TwoSidedExponential: density e^-|x| / 2.
 *  - Cosh: density 1 / (pi cosh x).
 *
 * Values are immutable after construction and safe to share across threads.
 */
class DistributionSpec {
public:
    static DistributionSpec uniform01();
    static DistributionSpec exponential();
    static DistributionSpec left_bounded_power(double nu, double rho = 1.0);
    static DistributionSpec exp_tail(double a, double b, double r = 1.0, double x0 = 0.0);
    static DistributionSpec normal();
    static DistributionSpec two_sided_exponential();
    static DistributionSpec cosh();

    /// Short names used on the command line: uniform, exponential, normal,
    /// laplace (or two_sided_exponential), cosh, plus exp_tail:a,b[,r[,x0]]
    /// and power:nu[,rho].
    static DistributionSpec from_name(const std::string& name);

    Family family() const noexcept { return family_; }
    Role role() const noexcept { return role_; }
    DistributionSpec with_role(Role role) const;
    std::string name() const;

    double cdf(double x) const;
    /// log F(x), accurate far into the left tail (no underflow at x ~ -40).
    double log_cdf(double x) const;
    double density(double x) const;
    /// Inverse cdf for u in (0,1); throws DomainError otherwise.
    double quantile(double u) const;
    double sample(Stream& stream) const;

    /// Closure of the support, [lo, hi]; endpoints may be infinite.
    std::pair<double, double> support() const;

    std::optional<TailParams> tail() const;
    std::optional<LeftEdgeParams> left_edge() const;

    nlohmann::json to_json() const;
    static DistributionSpec from_json(const nlohmann::json& j);

    bool operator==(const DistributionSpec& other) const;

private:
    DistributionSpec(Family family, TailParams tail, LeftEdgeParams edge)
        : family_(family), tail_(tail), edge_(edge) {}

    Family family_;
    Role role_ = Role::OffDiagonalF;
    TailParams tail_;      // meaningful for ExpTail
    LeftEdgeParams edge_;  // meaningful for LeftBoundedPower
};

/// Sorted first k order statistics of n_pop i.i.d. U(0,1) variables.
struct OrderStatSample {
    std::int64_t n_pop = 0;
    std::int64_t k = 0;
    std::vector<double> u;
    /// The k leading unit exponentials, followed by the Gamma(n_pop+1-k)
    /// remainder of the normalizing sum.
    std::vector<double> spacings;
};

/// Builds U_j = (w_1 + ... + w_j) / (w_1 + ... + w_{n_pop+1}) from the first
/// k spacings and the sum of the remaining n_pop + 1 - k spacings.
OrderStatSample order_stats_from_spacings(std::int64_t n_pop, std::span<const double> leading,
                                          double remainder);

/// Draws the first k order statistics of n_pop uniforms in O(k) time using
/// the exponential-spacings representation.
OrderStatSample sample_order_stats(std::int64_t n_pop, std::int64_t k, Stream& stream);

/// S(U) = k^-1 sum log(1/u_j).
double s_statistic(std::span<const double> u);

/// Grid estimate of beta(j) = sup f(x')/f(x) over x' in [x, j x] for a
/// family with positive density on (0, B). `grid` is the number of
/// log-spaced points; the same grid is used for every j so the estimate is
/// nondecreasing in j.
double dominated_variation_beta(const DistributionSpec& spec, double j, int grid = 2000);

}  // namespace stqp
