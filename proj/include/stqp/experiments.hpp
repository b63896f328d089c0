#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "stqp/bounds.hpp"
#include "stqp/instance.hpp"

namespace stqp::experiments {

enum class KMaxPolicy {
    Sqrt,   ///< ceil(alpha sqrt n)
    Fixed,  ///< a given cap
    None,   ///< uncapped (pruned enumeration, still exact)
};

struct CampaignConfig {
    Model model = Model::SymmetricIID;
    DistributionSpec diag_spec = DistributionSpec::uniform01().with_role(Role::DiagonalG);
    DistributionSpec offdiag_spec = DistributionSpec::uniform01();
    std::vector<int> n_list{50, 100, 200, 400};
    std::int64_t reps = 200;
    double alpha = 4.0;
    KMaxPolicy kmax_policy = KMaxPolicy::Sqrt;
    int kmax_fixed = 0;
    std::uint64_t seed = 0;
    int jobs = 1;
    /// Replications of the key expectation used in the bound comparison.
    std::int64_t key_reps = 20000;
    std::optional<std::filesystem::path> output_dir;
    bool svg = false;

    nlohmann::json to_json() const;
    /// Accepts {"schema": 1, ...}; missing fields keep their defaults.
    static CampaignConfig from_json(const nlohmann::json& j);
    /// FNV-1a of the canonical JSON, as 16 hex digits.
    std::string hash() const;
};

/// Empirical law of the optimal support size at one n.
struct SupportHistogram {
    int n = 0;
    std::vector<std::int64_t> counts;  ///< counts[k] = #replications with K_n = k
    std::int64_t capped = 0;           ///< size-bounded certificate with the cap hit
    std::int64_t failed = 0;           ///< numerical failure or failed re-check
    std::int64_t reps = 0;
    std::uint64_t seed = 0;

    std::int64_t solved() const;
    /// Share of solved replications with K_n >= k.
    double survival(int k) const;
};

/// Empirical P{K_n = k+1} against n (key expectation + 3 SE).
struct ComparisonRow {
    int k = 0;
    double empirical = 0.0;
    bounds::McEstimate key;
    double bound = 0.0;
    bool ok = true;
};

struct CampaignResult {
    SupportHistogram hist;
    int k_max = 0;  ///< 0 when uncapped
    std::vector<ComparisonRow> comparison;
    bool comparison_applicable = false;  ///< only the symmetric i.i.d. model
    bool comparison_ok = true;
    int mode = 0;
    bool survival_monotone = true;
    /// Whether the histogram itself is non-increasing past its mode.
    bool pmf_monotone_beyond_mode = true;
    /// 10 e^{gamma(alpha) sqrt n}, the allowance for capped replications.
    double cap_allowance = 0.0;
    bool cap_ok = true;
    std::int64_t max_support = 0;
};

/// For each n: generate, solve with the configured cap, record K_n.
/// Replication r at dimension n uses seed derive_seed(derive_seed(seed, n), r).
std::vector<CampaignResult> run_support_campaign(const CampaignConfig& cfg);

void write_histogram_csv(std::ostream& out, const std::vector<CampaignResult>& results, const std::string& hash);
void write_comparison_csv(std::ostream& out, const std::vector<CampaignResult>& results, const std::string& hash);
/// Survival function of K_n on a log axis, with n (key + 3 SE) marks.
void write_survival_svg(std::ostream& out, const std::vector<CampaignResult>& results, const std::string& hash);
/// Writes histogram.csv, comparison.csv, config.json (and survival.svg)
/// into cfg.output_dir.
void write_campaign_outputs(const CampaignConfig& cfg, const std::vector<CampaignResult>& results);

/// Frequency of the event Q_ij <= max(Q_ii, Q_jj) for all i != j over
/// i.i.d. instances with every entry drawn from `spec`. 2 <= n <= 12.
bounds::McEstimate run_bound2_event_frequency(int n, const DistributionSpec& spec, std::int64_t reps,
                                              std::uint64_t seed, int jobs = 1);

/// log of (G*G)(2x) = P{(X+Y)/2 <= x}, X, Y i.i.d. G.
double log_average_cdf(const DistributionSpec& g, double x);

struct TailFit {
    double log_c = 0.0;
    double a_fit = 0.0;
    double r_fit = 0.0;
    double b_fit = 0.0;  ///< fixed to G's b unless fitted jointly
    double a_target = 0.0;
    double r_target = 0.0;
    double max_residual = 0.0;
    std::vector<double> x;
    std::vector<double> log_f;
};

/// Least-squares fit of log F(x) = log c' + a' log|x - x0| - r' |x - x0|^b
/// over x_grid, F the off-diagonal cdf of the averaged model. Targets come
/// from a_prime scaled by G's rate r.
TailFit verify_fok_tail(const DistributionSpec& g, const std::vector<double>& x_grid, bool fit_b = false);

struct RatioTable {
    std::vector<double> x;
    std::vector<double> log_ratio;  ///< log G(x) - log F(x)
    bool increasing_to_left = true;
    bool at_least_one = true;
    double slope = 0.0;            ///< fitted coefficient of |x - x0|^b
    double predicted_slope = 0.0;  ///< (2^min(1,b) - 1) r
};

RatioTable verify_g_over_f_divergence(const DistributionSpec& g, const std::vector<double>& x_grid);

struct SConcentration {
    double frequency = 0.0;
    double se = 0.0;
    double threshold = 0.0;  ///< log(n / (alpha k))
    double bound = 0.0;      ///< (alpha e / (1 - beta))^(beta k)
    double slack = 2.0;
    bool ok = true;
    std::int64_t reps = 0;
};

/// Frequency of S(U) > log(n/(alpha k)) for the first k order statistics of
/// n-1 uniforms. Requires alpha e < 1 - beta.
SConcentration run_s_concentration(std::int64_t n, std::int64_t k, double alpha, double beta, std::int64_t reps,
                                   std::uint64_t seed, int jobs = 1);

/// Evenly spaced grid from lo to hi inclusive.
std::vector<double> linspace(double lo, double hi, int points);

}  // namespace stqp::experiments
