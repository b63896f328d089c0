#include "stqp/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numbers>
#include <ostream>

#include "stqp/errors.hpp"
#include "stqp/parallel.hpp"
#include "stqp/quadrature.hpp"
#include "stqp/solver.hpp"

namespace stqp::experiments {

namespace {

constexpr std::uint64_t kKeyLabel = 0x6b65792d6d63ULL;
constexpr std::int64_t kCapped = -1;
constexpr std::int64_t kFailed = -2;

std::string policy_name(KMaxPolicy p) {
    switch (p) {
        case KMaxPolicy::Sqrt: return "sqrt";
        case KMaxPolicy::Fixed: return "fixed";
        case KMaxPolicy::None: return "none";
    }
    return "sqrt";
}

KMaxPolicy policy_from_name(const std::string& s) {
    if (s == "sqrt") return KMaxPolicy::Sqrt;
    if (s == "fixed") return KMaxPolicy::Fixed;
    if (s == "none") return KMaxPolicy::None;
    throw DomainError("unknown k_max policy: " + s);
}

std::string hex16(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

bounds::McEstimate bernoulli_estimate(std::int64_t hits, std::int64_t reps, std::uint64_t seed) {
    bounds::McEstimate e;
    e.reps = reps;
    e.seed = seed;
    e.mean = static_cast<double>(hits) / static_cast<double>(reps);
    e.se = reps > 1 ? std::sqrt(e.mean * (1.0 - e.mean) / static_cast<double>(reps)) : 0.0;
    return e;
}

TailParams tail_of(const DistributionSpec& g) {
    const auto tail = g.tail();
    if (!tail) throw UnsupportedFamily("family " + g.name() + " has no left-tail parameters");
    return *tail;
}

// Least squares on the basis {1, log t, t^b}; returns coefficients and the
// largest absolute residual.
std::pair<Eigen::Vector3d, double> fit_three_basis(const std::vector<double>& t, const std::vector<double>& y,
                                                   double b) {
    const auto m = static_cast<Eigen::Index>(t.size());
    Eigen::MatrixXd design(m, 3);
    Eigen::VectorXd rhs(m);
    for (Eigen::Index i = 0; i < m; ++i) {
        design(i, 0) = 1.0;
        design(i, 1) = std::log(t[i]);
        design(i, 2) = std::pow(t[i], b);
        rhs[i] = y[i];
    }
    const Eigen::Vector3d coef = design.colPivHouseholderQr().solve(rhs);
    const double resid = (design * coef - rhs).cwiseAbs().maxCoeff();
    return {coef, resid};
}

double sum_squares(const std::vector<double>& t, const std::vector<double>& y, double b) {
    const auto [coef, resid] = fit_three_basis(t, y, b);
    double ss = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        const double r = coef[0] + coef[1] * std::log(t[i]) + coef[2] * std::pow(t[i], b) - y[i];
        ss += r * r;
    }
    return ss;
}

}  // namespace

nlohmann::json CampaignConfig::to_json() const {
    nlohmann::json j;
    j["schema"] = 1;
    j["model"] = stqp::to_string(model);
    j["diag_spec"] = diag_spec.to_json();
    j["offdiag_spec"] = offdiag_spec.to_json();
    j["n_list"] = n_list;
    j["reps"] = reps;
    j["alpha"] = alpha;
    j["kmax"] = {{"policy", policy_name(kmax_policy)}, {"value", kmax_fixed}};
    j["seed"] = seed;
    j["jobs"] = jobs;
    j["key_reps"] = key_reps;
    j["output_dir"] = output_dir ? nlohmann::json(output_dir->string()) : nlohmann::json(nullptr);
    j["svg"] = svg;
    return j;
}

CampaignConfig CampaignConfig::from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw DomainError("campaign config must be a JSON object");
    if (j.value("schema", 1) != 1) throw DomainError("unsupported campaign config schema");
    CampaignConfig c;
    try {
        if (j.contains("model")) c.model = model_from_string(j.at("model").get<std::string>());
        if (j.contains("diag_spec")) c.diag_spec = DistributionSpec::from_json(j.at("diag_spec")).with_role(Role::DiagonalG);
        if (j.contains("offdiag_spec")) c.offdiag_spec = DistributionSpec::from_json(j.at("offdiag_spec"));
        if (j.contains("n_list")) c.n_list = j.at("n_list").get<std::vector<int>>();
        c.reps = j.value("reps", c.reps);
        c.alpha = j.value("alpha", c.alpha);
        if (j.contains("kmax")) {
            const auto& k = j.at("kmax");
            c.kmax_policy = policy_from_name(k.value("policy", std::string("sqrt")));
            c.kmax_fixed = k.value("value", 0);
        }
        c.seed = j.value("seed", c.seed);
        c.jobs = j.value("jobs", c.jobs);
        c.key_reps = j.value("key_reps", c.key_reps);
        if (j.contains("output_dir") && !j.at("output_dir").is_null()) {
            c.output_dir = j.at("output_dir").get<std::string>();
        }
        c.svg = j.value("svg", c.svg);
    } catch (const nlohmann::json::exception& e) {
        throw DomainError(std::string("bad campaign config: ") + e.what());
    }
    if (c.reps < 1) throw DomainError("campaign reps must be positive");
    if (c.key_reps < 1) throw DomainError("campaign key_reps must be positive");
    for (int n : c.n_list) {
        if (n < 2 || n > kMaxDimension) throw DomainError("campaign n out of range: " + std::to_string(n));
    }
    if (c.kmax_policy == KMaxPolicy::Fixed && c.kmax_fixed < 1) throw DomainError("fixed k_max must be positive");
    if (!(c.alpha > 0.0)) throw DomainError("alpha must be positive");
    return c;
}

std::string CampaignConfig::hash() const {
    // Worker count and output location do not affect results.
    nlohmann::json j = to_json();
    j.erase("jobs");
    j.erase("output_dir");
    j.erase("svg");
    const std::string text = j.dump();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    return hex16(h);
}

std::int64_t SupportHistogram::solved() const {
    std::int64_t s = 0;
    for (auto c : counts) s += c;
    return s;
}

double SupportHistogram::survival(int k) const {
    const std::int64_t total = solved();
    if (total == 0) return 0.0;
    std::int64_t above = 0;
    for (std::size_t j = static_cast<std::size_t>(std::max(0, k)); j < counts.size(); ++j) above += counts[j];
    return static_cast<double>(above) / static_cast<double>(total);
}

std::vector<CampaignResult> run_support_campaign(const CampaignConfig& cfg) {
    std::vector<CampaignResult> results;
    for (int n : cfg.n_list) {
        CampaignResult res;
        const std::uint64_t seed_n = derive_seed(cfg.seed, static_cast<std::uint64_t>(n));
        SolveOptions opts;
        switch (cfg.kmax_policy) {
            case KMaxPolicy::Sqrt: opts.k_max = default_k_max(n, cfg.alpha); break;
            case KMaxPolicy::Fixed: opts.k_max = cfg.kmax_fixed; break;
            case KMaxPolicy::None: opts.enumeration = Enumeration::Pruned; break;
        }
        res.k_max = opts.k_max.value_or(0);

        std::vector<std::int64_t> outcome(static_cast<std::size_t>(cfg.reps));
        parallel_for(outcome.size(), cfg.jobs, [&](std::size_t r) {
            try {
                const Instance inst = generate(cfg.model, cfg.diag_spec, cfg.offdiag_spec, n, derive_seed(seed_n, r));
                const Solution sol = solve_global(inst, opts);
                if (!verify_solution(inst.q, sol).empty()) {
                    outcome[r] = kFailed;
                } else if (sol.cap_reached) {
                    outcome[r] = kCapped;
                } else {
                    outcome[r] = sol.support_size();
                }
            } catch (const NumericalFailure&) {
                outcome[r] = kFailed;
            }
        });

        SupportHistogram& h = res.hist;
        h.n = n;
        h.reps = cfg.reps;
        h.seed = seed_n;
        h.counts.assign(static_cast<std::size_t>(n) + 1, 0);
        for (auto o : outcome) {
            if (o == kCapped) ++h.capped;
            else if (o == kFailed) ++h.failed;
            else ++h.counts[static_cast<std::size_t>(o)];
        }
        const std::int64_t solved = h.solved();
        for (std::size_t k = 0; k < h.counts.size(); ++k) {
            if (h.counts[k] > 0) res.max_support = static_cast<std::int64_t>(k);
        }

        // Mode, survival and the shape of the histogram past the mode.
        for (std::size_t k = 1; k < h.counts.size(); ++k) {
            if (h.counts[k] > h.counts[static_cast<std::size_t>(res.mode)]) res.mode = static_cast<int>(k);
        }
        for (int k = 1; k <= n; ++k) {
            if (h.survival(k + 1) > h.survival(k)) res.survival_monotone = false;
        }
        for (std::size_t k = static_cast<std::size_t>(res.mode) + 1; k < h.counts.size(); ++k) {
            if (h.counts[k] > h.counts[k - 1]) res.pmf_monotone_beyond_mode = false;
        }

        if (cfg.alpha > std::numbers::e * std::numbers::sqrt2) {
            res.cap_allowance = 10.0 * std::exp(bounds::gamma_alpha(cfg.alpha) * std::sqrt(static_cast<double>(n)));
            res.cap_ok = static_cast<double>(h.capped) / static_cast<double>(h.reps) <= res.cap_allowance;
        } else {
            res.cap_allowance = std::numeric_limits<double>::quiet_NaN();
            res.cap_ok = h.capped == 0;
        }

        // The key-expectation bound is derived for the symmetric i.i.d. model.
        res.comparison_applicable = cfg.model == Model::SymmetricIID && solved > 0;
        if (res.comparison_applicable) {
            for (std::size_t support = 2; support < h.counts.size(); ++support) {
                if (h.counts[support] == 0) continue;
                ComparisonRow row;
                row.k = static_cast<int>(support) - 1;
                row.empirical = static_cast<double>(h.counts[support]) / static_cast<double>(solved);
                const std::uint64_t key_seed = derive_seed(derive_seed(seed_n, kKeyLabel), static_cast<std::uint64_t>(row.k));
                row.key = bounds::mc_key_expectation(cfg.diag_spec, cfg.offdiag_spec, n, row.k, cfg.key_reps, key_seed,
                                                     cfg.jobs);
                row.bound = static_cast<double>(n) * (row.key.mean + 3.0 * row.key.se);
                row.ok = row.empirical <= row.bound;
                res.comparison_ok = res.comparison_ok && row.ok;
                res.comparison.push_back(row);
            }
        }
        results.push_back(std::move(res));
    }
    return results;
}

void write_histogram_csv(std::ostream& out, const std::vector<CampaignResult>& results, const std::string& hash) {
    out << "# config_hash=" << hash << '\n';
    out << "n,k,count,frequency,survival,capped,failed,reps,seed\n";
    out.precision(17);
    for (const auto& res : results) {
        const auto& h = res.hist;
        const double solved = static_cast<double>(std::max<std::int64_t>(1, h.solved()));
        for (std::size_t k = 1; k < h.counts.size(); ++k) {
            if (h.counts[k] == 0 && static_cast<std::int64_t>(k) > res.max_support) break;
            out << h.n << ',' << k << ',' << h.counts[k] << ',' << static_cast<double>(h.counts[k]) / solved << ','
                << h.survival(static_cast<int>(k)) << ',' << h.capped << ',' << h.failed << ',' << h.reps << ','
                << h.seed << '\n';
        }
    }
}

void write_comparison_csv(std::ostream& out, const std::vector<CampaignResult>& results, const std::string& hash) {
    out << "# config_hash=" << hash << '\n';
    out << "n,k,empirical,key_mean,key_se,key_reps,bound,ok\n";
    out.precision(17);
    for (const auto& res : results) {
        for (const auto& row : res.comparison) {
            out << res.hist.n << ',' << row.k << ',' << row.empirical << ',' << row.key.mean << ',' << row.key.se << ','
                << row.key.reps << ',' << row.bound << ',' << (row.ok ? 1 : 0) << '\n';
        }
    }
}

void write_survival_svg(std::ostream& out, const std::vector<CampaignResult>& results, const std::string& hash) {
    constexpr double kWidth = 640.0;
    constexpr double kHeight = 400.0;
    constexpr double kMargin = 50.0;
    std::int64_t max_k = 2;
    double min_p = 1.0;
    for (const auto& res : results) {
        max_k = std::max(max_k, res.max_support + 1);
        min_p = std::min(min_p, 1.0 / static_cast<double>(std::max<std::int64_t>(1, res.hist.solved())));
    }
    const double log_lo = std::floor(std::log10(min_p)) - 0.5;
    auto px = [&](double k) { return kMargin + (k - 1.0) / static_cast<double>(max_k - 1) * (kWidth - 2 * kMargin); };
    auto py = [&](double p) {
        const double lp = std::max(log_lo, std::log10(std::max(p, 1e-300)));
        return kMargin + (0.0 - lp) / (0.0 - log_lo) * (kHeight - 2 * kMargin);
    };
    static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight << "\">\n";
    out << "<!-- config_hash=" << hash << " -->\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<line x1=\"" << kMargin << "\" y1=\"" << kHeight - kMargin << "\" x2=\"" << kWidth - kMargin << "\" y2=\""
        << kHeight - kMargin << "\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << kMargin << "\" y1=\"" << kMargin << "\" x2=\"" << kMargin << "\" y2=\"" << kHeight - kMargin
        << "\" stroke=\"black\"/>\n";
    for (int d = 0; d >= static_cast<int>(std::ceil(log_lo)); --d) {
        out << "<text x=\"5\" y=\"" << py(std::pow(10.0, d)) + 4 << "\" font-size=\"11\">1e" << d << "</text>\n";
    }
    for (std::int64_t k = 1; k <= max_k; ++k) {
        out << "<text x=\"" << px(static_cast<double>(k)) - 3 << "\" y=\"" << kHeight - kMargin + 15
            << "\" font-size=\"11\">" << k << "</text>\n";
    }
    out << "<text x=\"" << kWidth / 2 - 60 << "\" y=\"" << kHeight - 10
        << "\" font-size=\"12\">k (P{K_n &gt;= k}, log scale)</text>\n";
    for (std::size_t i = 0; i < results.size(); ++i) {
        const auto& res = results[i];
        const char* color = colors[i % 6];
        out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
        for (std::int64_t k = 1; k <= res.max_support; ++k) {
            out << px(static_cast<double>(k)) << ',' << py(res.hist.survival(static_cast<int>(k))) << ' ';
        }
        out << "\"/>\n";
        for (const auto& row : res.comparison) {
            out << "<circle cx=\"" << px(row.k + 1.0) << "\" cy=\"" << py(std::min(1.0, row.bound))
                << "\" r=\"3\" fill=\"none\" stroke=\"" << color << "\"/>\n";
        }
        out << "<text x=\"" << kWidth - kMargin - 60 << "\" y=\"" << kMargin + 15 * static_cast<double>(i)
            << "\" font-size=\"12\" fill=\"" << color << "\">n=" << res.hist.n << "</text>\n";
    }
    out << "</svg>\n";
}

void write_campaign_outputs(const CampaignConfig& cfg, const std::vector<CampaignResult>& results) {
    if (!cfg.output_dir) return;
    std::filesystem::create_directories(*cfg.output_dir);
    const std::string hash = cfg.hash();
    auto open = [&](const char* name) {
        std::ofstream f(*cfg.output_dir / name);
        if (!f) throw DomainError("cannot write " + (*cfg.output_dir / name).string());
        return f;
    };
    {
        auto f = open("histogram.csv");
        write_histogram_csv(f, results, hash);
    }
    {
        auto f = open("comparison.csv");
        write_comparison_csv(f, results, hash);
    }
    {
        auto f = open("config.json");
        nlohmann::json j = cfg.to_json();
        j["config_hash"] = hash;
        f << j.dump(2) << '\n';
    }
    if (cfg.svg) {
        auto f = open("survival.svg");
        write_survival_svg(f, results, hash);
    }
}

bounds::McEstimate run_bound2_event_frequency(int n, const DistributionSpec& spec, std::int64_t reps,
                                              std::uint64_t seed, int jobs) {
    if (n < 2 || n > 12) throw DomainError("bound2 event frequency: need 2 <= n <= 12");
    if (reps < 1) throw DomainError("bound2 event frequency: reps must be positive");
    std::vector<char> hit(static_cast<std::size_t>(reps), 0);
    const DistributionSpec diag = spec.with_role(Role::DiagonalG);
    parallel_for(hit.size(), jobs, [&](std::size_t r) {
        const Instance inst = generate(Model::SymmetricIID, diag, spec, n, derive_seed(seed, r));
        bool all = true;
        for (int i = 0; i < n && all; ++i) {
            for (int j = i + 1; j < n && all; ++j) {
                all = inst.q(i, j) <= std::max(inst.q(i, i), inst.q(j, j));
            }
        }
        hit[r] = all ? 1 : 0;
    });
    std::int64_t hits = 0;
    for (char c : hit) hits += c;
    return bernoulli_estimate(hits, reps, seed);
}

double log_average_cdf(const DistributionSpec& g, double x) {
    // P{X + Y <= 2x} = int G(2x - u) g(u) du, scaled by its peak so the
    // quadrature sees values of order one.
    auto log_integrand = [&](double u) {
        const double dens = g.density(u);
        if (!(dens > 0.0)) return -std::numeric_limits<double>::infinity();
        return g.log_cdf(2.0 * x - u) + std::log(dens);
    };
    const auto [lo, hi] = g.support();
    const double spread = std::max(1.0, g.quantile(0.99) - g.quantile(0.01));
    const double centre = g.tail() ? g.tail()->x0 : g.quantile(0.5);
    const double left = std::max(lo, std::min(2.0 * x, centre) - 4.0 * spread - std::fabs(x));
    const double right = std::min(hi, std::max(2.0 * x, centre) + 4.0 * spread);

    double peak = -std::numeric_limits<double>::infinity();
    double u_peak = centre;
    constexpr int kScan = 4000;
    for (int i = 0; i <= kScan; ++i) {
        const double u = left + (right - left) * i / kScan;
        const double v = log_integrand(u);
        if (std::isfinite(v) && v > peak) {
            peak = v;
            u_peak = u;
        }
    }
    if (!std::isfinite(peak)) return -std::numeric_limits<double>::infinity();

    auto integrand = [&](double u) {
        const double v = log_integrand(u);
        if (!std::isfinite(v)) return 0.0;
        return std::exp(v - peak);
    };

    // Kinks and singular points of the integrand become segment ends.
    std::vector<double> cuts{centre, 2.0 * x - centre, u_peak, x};
    if (std::isfinite(lo)) cuts.push_back(lo);
    if (std::isfinite(hi)) cuts.push_back(hi);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    cuts.erase(std::remove_if(cuts.begin(), cuts.end(), [&](double c) { return c < lo || c > hi; }), cuts.end());
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> edges;
    edges.push_back(std::isfinite(lo) ? lo : -inf);
    if (!std::isfinite(lo)) edges.push_back(cuts.front() - spread);
    for (double c : cuts) {
        if (c > edges.back()) edges.push_back(c);
    }
    if (!std::isfinite(hi)) {
        edges.push_back(edges.back() + spread);
        edges.push_back(inf);
    }

    double total = 0.0;
    for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
        if (edges[i] < edges[i + 1]) total += quad::integrate(integrand, edges[i], edges[i + 1], 1e-12).value;
    }
    if (!(total > 0.0)) throw NumericalFailure("average-model cdf: quadrature returned no mass at x=" + std::to_string(x));
    return peak + std::log(total);
}

TailFit verify_fok_tail(const DistributionSpec& g, const std::vector<double>& x_grid, bool fit_b) {
    const TailParams tail = tail_of(g);
    if (x_grid.size() < 4) throw DomainError("verify_fok_tail: need at least 4 grid points");
    TailFit fit;
    const auto [a_t, r_unit] = bounds::a_prime(tail.a, tail.b);
    fit.a_target = a_t;
    fit.r_target = tail.r * r_unit;
    std::vector<double> t;
    for (double x : x_grid) {
        if (!(x < tail.x0)) throw DomainError("verify_fok_tail: grid must lie left of x0");
        fit.x.push_back(x);
        fit.log_f.push_back(log_average_cdf(g, x));
        t.push_back(tail.x0 - x);
    }
    double b = tail.b;
    if (fit_b) {
        // Golden-section search for the power on [b/2, 2b].
        double lo = 0.5 * tail.b;
        double hi = 2.0 * tail.b;
        const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
        for (int it = 0; it < 100; ++it) {
            const double m1 = hi - phi * (hi - lo);
            const double m2 = lo + phi * (hi - lo);
            if (sum_squares(t, fit.log_f, m1) < sum_squares(t, fit.log_f, m2)) hi = m2;
            else lo = m1;
        }
        b = 0.5 * (lo + hi);
    }
    const auto [coef, resid] = fit_three_basis(t, fit.log_f, b);
    fit.log_c = coef[0];
    fit.a_fit = coef[1];
    fit.r_fit = -coef[2];
    fit.b_fit = b;
    fit.max_residual = resid;
    return fit;
}

RatioTable verify_g_over_f_divergence(const DistributionSpec& g, const std::vector<double>& x_grid) {
    const TailParams tail = tail_of(g);
    if (x_grid.size() < 4) throw DomainError("verify_g_over_f_divergence: need at least 4 grid points");
    RatioTable table;
    std::vector<double> xs = x_grid;
    std::sort(xs.begin(), xs.end());
    std::vector<double> t;
    for (double x : xs) {
        table.x.push_back(x);
        table.log_ratio.push_back(g.log_cdf(x) - log_average_cdf(g, x));
        t.push_back(tail.x0 - x);
    }
    // xs ascending, so moving left means decreasing index.
    for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
        if (!(table.log_ratio[i] > table.log_ratio[i + 1])) table.increasing_to_left = false;
    }
    for (double lr : table.log_ratio) {
        if (lr < 0.0) table.at_least_one = false;
    }
    const auto [coef, resid] = fit_three_basis(t, table.log_ratio, tail.b);
    (void)resid;
    table.slope = coef[2];
    table.predicted_slope = (std::pow(2.0, std::min(1.0, tail.b)) - 1.0) * tail.r;
    return table;
}

SConcentration run_s_concentration(std::int64_t n, std::int64_t k, double alpha, double beta, std::int64_t reps,
                                   std::uint64_t seed, int jobs) {
    if (n < 2 || k < 1 || k > n - 1) throw DomainError("s concentration: need 1 <= k <= n-1");
    if (!(alpha > 0.0) || !(beta > 0.0)) throw DomainError("s concentration: alpha and beta must be positive");
    if (!(alpha * std::numbers::e < 1.0 - beta)) throw DomainError("s concentration: requires alpha e < 1 - beta");
    if (reps < 1) throw DomainError("s concentration: reps must be positive");
    SConcentration out;
    out.threshold = std::log(static_cast<double>(n) / (alpha * static_cast<double>(k)));
    out.bound = std::pow(alpha * std::numbers::e / (1.0 - beta), beta * static_cast<double>(k));
    std::vector<char> hit(static_cast<std::size_t>(reps), 0);
    parallel_for(hit.size(), jobs, [&](std::size_t r) {
        Stream stream(seed, r);
        const OrderStatSample s = sample_order_stats(n - 1, k, stream);
        hit[r] = s_statistic(s.u) > out.threshold ? 1 : 0;
    });
    std::int64_t hits = 0;
    for (char c : hit) hits += c;
    const bounds::McEstimate e = bernoulli_estimate(hits, reps, seed);
    out.frequency = e.mean;
    out.se = e.se;
    out.reps = reps;
    out.ok = out.frequency <= out.slack * out.bound;
    return out;
}

std::vector<double> linspace(double lo, double hi, int points) {
    if (points < 2) throw DomainError("linspace: need at least 2 points");
    std::vector<double> v(static_cast<std::size_t>(points));
    for (int i = 0; i < points; ++i) v[i] = lo + (hi - lo) * i / (points - 1);
    return v;
}

}  // namespace stqp::experiments
