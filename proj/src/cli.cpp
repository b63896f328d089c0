#include "stqp/cli.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "stqp/bounds.hpp"
#include "stqp/errors.hpp"
#include "stqp/experiments.hpp"
#include "stqp/instance.hpp"
#include "stqp/solver.hpp"

namespace stqp::cli {

namespace {

nlohmann::json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DomainError("cannot open " + path);
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw DomainError(path + ": " + e.what());
    }
}

// A distribution from a short name or a JSON file. The file holds either a
// full spec ({"family": ...}) or bare tail parameters ({"a":..,"b":..}).
DistributionSpec resolve_dist(const std::string& name, const std::string& params_path) {
    if (params_path.empty()) return DistributionSpec::from_name(name);
    const nlohmann::json j = read_json_file(params_path);
    if (j.contains("family")) return DistributionSpec::from_json(j);
    return DistributionSpec::exp_tail(j.at("a").get<double>(), j.at("b").get<double>(), j.value("r", 1.0),
                                      j.value("x0", 0.0));
}

TailParams resolve_tail(const std::string& params_path, double a, double b) {
    TailParams t;
    t.a = a;
    t.b = b;
    if (!params_path.empty()) {
        const nlohmann::json j = read_json_file(params_path);
        if (j.contains("family")) {
            const auto tail = DistributionSpec::from_json(j).tail();
            if (!tail) throw UnsupportedFamily("distribution in " + params_path + " has no tail parameters");
            return *tail;
        }
        t.a = j.value("a", a);
        t.b = j.value("b", b);
    }
    return t;
}

void write_text(const std::string& path, const std::string& text, std::ostream& out) {
    if (path.empty() || path == "-") {
        out << text;
        return;
    }
    std::ofstream f(path);
    if (!f) throw DomainError("cannot write " + path);
    f << text;
}

struct Globals {
    std::uint64_t seed = 0;
    int jobs = 1;
};

}  // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Random standard quadratic programs: generation, certified solving, bounds and campaigns", "stqp"};
    app.require_subcommand(1);
    app.fallthrough();
    Globals g;
    app.add_option("--seed", g.seed, "Master seed; every random stream derives from it");
    app.add_option("--jobs", g.jobs, "Worker threads; outputs do not depend on it")->check(CLI::PositiveNumber);

    // gen
    auto* gen = app.add_subcommand("gen", "Generate a random instance");
    std::string gen_model = "sym", gen_dist = "uniform", gen_diag, gen_params, gen_out;
    int gen_n = 0;
    bool gen_relabel = false;
    gen->add_option("--model", gen_model, "sym | wigner");
    gen->add_option("--dist", gen_dist, "Entry law (off-diagonal; also diagonal unless --diag-dist)");
    gen->add_option("--diag-dist", gen_diag, "Diagonal law for the sym model");
    gen->add_option("--params", gen_params, "JSON distribution spec or tail parameters for --dist");
    gen->add_option("--n", gen_n, "Dimension")->required();
    gen->add_option("--out", gen_out, "Matrix text file (a .json provenance sidecar is written next to it)")->required();
    gen->add_flag("--relabel", gen_relabel, "Sort the diagonal increasingly");

    // solve
    auto* solve = app.add_subcommand("solve", "Certified global minimum of x^T Q x over the simplex");
    std::string solve_in, solve_json, solve_enum;
    int solve_kmax = 0;
    solve->add_option("--in", solve_in, "Matrix text file")->required();
    solve->add_option("--kmax", solve_kmax, "Largest support size examined (default: uncapped)");
    solve->add_option("--enumeration", solve_enum, "full | pruned | brute_force");
    solve->add_option("--json", solve_json, "Output file (default: standard output)");

    // oracle-compare
    auto* cmp = app.add_subcommand("oracle-compare", "Solver against brute-force enumeration of all faces");
    std::string cmp_dist = "normal", cmp_model = "sym", cmp_params;
    int cmp_n = 8;
    std::int64_t cmp_reps = 50;
    cmp->add_option("--n", cmp_n, "Dimension (at most 15)");
    cmp->add_option("--reps", cmp_reps, "Instances")->check(CLI::PositiveNumber);
    cmp->add_option("--dist", cmp_dist, "Entry law");
    cmp->add_option("--params", cmp_params, "JSON distribution spec or tail parameters");
    cmp->add_option("--model", cmp_model, "sym | wigner");

    // bounds
    auto* bnd = app.add_subcommand("bounds", "Evaluate bound formulas over an (n,k) grid");
    std::vector<std::string> bnd_ids;
    std::vector<std::int64_t> bnd_n, bnd_k;
    bounds::EvalRequest req;
    std::string bnd_params, bnd_csv, bnd_g = "uniform", bnd_f = "uniform";
    double sigma = 0.0;
    bnd->add_option("--formula", bnd_ids, "Formula ids; 'list' prints them")->required();
    bnd->add_option("--n", bnd_n, "One or more n");
    bnd->add_option("--k", bnd_k, "One or more k");
    bnd->add_option("--alpha", req.alpha, "alpha for k_n and gamma(alpha)");
    bnd->add_option("--nu", req.nu, "Edge power for c_nu");
    bnd->add_option("--d", req.d, "Exponent d in the poly-log bound");
    bnd->add_option("--sigma", sigma, "sigma for the validity window of the poly-log bound");
    bnd->add_option("--a", req.tail.a, "Tail exponent a");
    bnd->add_option("--b", req.tail.b, "Tail power b");
    bnd->add_option("--params", bnd_params, "JSON tail parameters (overrides --a/--b)");
    bnd->add_option("--g-dist", bnd_g, "Diagonal law for Monte Carlo formulas");
    bnd->add_option("--f-dist", bnd_f, "Off-diagonal law for Monte Carlo formulas");
    bnd->add_option("--reps", req.reps, "Monte Carlo replications")->check(CLI::PositiveNumber);
    bnd->add_option("--csv", bnd_csv, "Output CSV (default: standard output)");

    // mc
    auto* mc = app.add_subcommand("mc", "Monte Carlo experiments");
    std::string mc_kind = "campaign", mc_config, mc_out, mc_dist = "uniform";
    int mc_n = 2;
    std::int64_t mc_k = 1, mc_reps = 100000;
    double mc_alpha = 2.0 / (3.0 * 2.718281828459045), mc_beta = 0.25;
    bool mc_svg = false;
    mc->add_option("--kind", mc_kind, "campaign | bound2 | s-concentration")
        ->check(CLI::IsMember({"campaign", "bound2", "s-concentration"}));
    mc->add_option("--config", mc_config, "Campaign config JSON (schema 1)");
    mc->add_option("--out", mc_out, "Campaign output directory (overrides the config)");
    mc->add_flag("--svg", mc_svg, "Also write survival.svg");
    mc->add_option("--n", mc_n, "Dimension");
    mc->add_option("--k", mc_k, "k for s-concentration");
    mc->add_option("--reps", mc_reps, "Replications")->check(CLI::PositiveNumber);
    mc->add_option("--dist", mc_dist, "Entry law for bound2");
    mc->add_option("--alpha", mc_alpha, "alpha for s-concentration");
    mc->add_option("--beta", mc_beta, "beta for s-concentration");

    // verify-tail
    auto* vt = app.add_subcommand("verify-tail", "Fit the left tail of the averaged model's off-diagonal law");
    double vt_a = -1.0, vt_b = 2.0, vt_r = 1.0, vt_lo = -8.0, vt_hi = -4.0;
    int vt_points = 41;
    bool vt_fit_b = false;
    std::string vt_csv;
    vt->add_option("--a", vt_a, "Tail exponent a of G");
    vt->add_option("--b", vt_b, "Tail power b of G");
    vt->add_option("--r", vt_r, "Tail rate r of G");
    vt->add_option("--xmin", vt_lo, "Left end of the grid");
    vt->add_option("--xmax", vt_hi, "Right end of the grid");
    vt->add_option("--points", vt_points, "Grid points")->check(CLI::Range(4, 100000));
    vt->add_flag("--fit-b", vt_fit_b, "Fit the power b jointly");
    vt->add_option("--csv", vt_csv, "Per-point table");

    // report
    auto* rep = app.add_subcommand("report", "Summarize a campaign output directory");
    std::string rep_dir;
    bool rep_svg = false;
    rep->add_option("--dir", rep_dir, "Directory written by mc --kind campaign")->required();
    rep->add_flag("--svg", rep_svg, "Rewrite survival.svg from the stored histogram");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n\n" << app.help();
        return 1;
    }

    try {
        if (*gen) {
            const Model model = model_from_string(gen_model);
            const DistributionSpec off = resolve_dist(gen_dist, gen_params);
            const DistributionSpec diag = gen_diag.empty() ? off : DistributionSpec::from_name(gen_diag);
            Instance inst = generate(model, diag, off, gen_n, g.seed);
            if (gen_relabel) inst = relabel_by_diagonal(inst);
            save_instance(gen_out, inst);
            return 0;
        }
        if (*solve) {
            const Instance inst = load_instance(solve_in);
            SolveOptions opts;
            if (solve_kmax > 0) opts.k_max = solve_kmax;
            if (!solve_enum.empty()) {
                if (solve_enum == "full") opts.enumeration = Enumeration::Full;
                else if (solve_enum == "pruned") opts.enumeration = Enumeration::Pruned;
                else if (solve_enum == "brute_force") opts.enumeration = Enumeration::BruteForce;
                else throw DomainError("unknown enumeration '" + solve_enum + "'");
            }
            const Solution sol = solve_global(inst, opts);
            write_text(solve_json, sol.to_json().dump(2) + "\n", out);
            return 0;
        }
        if (*cmp) {
            if (cmp_n < 1 || cmp_n > kMaxOracleDimension) {
                throw CostGuard("oracle-compare: n must lie in [1, " + std::to_string(kMaxOracleDimension) + "]");
            }
            const Model model = model_from_string(cmp_model);
            const DistributionSpec dist = resolve_dist(cmp_dist, cmp_params);
            std::int64_t mismatches = 0;
            for (std::int64_t r = 0; r < cmp_reps; ++r) {
                const Instance inst = generate(model, dist, dist, cmp_n, derive_seed(g.seed, static_cast<std::uint64_t>(r)));
                const Solution a = solve_global(inst);
                const Solution b = brute_force_oracle(inst);
                const bool same = a.support == b.support && std::fabs(a.lambda_star - b.lambda_star) <= 1e-9;
                if (!same) {
                    ++mismatches;
                    err << "mismatch at replication " << r << ": solver " << a.to_json()["support"].dump() << ' '
                        << a.lambda_star << ", oracle " << b.to_json()["support"].dump() << ' ' << b.lambda_star << '\n';
                }
            }
            out << "agree " << (cmp_reps - mismatches) << '/' << cmp_reps << '\n';
            return mismatches == 0 ? 0 : 1;
        }
        if (*bnd) {
            if (bnd_ids.size() == 1 && bnd_ids[0] == "list") {
                for (const auto& id : bounds::formula_ids()) out << id << '\n';
                return 0;
            }
            req.seed = g.seed;
            req.jobs = g.jobs;
            if (sigma > 0.0) req.sigma = sigma;
            if (!bnd_params.empty()) req.tail = resolve_tail(bnd_params, req.tail.a, req.tail.b);
            req.g = DistributionSpec::from_name(bnd_g).with_role(Role::DiagonalG);
            req.f = DistributionSpec::from_name(bnd_f);
            if (bnd_n.empty()) bnd_n.push_back(0);
            if (bnd_k.empty()) bnd_k.push_back(0);
            bounds::BoundReport report;
            report.inputs = {{"alpha", req.alpha}, {"nu", req.nu}, {"d", req.d}, {"a", req.tail.a}, {"b", req.tail.b}};
            for (const auto& id : bnd_ids) {
                for (auto n : bnd_n) {
                    for (auto k : bnd_k) {
                        req.formula_id = id;
                        req.n = n;
                        req.k = k;
                        report.rows.push_back(bounds::evaluate(req));
                    }
                }
            }
            std::ostringstream csv;
            report.write_csv(csv);
            write_text(bnd_csv, csv.str(), out);
            return 0;
        }
        if (*mc) {
            if (mc_kind == "campaign") {
                experiments::CampaignConfig cfg;
                if (!mc_config.empty()) cfg = experiments::CampaignConfig::from_json(read_json_file(mc_config));
                if (app.count("--seed")) cfg.seed = g.seed;
                cfg.jobs = g.jobs;
                if (!mc_out.empty()) cfg.output_dir = mc_out;
                if (mc_svg) cfg.svg = true;
                const auto results = experiments::run_support_campaign(cfg);
                experiments::write_campaign_outputs(cfg, results);
                bool ok = true;
                for (const auto& r : results) {
                    out << "n=" << r.hist.n << " solved=" << r.hist.solved() << " capped=" << r.hist.capped
                        << " failed=" << r.hist.failed << " max_support=" << r.max_support
                        << " bound_check=" << (r.comparison_applicable ? (r.comparison_ok ? "ok" : "violated") : "n/a")
                        << '\n';
                    ok = ok && r.hist.failed == 0;
                }
                return ok ? 0 : 2;
            }
            if (mc_kind == "bound2") {
                const auto e = experiments::run_bound2_event_frequency(mc_n, DistributionSpec::from_name(mc_dist),
                                                                       mc_reps, g.seed, g.jobs);
                out.precision(10);
                out << "n=" << mc_n << " frequency=" << e.mean << " se=" << e.se
                    << " bound=" << std::exp(bounds::lemma_bound2_rhs(mc_n)) << '\n';
                return 0;
            }
            const auto s = experiments::run_s_concentration(mc_n, mc_k, mc_alpha, mc_beta, mc_reps, g.seed, g.jobs);
            out.precision(10);
            out << "n=" << mc_n << " k=" << mc_k << " frequency=" << s.frequency << " se=" << s.se
                << " bound=" << s.bound << " threshold=" << s.threshold << '\n';
            return 0;
        }
        if (*vt) {
            const DistributionSpec dist = DistributionSpec::exp_tail(vt_a, vt_b, vt_r);
            const auto grid = experiments::linspace(vt_lo, vt_hi, vt_points);
            const auto fit = experiments::verify_fok_tail(dist, grid, vt_fit_b);
            const auto ratio = experiments::verify_g_over_f_divergence(dist, grid);
            out.precision(8);
            out << "a'_fit=" << fit.a_fit << " a'_target=" << fit.a_target << " r'_fit=" << fit.r_fit
                << " r'_target=" << fit.r_target << " b=" << fit.b_fit << " max_residual=" << fit.max_residual << '\n';
            out << "G/F increasing to the left: " << (ratio.increasing_to_left ? "yes" : "no")
                << ", log-ratio slope " << ratio.slope << " (predicted " << ratio.predicted_slope << ")\n";
            if (!vt_csv.empty()) {
                std::ostringstream csv;
                csv.precision(17);
                csv << "x,log_F,log_G_over_F\n";
                for (std::size_t i = 0; i < fit.x.size(); ++i) {
                    const auto it = std::find(ratio.x.begin(), ratio.x.end(), fit.x[i]);
                    csv << fit.x[i] << ',' << fit.log_f[i] << ',' << ratio.log_ratio[static_cast<std::size_t>(it - ratio.x.begin())]
                        << '\n';
                }
                write_text(vt_csv, csv.str(), out);
            }
            return 0;
        }
        if (*rep) {
            const std::filesystem::path dir(rep_dir);
            const auto cfg = experiments::CampaignConfig::from_json(read_json_file((dir / "config.json").string()));
            std::ifstream hist(dir / "histogram.csv");
            if (!hist) throw DomainError("missing histogram.csv in " + rep_dir);
            std::string line;
            std::getline(hist, line);
            const std::string expected = "# config_hash=" + cfg.hash();
            if (line != expected) throw DomainError("histogram.csv does not match config.json (hash mismatch)");
            std::getline(hist, line);
            std::vector<experiments::CampaignResult> results;
            out << "config_hash " << cfg.hash() << '\n' << "n  k  count  survival\n";
            while (std::getline(hist, line)) {
                std::stringstream row(line);
                std::string cell;
                std::vector<std::string> cells;
                while (std::getline(row, cell, ',')) cells.push_back(cell);
                if (cells.size() < 9) continue;
                const int n = std::stoi(cells[0]);
                const int k = std::stoi(cells[1]);
                if (results.empty() || results.back().hist.n != n) {
                    experiments::CampaignResult r;
                    r.hist.n = n;
                    r.hist.counts.assign(static_cast<std::size_t>(n) + 1, 0);
                    r.hist.capped = std::stoll(cells[5]);
                    r.hist.failed = std::stoll(cells[6]);
                    r.hist.reps = std::stoll(cells[7]);
                    r.hist.seed = std::stoull(cells[8]);
                    results.push_back(std::move(r));
                }
                auto& r = results.back();
                r.hist.counts[static_cast<std::size_t>(k)] = std::stoll(cells[2]);
                if (r.hist.counts[static_cast<std::size_t>(k)] > 0) r.max_support = k;
                out << n << "  " << k << "  " << cells[2] << "  " << cells[4] << '\n';
            }
            for (const auto& r : results) {
                out << "n=" << r.hist.n << " reps=" << r.hist.reps << " capped=" << r.hist.capped
                    << " failed=" << r.hist.failed << '\n';
            }
            if (rep_svg) {
                std::ofstream svg(dir / "survival.svg");
                experiments::write_survival_svg(svg, results, cfg.hash());
            }
            return 0;
        }
    } catch (const NumericalFailure& e) {
        err << "numerical failure: " << e.what() << '\n';
        return 2;
    } catch (const DomainError& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    } catch (const nlohmann::json::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::filesystem::filesystem_error& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}

int dispatch(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return dispatch(args, std::cout, std::cerr);
}

}  // namespace stqp::cli
