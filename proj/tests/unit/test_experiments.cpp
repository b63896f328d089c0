#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "stqp/errors.hpp"
#include "stqp/experiments.hpp"
#include "stqp/solver.hpp"

using namespace stqp;
using namespace stqp::experiments;

namespace {

CampaignConfig small_config() {
    CampaignConfig c;
    c.n_list = {2};
    c.reps = 400;
    c.seed = 17;
    c.key_reps = 500;
    return c;
}

}  // namespace

TEST_CASE("config json round trip and hash") {
    auto c = small_config();
    c.kmax_policy = KMaxPolicy::Fixed;
    c.kmax_fixed = 5;
    const auto back = CampaignConfig::from_json(c.to_json());
    CHECK(back.to_json() == c.to_json());
    CHECK(back.hash() == c.hash());
    CHECK(c.hash().size() == 16);

    auto d = c;
    d.jobs = 4;
    CHECK(d.hash() == c.hash());
    d.reps = 401;
    CHECK(d.hash() != c.hash());

    auto bad = c.to_json();
    bad["schema"] = 99;
    CHECK_THROWS(CampaignConfig::from_json(bad));
}

TEST_CASE("n = 2 campaign against case analysis") {
    const auto cfg = small_config();
    const auto res = run_support_campaign(cfg);
    REQUIRE(res.size() == 1);
    const auto& h = res[0].hist;
    CHECK(h.solved() + h.capped + h.failed == h.reps);
    CHECK(h.failed == 0);

    // interior optimum iff Q12 < min(Q11, Q22)
    std::int64_t interior = 0;
    for (std::int64_t r = 0; r < cfg.reps; ++r) {
        const auto inst = generate(cfg.model, cfg.diag_spec, cfg.offdiag_spec, 2,
                                   derive_seed(derive_seed(cfg.seed, 2), static_cast<std::uint64_t>(r)));
        if (inst.q(0, 1) < std::min(inst.q(0, 0), inst.q(1, 1))) ++interior;
    }
    CHECK(h.counts.at(2) == interior);
    CHECK(interior > 0);
    CHECK(interior < cfg.reps);

    auto par = cfg;
    par.jobs = 2;
    const auto again = run_support_campaign(par);
    CHECK(again[0].hist.counts == h.counts);
}

TEST_CASE("campaign outputs carry the config hash") {
    auto cfg = small_config();
    cfg.n_list = {2, 5};
    cfg.reps = 50;
    cfg.svg = true;
    const auto dir = std::filesystem::temp_directory_path() / "stqp_unit_campaign";
    std::filesystem::remove_all(dir);
    cfg.output_dir = dir;
    write_campaign_outputs(cfg, run_support_campaign(cfg));
    for (const char* f : {"histogram.csv", "comparison.csv", "config.json", "survival.svg"}) {
        CHECK(std::filesystem::exists(dir / f));
    }
    std::ifstream in(dir / "histogram.csv");
    std::string first;
    std::getline(in, first);
    CHECK(first == "# config_hash=" + cfg.hash());
    std::filesystem::remove_all(dir);
}

TEST_CASE("bound-2 event frequency") {
    const auto u = DistributionSpec::uniform01();
    const auto m = run_bound2_event_frequency(2, u, 30000, 8);
    CHECK(std::fabs(m.mean - 2.0 / 3.0) < 3.0 * m.se);
    const auto m3 = run_bound2_event_frequency(3, u, 30000, 9);
    CHECK(m3.mean <= 1.0 / 3.0 + 3.0 * m3.se);
    CHECK_THROWS_AS(run_bound2_event_frequency(13, u, 10, 1), DomainError);
}

TEST_CASE("averaged cdf closed forms") {
    // (X+Y)/2 for standard normals is N(0, 1/2)
    for (double x : {-6.0, -2.0, 0.5}) {
        CHECK(log_average_cdf(DistributionSpec::normal(), x) ==
              doctest::Approx(std::log(0.5 * std::erfc(-x))).epsilon(1e-9));
    }
    // Laplace: P{(X+Y)/2 <= x} = (1 - x) e^{2x} / 2 for x <= 0
    for (double x : {-8.0, -3.0, -0.5}) {
        CHECK(log_average_cdf(DistributionSpec::two_sided_exponential(), x) ==
              doctest::Approx(std::log(0.5 * (1.0 - x)) + 2.0 * x).epsilon(1e-9));
    }
}

TEST_CASE("tail fit and G/F divergence in the normal-like case") {
    const auto g = DistributionSpec::exp_tail(-1.0, 2.0);
    const auto fit = verify_fok_tail(g, linspace(-8.0, -4.0, 41));
    CHECK(std::fabs(fit.a_fit - fit.a_target) < 0.15);
    CHECK(std::fabs(fit.r_fit / fit.r_target - 1.0) < 0.02);

    const auto tab = verify_g_over_f_divergence(g, std::vector<double>{-6.0, -5.5, -4.5, -4.0});
    CHECK(tab.log_ratio.front() > tab.log_ratio.back());
    CHECK(tab.increasing_to_left);
    CHECK(tab.at_least_one);
}

TEST_CASE("S concentration") {
    const double alpha = 2.0 / (3.0 * std::numbers::e);
    const auto s = run_s_concentration(10000, 40, alpha, 0.25, 5000, 3);
    CHECK(s.bound == doctest::Approx(std::pow(8.0 / 9.0, 10.0)).epsilon(1e-12));
    CHECK(s.frequency <= 2.0 * s.bound);
    CHECK_THROWS_AS(run_s_concentration(100, 5, 0.3, 0.25, 10, 1), DomainError);
}

TEST_CASE("linspace") {
    const auto g = linspace(-8.0, -4.0, 41);
    CHECK(g.size() == 41);
    CHECK(g.front() == -8.0);
    CHECK(g.back() == -4.0);
    CHECK(g[20] == doctest::Approx(-6.0));
}
