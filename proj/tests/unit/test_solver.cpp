#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "stqp/errors.hpp"
#include "stqp/instance.hpp"
#include "stqp/solver.hpp"

using namespace stqp;

namespace {

Matrix mat2(double a, double b, double c, double d) {
    Matrix q(2, 2);
    q << a, b, c, d;
    return q;
}

Matrix random_q(int n, std::uint64_t seed, const DistributionSpec& d = DistributionSpec::normal()) {
    return generate(Model::SymmetricIID, d.with_role(Role::DiagonalG), d, n, seed).q;
}

// Direct minimum of x^T Q x over a fine grid of the 2-simplex.
double grid_min_2(const Matrix& q) {
    double best = 1e300;
    for (int i = 0; i <= 100000; ++i) {
        const double t = i / 100000.0;
        best = std::min(best, q(0, 0) * t * t + 2 * q(0, 1) * t * (1 - t) + q(1, 1) * (1 - t) * (1 - t));
    }
    return best;
}

}  // namespace

TEST_CASE("face_solve examples") {
    Matrix one(1, 1);
    one << 2.0;
    auto r = face_solve(one);
    CHECK(r.feasible);
    CHECK(r.x(0) == doctest::Approx(1.0));
    CHECK(r.lambda == doctest::Approx(2.0));

    r = face_solve(mat2(1, 0, 0, 1));
    CHECK(r.feasible);
    CHECK(r.x(0) == doctest::Approx(0.5));
    CHECK(r.lambda == doctest::Approx(0.5));

    r = face_solve(mat2(0, 1, 1, 0));
    CHECK(r.feasible);
    CHECK(r.lambda == doctest::Approx(0.5));
    CHECK(check_second_order(mat2(0, 1, 1, 0), r.lambda) == doctest::Approx(-1.0));

    r = face_solve(Matrix::Zero(2, 2));
    CHECK_FALSE(r.feasible);
    CHECK(r.degenerate);
}

TEST_CASE("first and second order checks") {
    Vector u = Vector::Constant(3, 1.0 / 3.0);
    CHECK(check_first_order(Matrix::Identity(3, 3), u, 1.0 / 3.0) == doctest::Approx(0.0));

    Vector v(2);
    v << 1.0, 0.0;
    CHECK(check_first_order(mat2(0, 1, 1, 0), v, 0.0) == doctest::Approx(0.0));

    Matrix one(1, 1);
    one << 3.0;
    CHECK(check_second_order(one, 3.0) == doctest::Approx(0.0));
    CHECK(check_second_order(mat2(1, 0, 0, 1), 0.5) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("check_c1") {
    const std::vector<int> both{0, 1};
    CHECK(check_c1(mat2(1, 0, 0, 1), both) == true);
    CHECK(check_c1(mat2(1, 2, 2, 1), both) == false);
    CHECK_FALSE(check_c1(mat2(1, 0, 0, 1), std::vector<int>{0}).has_value());

    for (std::uint64_t s = 0; s < 300; ++s) {
        const auto q = random_q(7, s);
        const auto sol = solve_global(q);
        if (sol.support_size() > 1) CHECK(check_c1(q, sol.support) == true);
    }
}

TEST_CASE("solve_global examples") {
    auto sol = solve_global(mat2(1, 0, 0, 1));
    CHECK(sol.support == std::vector<int>{0, 1});
    CHECK(sol.lambda_star == doctest::Approx(0.5));
    CHECK(sol.certificate == CertificateKind::ExhaustiveEnumeration);

    sol = solve_global(mat2(0, 1, 1, 0));
    CHECK(sol.support == std::vector<int>{0});
    CHECK(sol.lambda_star == doctest::Approx(0.0));

    // every bordered system of size >= 2 is singular; vertices tie at 0
    sol = solve_global(Matrix::Zero(4, 4));
    CHECK(sol.support == std::vector<int>{0});

    Matrix one(1, 1);
    one << -2.5;
    CHECK(brute_force_oracle(one).lambda_star == -2.5);
}

TEST_CASE("n = 2 agrees with a grid search") {
    for (std::uint64_t s = 0; s < 50; ++s) {
        const auto q = random_q(2, s, DistributionSpec::uniform01());
        CHECK(solve_global(q).lambda_star == doctest::Approx(grid_min_2(q)).epsilon(1e-8));
    }
}

TEST_CASE("full, pruned and oracle agree") {
    for (const auto& d : {DistributionSpec::uniform01(), DistributionSpec::normal(), DistributionSpec::exponential()}) {
        for (std::uint64_t s = 0; s < 60; ++s) {
            const int n = 3 + static_cast<int>(s % 8);
            const auto q = random_q(n, 1000 + s, d);
            const auto full = solve_global(q);
            SolveOptions po;
            po.enumeration = Enumeration::Pruned;
            const auto pruned = solve_global(q, po);
            const auto oracle = brute_force_oracle(q);
            CHECK(full.support == oracle.support);
            CHECK(pruned.support == oracle.support);
            CHECK(std::fabs(full.lambda_star - oracle.lambda_star) <= 1e-9);
            CHECK(std::fabs(pruned.lambda_star - oracle.lambda_star) <= 1e-9);
            CHECK(verify_solution(q, full).empty());
            CHECK(verify_solution(q, pruned).empty());
            CHECK(full.first_order_slack >= -1e-9);
        }
    }
}

TEST_CASE("capped full and pruned enumeration agree at n = 20") {
    for (std::uint64_t s = 0; s < 10; ++s) {
        const auto q = random_q(20, 50 + s);
        SolveOptions fo;
        fo.k_max = 6;
        fo.enumeration = Enumeration::Full;
        SolveOptions po;
        po.k_max = 6;
        const auto full = solve_global(q, fo);
        const auto pruned = solve_global(q, po);
        CHECK(full.certificate == CertificateKind::SizeBoundedEnumeration);
        CHECK(pruned.enumeration == Enumeration::Pruned);
        CHECK(full.support == pruned.support);
        CHECK(full.lambda_star == doctest::Approx(pruned.lambda_star));
        CHECK(pruned.faces_examined < full.faces_examined);
    }
}

TEST_CASE("equivariance under permutation, scaling and shift") {
    for (std::uint64_t s = 0; s < 30; ++s) {
        const int n = 9;
        const auto q = random_q(n, 500 + s);
        const auto base = solve_global(q);

        std::vector<int> perm(n);
        std::iota(perm.begin(), perm.end(), 0);
        std::reverse(perm.begin(), perm.end());
        const auto p = solve_global(permute(q, perm));
        CHECK(p.lambda_star == doctest::Approx(base.lambda_star).epsilon(1e-12));
        std::vector<int> mapped;
        for (int i : p.support) mapped.push_back(perm[i]);
        std::sort(mapped.begin(), mapped.end());
        CHECK(mapped == base.support);

        const auto sc = solve_global(Matrix(3.0 * q));
        CHECK(sc.support == base.support);
        CHECK(sc.lambda_star == doctest::Approx(3.0 * base.lambda_star).epsilon(1e-12));

        const auto sh = solve_global(Matrix(q.array() + 5.0));
        CHECK(sh.support == base.support);
        CHECK(sh.lambda_star == doctest::Approx(base.lambda_star + 5.0).epsilon(1e-12));
    }
}

TEST_CASE("verify_solution catches tampering") {
    const auto q = random_q(6, 3);
    auto sol = solve_global(q);
    REQUIRE(verify_solution(q, sol).empty());
    sol.lambda_star += 0.1;
    CHECK_FALSE(verify_solution(q, sol).empty());
}

TEST_CASE("solution json uses one-based support") {
    const auto sol = solve_global(mat2(1, 0, 0, 1));
    const auto j = sol.to_json();
    CHECK(j["support"] == nlohmann::json::array({1, 2}));
    CHECK(j["certificate"]["kind"].is_string());
}

TEST_CASE("cost guards") {
    CHECK_THROWS_AS(solve_global(Matrix::Identity(26, 26)), CostGuard);
    CHECK_THROWS_AS(brute_force_oracle(Matrix::Identity(16, 16)), CostGuard);
    CHECK(default_k_max(100) == 40);
    CHECK(default_k_max(200) == 57);
}
