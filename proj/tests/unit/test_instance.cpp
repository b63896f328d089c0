#include <doctest.h>

#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "stqp/errors.hpp"
#include "stqp/instance.hpp"

using namespace stqp;

namespace {

Instance sym(int n, std::uint64_t seed, const DistributionSpec& d = DistributionSpec::uniform01()) {
    return generate(Model::SymmetricIID, d.with_role(Role::DiagonalG), d, n, seed);
}

}  // namespace

TEST_CASE("generation is deterministic and symmetric") {
    const auto a = sym(30, 9);
    const auto b = sym(30, 9);
    CHECK(a.q == b.q);
    CHECK(a.q == a.q.transpose());
    CHECK(sym(30, 10).q != a.q);
    CHECK(sym(1, 3).q.rows() == 1);
    CHECK_THROWS_AS(sym(0, 1), DomainError);
}

TEST_CASE("entry moments match the sampling law") {
    const int n = 50;
    const auto u = sym(n, 123);
    double s = 0.0;
    int m = 0;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j, ++m) s += u.q(i, j);
    const double se = std::sqrt(1.0 / 12.0 / m);
    CHECK(std::fabs(s / m - 0.5) < 3.0 * se);

    const auto w = generate(Model::WignerAverage, DistributionSpec::normal().with_role(Role::DiagonalG),
                            DistributionSpec::normal(), n, 77);
    CHECK(w.q == w.q.transpose());
    double s1 = 0.0;
    double s2 = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            s1 += w.q(i, j);
            s2 += w.q(i, j) * w.q(i, j);
        }
    const double mean = s1 / m;
    const double var = (s2 - m * mean * mean) / (m - 1);
    // (X+Y)/2 has variance 1/2; sd of a normal sample variance is var sqrt(2/(m-1))
    CHECK(std::fabs(var - 0.5) < 3.0 * 0.5 * std::sqrt(2.0 / (m - 1)));
}

TEST_CASE("relabel by diagonal") {
    Matrix q(2, 2);
    q << 3.0, 0.5, 0.5, 1.0;
    const auto r = relabel_by_diagonal(Instance::from_matrix(q));
    CHECK(r.q(0, 0) == 1.0);
    CHECK(r.q(1, 1) == 3.0);
    CHECK(r.relabeled);

    const auto inst = sym(8, 5);
    const auto p = relabel_by_diagonal(inst);
    for (int i = 1; i < 8; ++i) CHECK(p.q(i, i) > p.q(i - 1, i - 1));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> e1(Eigen::MatrixXd(inst.q));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> e2(Eigen::MatrixXd(p.q));
    CHECK((e1.eigenvalues() - e2.eigenvalues()).cwiseAbs().maxCoeff() < 1e-10);

    // already sorted: unchanged
    CHECK(relabel_by_diagonal(p).q == p.q);

    Matrix t(2, 2);
    t << 1.0, 0.2, 0.2, 1.0;
    CHECK_THROWS_AS(relabel_by_diagonal(Instance::from_matrix(t)), DegenerateInstance);
}

TEST_CASE("from_matrix rejects asymmetric input") {
    Matrix q(2, 2);
    q << 1.0, 0.2, 0.3, 1.0;
    CHECK_THROWS_AS(Instance::from_matrix(q), DomainError);
}

TEST_CASE("text round trip is exact") {
    const auto inst = sym(6, 42, DistributionSpec::normal());
    std::stringstream ss;
    write_matrix_text(ss, inst.q);
    CHECK(read_matrix_text(ss) == inst.q);

    std::stringstream bad("3\n1 2 3\n");
    CHECK_THROWS(read_matrix_text(bad));
}
