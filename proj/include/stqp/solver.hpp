#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "stqp/instance.hpp"

namespace stqp {

struct Tolerances {
    double positivity = 1e-12;    ///< x_i > positivity on the support
    double stationarity = 1e-9;   ///< |(Q_K x)_i - lambda| on the support
    double first_order = 1e-9;    ///< (Qx)_i - lambda >= -first_order off the support
    double eigenvalue = 1e-8;     ///< mineig(Q_K - lambda E) >= -eigenvalue
};

/// Stationary point of x^T Q_K x on the affine hull of a face.
struct FaceSolveResult {
    bool feasible = false;    ///< nonsingular system and every weight > positivity
    bool degenerate = false;  ///< bordered system numerically singular
    Vector x;
    double lambda = 0.0;
};

/// Solves [Q_K, -e; e^T, 0] (x, lambda) = (0, 1).
FaceSolveResult face_solve(const Matrix& q_k, double positivity_tol = 1e-12);

/// min_i (Qx)_i - lambda over all rows of Q; x is a full-length simplex vector.
double check_first_order(const Matrix& q, const Vector& x, double lambda);

/// Minimum eigenvalue of Q_K - lambda E_K (E_K the all-ones matrix).
double check_second_order(const Matrix& q_k, double lambda);

/// True iff some row of Q_K has arithmetic mean strictly below min_j Q_jj.
/// Returns nullopt (not applicable) when |support| <= 1. Indices are 0-based.
std::optional<bool> check_c1(const Matrix& q, std::span<const int> support);

enum class CertificateKind { ExhaustiveEnumeration, SizeBoundedEnumeration };

enum class Enumeration {
    Full,        ///< every support by size, then lexicographically
    Pruned,      ///< only supports admitted by the necessary conditions (see solve_global)
    BruteForce,  ///< oracle: every face, no optimality filtering
};

std::string to_string(CertificateKind kind);
std::string to_string(Enumeration e);

struct Solution {
    std::vector<int> support;  ///< sorted, 0-based
    Vector x;                  ///< full length n
    double lambda_star = 0.0;
    double first_order_slack = 0.0;    ///< min over i outside the support, 0 if none
    double second_order_mineig = 0.0;
    double stationarity_residual = 0.0;
    CertificateKind certificate = CertificateKind::ExhaustiveEnumeration;
    std::optional<int> k_max;
    Enumeration enumeration = Enumeration::Full;
    bool cap_reached = false;        ///< a larger admissible support was cut by k_max
    std::int64_t faces_examined = 0;

    int support_size() const { return static_cast<int>(support.size()); }
    nlohmann::json to_json() const;
};

struct SolveOptions {
    /// Largest support size examined; unset means no cap.
    std::optional<int> k_max;
    /// Defaults to Full without a cap and Pruned with one.
    std::optional<Enumeration> enumeration;
    Tolerances tol;
};

/// Largest n accepted by the uncapped Full enumeration.
inline constexpr int kMaxExhaustiveDimension = 25;
/// Largest n accepted by brute_force_oracle.
inline constexpr int kMaxOracleDimension = 15;

/**
 * Certified global minimum of x^T Q x over the simplex.
 *
 * Every examined support K goes through face_solve; a candidate must have
 * all weights positive, pass the first-order check (Qx)_i >= lambda off K
 * and the second-order check Q_K - lambda E_K >= 0. The minimal lambda wins,
 * ties going to the lexicographically smallest support.
 *
 * Full enumeration visits all supports of size <= k_max. Pruned enumeration
 * visits only supports that satisfy two conditions every optimal support
 * with |K| > 1 must meet, so it returns the same optimum:
 *  - some column of Q_K has mean <= lambda* <= min_j Q_jj, i.e. there is a
 *    hub h in K with sum_{j in K} Q_hj <= |K| min_j Q_jj;
 *  - Q_K is positive definite on {d : e^T d = 0}. This is inherited by
 *    every subset containing h, so the search over extensions of h stops
 *    at the first subset that fails.
 * With Pruned enumeration the certificate is exhaustive unless an
 * admissible support larger than k_max exists (cap_reached).
 */
Solution solve_global(const Matrix& q, const SolveOptions& options = {});
Solution solve_global(const Instance& inst, const SolveOptions& options = {});

/// Independent reference: every face of the simplex (2^n - 1 supports),
/// minimal x^T Q x among feasible stationary points. n <= 15.
Solution brute_force_oracle(const Matrix& q);
Solution brute_force_oracle(const Instance& inst);

/// Re-checks the Solution invariants against q. Returns an empty string when
/// they hold, otherwise a description of the first violation.
std::string verify_solution(const Matrix& q, const Solution& sol, const Tolerances& tol = {});

/// Default campaign cap ceil(alpha * sqrt(n)).
int default_k_max(int n, double alpha = 4.0);

}  // namespace stqp
