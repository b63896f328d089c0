#include "stqp/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

#include "stqp/errors.hpp"

namespace stqp {

namespace {

struct Candidate {
    std::vector<int> support;
    Vector x_k;
    double lambda = 0.0;
    double slack = 0.0;
    double mineig = 0.0;
    double residual = 0.0;
};

Matrix principal_submatrix(const Matrix& q, std::span<const int> support) {
    const auto k = static_cast<Eigen::Index>(support.size());
    Matrix out(k, k);
    for (Eigen::Index a = 0; a < k; ++a) {
        for (Eigen::Index b = 0; b < k; ++b) out(a, b) = q(support[a], support[b]);
    }
    return out;
}

double tie_tolerance(double lambda) { return 1e-12 * std::max(1.0, std::fabs(lambda)); }

// Strict ordering used to pick the optimum: smaller value, then
// lexicographically smaller support.
bool better(double lambda_a, const std::vector<int>& a, double lambda_b, const std::vector<int>& b) {
    const double tie = tie_tolerance(std::min(std::fabs(lambda_a), std::fabs(lambda_b)));
    if (lambda_a < lambda_b - tie) return true;
    if (lambda_b < lambda_a - tie) return false;
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

// min over i outside the support of (Q_{i,K} x_K) - lambda; 0 when the
// support is everything.
double off_support_slack(const Matrix& q, std::span<const int> support, const Vector& x_k, double lambda) {
    const auto n = static_cast<int>(q.rows());
    double slack = std::numeric_limits<double>::infinity();
    std::size_t next = 0;
    for (int i = 0; i < n; ++i) {
        if (next < support.size() && support[next] == i) {
            ++next;
            continue;
        }
        double row = 0.0;
        for (std::size_t a = 0; a < support.size(); ++a) row += q(i, support[a]) * x_k[static_cast<Eigen::Index>(a)];
        slack = std::min(slack, row - lambda);
    }
    return std::isinf(slack) ? 0.0 : slack;
}

class Search {
public:
    Search(const Matrix& q, const Tolerances& tol) : q_(q), tol_(tol) {}

    // Face solve plus both certificates; records the candidate if it passes
    // and beats the incumbent.
    void examine(const std::vector<int>& support) {
        ++examined_;
        const Matrix q_k = principal_submatrix(q_, support);
        const FaceSolveResult face = face_solve(q_k, tol_.positivity);
        if (!face.feasible) return;

        const double scale = std::max(1.0, q_k.cwiseAbs().maxCoeff());
        const double residual = ((q_k * face.x).array() - face.lambda).abs().maxCoeff();
        if (residual > tol_.stationarity * scale) return;
        const double slack = off_support_slack(q_, support, face.x, face.lambda);
        if (slack < -tol_.first_order) return;
        if (best_ && !better(face.lambda, support, best_->lambda, best_->support)) return;
        const double mineig = check_second_order(q_k, face.lambda);
        if (mineig < -tol_.eigenvalue) return;

        best_ = Candidate{support, face.x, face.lambda, slack, mineig, residual};
    }

    std::int64_t examined() const { return examined_; }
    const std::optional<Candidate>& best() const { return best_; }

private:
    const Matrix& q_;
    const Tolerances& tol_;
    std::optional<Candidate> best_;
    std::int64_t examined_ = 0;
};

void enumerate_full(const Matrix& q, int k_cap, Search& search) {
    const int n = static_cast<int>(q.rows());
    std::vector<int> idx;
    for (int k = 1; k <= k_cap; ++k) {
        idx.resize(static_cast<std::size_t>(k));
        std::iota(idx.begin(), idx.end(), 0);
        for (;;) {
            search.examine(idx);
            int pos = k - 1;
            while (pos >= 0 && idx[pos] == n - k + pos) --pos;
            if (pos < 0) break;
            ++idx[pos];
            for (int t = pos + 1; t < k; ++t) idx[t] = idx[t - 1] + 1;
        }
    }
}

// Depth-first extension of a hub index by off-diagonal partners, see the
// solve_global documentation for the two pruning rules.
class HubSearch {
public:
    HubSearch(const Matrix& q, int hub, double min_diag, int k_cap, Search& search,
              std::set<std::vector<int>>& seen)
        : q_(q), hub_(hub), k_cap_(k_cap), search_(search), seen_(seen) {
        const int n = static_cast<int>(q.rows());
        for (int j = 0; j < n; ++j) {
            if (j != hub) order_.push_back(j);
        }
        cost_.resize(static_cast<std::size_t>(n));
        for (int j : order_) cost_[j] = q(hub, j) - min_diag;
        std::stable_sort(order_.begin(), order_.end(), [&](int a, int b) { return cost_[a] < cost_[b]; });
        neg_suffix_.assign(order_.size() + 1, 0.0);
        for (std::size_t p = order_.size(); p-- > 0;) {
            neg_suffix_[p] = neg_suffix_[p + 1] + std::min(0.0, cost_[order_[p]]);
        }
        const double scale = std::max(1.0, std::fabs(min_diag));
        threshold_ = min_diag - q(hub, hub) + 1e-9 * scale;
        chol_.resize(std::min<Eigen::Index>(k_cap, n), std::min<Eigen::Index>(k_cap, n));
    }

    bool run() {
        if (neg_suffix_[0] > threshold_) return cap_reached_;
        extend(0, 0.0);
        return cap_reached_;
    }

private:
    // Conditional Gram entry with the hub as reference point.
    double gram(int i, int j) const { return q_(i, j) - q_(i, hub_) - q_(hub_, j) + q_(hub_, hub_); }

    void extend(std::size_t next, double sum) {
        const auto depth = static_cast<Eigen::Index>(partners_.size());
        for (std::size_t p = next; p < order_.size(); ++p) {
            const int j = order_[p];
            const double child_sum = sum + cost_[j];
            if (cost_[j] >= 0.0 && child_sum > threshold_) break;
            if (child_sum + neg_suffix_[p + 1] > threshold_) continue;

            // Incremental Cholesky of the conditional Gram matrix.
            double diag = gram(j, j);
            for (Eigen::Index t = 0; t < depth; ++t) {
                double v = gram(partners_[t], j);
                for (Eigen::Index s = 0; s < t; ++s) v -= chol_(t, s) * chol_(depth, s);
                chol_(depth, t) = v / chol_(t, t);
                diag -= chol_(depth, t) * chol_(depth, t);
            }
            if (!(diag > 1e-13 * std::max(1.0, std::fabs(gram(j, j))))) continue;

            if (depth + 2 > k_cap_) {
                cap_reached_ = true;
                return;
            }
            chol_(depth, depth) = std::sqrt(diag);
            partners_.push_back(j);
            if (child_sum <= threshold_) {
                std::vector<int> support(partners_.begin(), partners_.end());
                support.push_back(hub_);
                std::sort(support.begin(), support.end());
                if (seen_.insert(support).second) search_.examine(support);
            }
            extend(p + 1, child_sum);
            partners_.pop_back();
        }
    }

    const Matrix& q_;
    int hub_;
    int k_cap_;
    Search& search_;
    std::set<std::vector<int>>& seen_;
    std::vector<int> order_;
    std::vector<double> cost_;
    std::vector<double> neg_suffix_;
    double threshold_ = 0.0;
    Matrix chol_;
    std::vector<int> partners_;
    bool cap_reached_ = false;
};

bool enumerate_pruned(const Matrix& q, int k_cap, Search& search) {
    const int n = static_cast<int>(q.rows());
    for (int i = 0; i < n; ++i) search.examine({i});
    if (k_cap < 2) {
        // Any admissible pair would have been cut.
        bool cut = false;
        std::set<std::vector<int>> seen;
        for (int h = 0; h < n && !cut; ++h) {
            Search probe(q, Tolerances{});
            cut = HubSearch(q, h, q.diagonal().minCoeff(), 1, probe, seen).run();
        }
        return cut;
    }
    const double min_diag = q.diagonal().minCoeff();
    std::set<std::vector<int>> seen;
    bool cap_reached = false;
    for (int h = 0; h < n; ++h) {
        cap_reached = HubSearch(q, h, min_diag, k_cap, search, seen).run() || cap_reached;
    }
    return cap_reached;
}

Solution finish(const Matrix& q, const Candidate& best) {
    Solution sol;
    sol.support = best.support;
    sol.x = Vector::Zero(q.rows());
    for (std::size_t a = 0; a < best.support.size(); ++a) sol.x[best.support[a]] = best.x_k[static_cast<Eigen::Index>(a)];
    sol.lambda_star = best.lambda;
    sol.first_order_slack = best.slack;
    sol.second_order_mineig = best.mineig;
    sol.stationarity_residual = best.residual;
    return sol;
}

}  // namespace

FaceSolveResult face_solve(const Matrix& q_k, double positivity_tol) {
    const Eigen::Index k = q_k.rows();
    if (k < 1 || q_k.cols() != k) throw DomainError("face_solve: need a non-empty square matrix");
    FaceSolveResult out;
    if (k == 1) {
        out.feasible = true;
        out.x = Vector::Ones(1);
        out.lambda = q_k(0, 0);
        return out;
    }
    Eigen::MatrixXd bordered(k + 1, k + 1);
    bordered.topLeftCorner(k, k) = q_k;
    bordered.topRightCorner(k, 1).setConstant(-1.0);
    bordered.bottomLeftCorner(1, k).setConstant(1.0);
    bordered(k, k) = 0.0;
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(k + 1);
    rhs[k] = 1.0;

    Eigen::FullPivLU<Eigen::MatrixXd> lu(bordered);
    if (!lu.isInvertible()) {
        out.degenerate = true;
        return out;
    }
    const Eigen::VectorXd sol = lu.solve(rhs);
    if (!sol.allFinite()) {
        out.degenerate = true;
        return out;
    }
    out.x = sol.head(k);
    out.lambda = sol[k];
    out.feasible = (out.x.array() > positivity_tol).all();
    return out;
}

double check_first_order(const Matrix& q, const Vector& x, double lambda) {
    if (x.size() != q.rows()) throw DomainError("check_first_order: dimension mismatch");
    return (q * x).minCoeff() - lambda;
}

double check_second_order(const Matrix& q_k, double lambda) {
    if (q_k.rows() < 1) throw DomainError("check_second_order: empty matrix");
    if (q_k.rows() == 1) return q_k(0, 0) - lambda;
    const Eigen::MatrixXd shifted = q_k.array() - lambda;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(shifted, Eigen::EigenvaluesOnly);
    if (eig.info() != Eigen::Success) throw NumericalFailure("check_second_order: eigensolver failed");
    return eig.eigenvalues().minCoeff();
}

std::optional<bool> check_c1(const Matrix& q, std::span<const int> support) {
    if (support.size() <= 1) return std::nullopt;
    const double min_diag = q.diagonal().minCoeff();
    for (int i : support) {
        double sum = 0.0;
        for (int j : support) sum += q(i, j);
        if (sum / static_cast<double>(support.size()) < min_diag) return true;
    }
    return false;
}

std::string to_string(CertificateKind kind) {
    return kind == CertificateKind::ExhaustiveEnumeration ? "exhaustive" : "size_bounded";
}

std::string to_string(Enumeration e) {
    switch (e) {
        case Enumeration::Full: return "full";
        case Enumeration::Pruned: return "pruned";
        case Enumeration::BruteForce: return "brute_force";
    }
    return "unknown";
}

nlohmann::json Solution::to_json() const {
    std::vector<int> one_based(support.begin(), support.end());
    for (int& i : one_based) ++i;
    std::vector<double> weights(x.data(), x.data() + x.size());
    nlohmann::json cert = {{"kind", to_string(certificate)},
                           {"enumeration", to_string(enumeration)},
                           {"cap_reached", cap_reached}};
    cert["k_max"] = k_max ? nlohmann::json(*k_max) : nlohmann::json(nullptr);
    return {{"support", one_based},
            {"support_size", support_size()},
            {"x", weights},
            {"lambda_star", lambda_star},
            {"first_order_slack", first_order_slack},
            {"second_order_mineig", second_order_mineig},
            {"stationarity_residual", stationarity_residual},
            {"certificate", cert},
            {"faces_examined", faces_examined}};
}

int default_k_max(int n, double alpha) { return static_cast<int>(std::ceil(alpha * std::sqrt(static_cast<double>(n)))); }

Solution solve_global(const Matrix& q, const SolveOptions& options) {
    const int n = static_cast<int>(q.rows());
    if (n < 1 || q.cols() != n) throw DomainError("solve_global: need a non-empty square matrix");
    if (n > kMaxDimension) throw CostGuard("solve_global: n exceeds " + std::to_string(kMaxDimension));
    if (options.k_max && *options.k_max < 1) throw DomainError("solve_global: k_max must be positive");

    const Enumeration mode = options.enumeration.value_or(options.k_max ? Enumeration::Pruned : Enumeration::Full);
    if (mode == Enumeration::BruteForce) return brute_force_oracle(q);
    if (mode == Enumeration::Full && !options.k_max && n > kMaxExhaustiveDimension) {
        throw CostGuard("solve_global: uncapped full enumeration limited to n <= " +
                        std::to_string(kMaxExhaustiveDimension));
    }
    const int k_cap = std::min(n, options.k_max.value_or(n));

    Search search(q, options.tol);
    bool cap_reached = false;
    if (mode == Enumeration::Full) {
        enumerate_full(q, k_cap, search);
        cap_reached = k_cap < n;
    } else {
        cap_reached = enumerate_pruned(q, k_cap, search);
    }
    if (!search.best()) throw NumericalFailure("solve_global: no support passed the optimality checks");

    Solution sol = finish(q, *search.best());
    sol.enumeration = mode;
    sol.k_max = options.k_max;
    sol.cap_reached = cap_reached;
    sol.certificate = cap_reached ? CertificateKind::SizeBoundedEnumeration : CertificateKind::ExhaustiveEnumeration;
    sol.faces_examined = search.examined();
    return sol;
}

Solution solve_global(const Instance& inst, const SolveOptions& options) { return solve_global(inst.q, options); }

Solution brute_force_oracle(const Matrix& q) {
    const int n = static_cast<int>(q.rows());
    if (n < 1 || q.cols() != n) throw DomainError("brute_force_oracle: need a non-empty square matrix");
    if (n > kMaxOracleDimension) {
        throw CostGuard("brute_force_oracle: limited to n <= " + std::to_string(kMaxOracleDimension));
    }
    std::optional<Candidate> best;
    std::int64_t examined = 0;
    std::vector<int> support;
    for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
        support.clear();
        for (int i = 0; i < n; ++i) {
            if (mask & (1u << i)) support.push_back(i);
        }
        ++examined;
        const FaceSolveResult face = face_solve(principal_submatrix(q, support));
        if (!face.feasible) continue;
        // Objective evaluated directly from the weights, not from lambda.
        double value = 0.0;
        for (std::size_t a = 0; a < support.size(); ++a) {
            for (std::size_t b = 0; b < support.size(); ++b) {
                value += face.x[static_cast<Eigen::Index>(a)] * q(support[a], support[b]) *
                         face.x[static_cast<Eigen::Index>(b)];
            }
        }
        if (!best || better(value, support, best->lambda, best->support)) {
            best = Candidate{support, face.x, value, 0.0, 0.0, 0.0};
        }
    }
    if (!best) throw NumericalFailure("brute_force_oracle: no feasible face");
    const Matrix q_k = principal_submatrix(q, best->support);
    best->slack = off_support_slack(q, best->support, best->x_k, best->lambda);
    best->mineig = check_second_order(q_k, best->lambda);
    best->residual = ((q_k * best->x_k).array() - best->lambda).abs().maxCoeff();
    Solution sol = finish(q, *best);
    sol.enumeration = Enumeration::BruteForce;
    sol.faces_examined = examined;
    return sol;
}

Solution brute_force_oracle(const Instance& inst) { return brute_force_oracle(inst.q); }

std::string verify_solution(const Matrix& q, const Solution& sol, const Tolerances& tol) {
    const auto n = q.rows();
    if (sol.x.size() != n) return "weight vector has the wrong length";
    if (sol.support.empty()) return "empty support";
    if (std::fabs(sol.x.sum() - 1.0) > 1e-9) return "weights do not sum to one";
    std::vector<char> on(static_cast<std::size_t>(n), 0);
    for (int i : sol.support) {
        if (i < 0 || i >= n) return "support index out of range";
        on[static_cast<std::size_t>(i)] = 1;
        if (!(sol.x[i] > tol.positivity)) return "non-positive weight on the support";
    }
    for (Eigen::Index i = 0; i < n; ++i) {
        if (!on[static_cast<std::size_t>(i)] && sol.x[i] != 0.0) return "positive weight off the support";
    }
    const Vector qx = q * sol.x;
    const double scale = std::max(1.0, q.cwiseAbs().maxCoeff());
    double slack = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < n; ++i) {
        if (on[static_cast<std::size_t>(i)]) {
            if (std::fabs(qx[i] - sol.lambda_star) > tol.stationarity * scale) return "stationarity residual too large";
        } else {
            slack = std::min(slack, qx[i] - sol.lambda_star);
        }
    }
    if (slack < -tol.first_order) return "first-order condition violated";
    const Matrix q_k = principal_submatrix(q, sol.support);
    if (check_second_order(q_k, sol.lambda_star) < -tol.eigenvalue) return "second-order condition violated";
    if (std::fabs(sol.x.dot(qx) - sol.lambda_star) > tol.stationarity * scale) return "lambda_star differs from x^T Q x";
    return {};
}

}  // namespace stqp
