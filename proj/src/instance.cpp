#include "stqp/instance.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

#include "stqp/errors.hpp"

namespace stqp {

std::string to_string(Model model) {
    return model == Model::SymmetricIID ? "symmetric_iid" : "wigner_average";
}

Model model_from_string(const std::string& name) {
    if (name == "symmetric_iid" || name == "sym") return Model::SymmetricIID;
    if (name == "wigner_average" || name == "wigner") return Model::WignerAverage;
    throw DomainError("unknown matrix model '" + name + "'");
}

Instance Instance::from_matrix(Matrix q) {
    if (q.rows() != q.cols() || q.rows() < 1) throw DomainError("instance matrix must be square and non-empty");
    if (q.rows() > kMaxDimension) throw CostGuard("instance dimension exceeds " + std::to_string(kMaxDimension));
    for (Eigen::Index i = 0; i < q.rows(); ++i) {
        for (Eigen::Index j = i + 1; j < q.cols(); ++j) {
            if (q(i, j) != q(j, i)) throw DomainError("instance matrix is not symmetric");
        }
    }
    Instance inst;
    inst.n = static_cast<int>(q.rows());
    inst.q = std::move(q);
    return inst;
}

nlohmann::json Instance::provenance() const {
    return {{"schema", 1},
            {"n", n},
            {"model", to_string(model)},
            {"diag_spec", diag_spec.to_json()},
            {"offdiag_spec", offdiag_spec.to_json()},
            {"seed", seed},
            {"relabeled", relabeled}};
}

Instance generate(Model model, const DistributionSpec& diag_spec, const DistributionSpec& offdiag_spec,
                  int n, std::uint64_t seed) {
    if (n < 1) throw DomainError("generate: n must be at least 1");
    if (n > kMaxDimension) throw CostGuard("generate: n exceeds " + std::to_string(kMaxDimension));

    Instance inst;
    inst.n = n;
    inst.model = model;
    inst.seed = seed;
    inst.diag_spec = diag_spec.with_role(Role::DiagonalG);
    inst.offdiag_spec = (model == Model::WignerAverage ? diag_spec : offdiag_spec).with_role(Role::OffDiagonalF);
    inst.q.resize(n, n);

    if (model == Model::SymmetricIID) {
        for (int i = 0; i < n; ++i) {
            Stream row(seed, static_cast<std::uint64_t>(i));
            inst.q(i, i) = diag_spec.sample(row);
            for (int j = i + 1; j < n; ++j) {
                inst.q(i, j) = offdiag_spec.sample(row);
                inst.q(j, i) = inst.q(i, j);
            }
        }
    } else {
        Matrix m(n, n);
        for (int i = 0; i < n; ++i) {
            Stream row(seed, static_cast<std::uint64_t>(i));
            for (int j = 0; j < n; ++j) m(i, j) = diag_spec.sample(row);
        }
        for (int i = 0; i < n; ++i) {
            inst.q(i, i) = m(i, i);
            for (int j = i + 1; j < n; ++j) {
                inst.q(i, j) = 0.5 * (m(i, j) + m(j, i));
                inst.q(j, i) = inst.q(i, j);
            }
        }
    }
    return inst;
}

Matrix permute(const Matrix& q, const std::vector<int>& perm) {
    const auto n = static_cast<Eigen::Index>(perm.size());
    Matrix out(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) out(i, j) = q(perm[i], perm[j]);
    }
    return out;
}

Instance relabel_by_diagonal(const Instance& inst) {
    std::vector<int> perm(static_cast<std::size_t>(inst.n));
    std::iota(perm.begin(), perm.end(), 0);
    std::stable_sort(perm.begin(), perm.end(), [&](int a, int b) { return inst.q(a, a) < inst.q(b, b); });
    for (std::size_t i = 1; i < perm.size(); ++i) {
        if (inst.q(perm[i], perm[i]) == inst.q(perm[i - 1], perm[i - 1])) {
            throw DegenerateInstance("relabel_by_diagonal: tied diagonal entries at positions " +
                                     std::to_string(perm[i - 1] + 1) + " and " + std::to_string(perm[i] + 1));
        }
    }
    Instance out = inst;
    out.q = permute(inst.q, perm);
    out.relabeled = true;
    return out;
}

void write_matrix_text(std::ostream& out, const Matrix& q) {
    out << q.rows() << '\n';
    char buf[32];
    for (Eigen::Index i = 0; i < q.rows(); ++i) {
        for (Eigen::Index j = 0; j < q.cols(); ++j) {
            std::snprintf(buf, sizeof buf, "%.17g", q(i, j));
            if (j > 0) out << ' ';
            out << buf;
        }
        out << '\n';
    }
}

Matrix read_matrix_text(std::istream& in) {
    long long n = 0;
    if (!(in >> n) || n < 1) throw DomainError("matrix text: expected a positive dimension on the first line");
    if (n > kMaxDimension) throw CostGuard("matrix text: dimension exceeds " + std::to_string(kMaxDimension));
    Matrix q(n, n);
    for (long long i = 0; i < n; ++i) {
        for (long long j = 0; j < n; ++j) {
            std::string token;
            if (!(in >> token)) throw DomainError("matrix text: truncated matrix");
            try {
                std::size_t used = 0;
                q(i, j) = std::stod(token, &used);
                if (used != token.size()) throw std::invalid_argument(token);
            } catch (const std::exception&) {
                throw DomainError("matrix text: bad number '" + token + "'");
            }
        }
    }
    std::string extra;
    if (in >> extra) throw DomainError("matrix text: trailing data after the matrix");
    return q;
}

void save_instance(const std::filesystem::path& path, const Instance& inst) {
    std::ofstream out(path);
    if (!out) throw DomainError("cannot open '" + path.string() + "' for writing");
    write_matrix_text(out, inst.q);
    std::ofstream side(path.string() + ".json");
    if (!side) throw DomainError("cannot open sidecar for '" + path.string() + "'");
    side << inst.provenance().dump(2) << '\n';
}

Instance load_instance(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DomainError("cannot open '" + path.string() + "'");
    Instance inst = Instance::from_matrix(read_matrix_text(in));
    std::ifstream side(path.string() + ".json");
    if (side) {
        nlohmann::json j;
        try {
            side >> j;
        } catch (const nlohmann::json::exception& e) {
            throw DomainError("bad provenance sidecar: " + std::string(e.what()));
        }
        if (j.value("n", inst.n) != inst.n) throw DomainError("provenance sidecar dimension mismatch");
        inst.model = model_from_string(j.value("model", std::string("symmetric_iid")));
        if (j.contains("diag_spec")) inst.diag_spec = DistributionSpec::from_json(j["diag_spec"]);
        if (j.contains("offdiag_spec")) inst.offdiag_spec = DistributionSpec::from_json(j["offdiag_spec"]);
        inst.seed = j.value("seed", std::uint64_t{0});
        inst.relabeled = j.value("relabeled", false);
    }
    return inst;
}

}  // namespace stqp
