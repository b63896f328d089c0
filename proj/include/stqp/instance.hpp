#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>

#include <Eigen/Dense>
#include <json.hpp>

#include "stqp/distributions.hpp"

namespace stqp {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

/// Largest dimension accepted anywhere in the library.
inline constexpr int kMaxDimension = 2048;

enum class Model {
    SymmetricIID,   ///< diagonal ~ G, strict upper triangle ~ F, mirrored
    WignerAverage,  ///< Q = (M + M^T)/2 with M i.i.d.
};

std::string to_string(Model model);
Model model_from_string(const std::string& name);  // accepts "sym"/"wigner" too

struct Instance {
    int n = 0;
    Matrix q;
    Model model = Model::SymmetricIID;
    DistributionSpec diag_spec = DistributionSpec::uniform01().with_role(Role::DiagonalG);
    DistributionSpec offdiag_spec = DistributionSpec::uniform01();
    std::uint64_t seed = 0;
    bool relabeled = false;

    /// Wraps an explicit matrix (tests, files). Checks exact symmetry.
    static Instance from_matrix(Matrix q);

    nlohmann::json provenance() const;
};

/// Draws a random instance. Row i uses stream i of `seed`, so generation is
/// deterministic in (model, specs, n, seed). For WignerAverage only
/// `diag_spec` is used: it is the law of the entries of M.
Instance generate(Model model, const DistributionSpec& diag_spec, const DistributionSpec& offdiag_spec,
                  int n, std::uint64_t seed);

/// Symmetric permutation making the diagonal strictly increasing. Throws
/// DegenerateInstance on an exact diagonal tie.
Instance relabel_by_diagonal(const Instance& inst);

/// Applies the symmetric permutation q'(i,j) = q(perm[i], perm[j]).
Matrix permute(const Matrix& q, const std::vector<int>& perm);

/// Text format: first line n, then n rows of 17-significant-digit values.
void write_matrix_text(std::ostream& out, const Matrix& q);
Matrix read_matrix_text(std::istream& in);

/// Writes `path` (matrix text) and `path.json` (provenance sidecar).
void save_instance(const std::filesystem::path& path, const Instance& inst);
/// Reads `path`; picks up provenance from `path.json` when present.
Instance load_instance(const std::filesystem::path& path);

}  // namespace stqp
