#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>

#include "mebd/forward_model.hpp"

namespace mebd {

/// How many singular triplets to keep per uncertainty factor.
struct TruncationRule {
  enum class Mode { fixed, relative_threshold };
  Mode mode = Mode::fixed;
  int fixed_q = 2;          // used in fixed mode
  double epsilon = 1e-3;    // keep sigma_q / sigma_1 >= epsilon in threshold mode

  static TruncationRule fixed(int q) { return {Mode::fixed, q, 1e-3}; }
  static TruncationRule threshold(double eps) { return {Mode::relative_threshold, 2, eps}; }
};

/// Where a basis column came from: factor id, 1-based singular index, and
/// the singular value it carried in the snapshot decomposition.
struct BasisColumnInfo {
  int factor = 0;
  int singular_index = 0;
  double singular_value = 0.0;
};

/// T x B over-complete representation basis; columns are unit-norm left
/// singular vectors, appended factor by factor in sweep order.
struct OvercompleteBasis {
  Eigen::MatrixXcd matrix;
  std::vector<BasisColumnInfo> provenance;
  ScanGrid grid;

  int column_count() const { return static_cast<int>(matrix.cols()); }
};

/// M x B observation operator: the rows of the parent basis at the probed
/// grid indices, extracted verbatim.
struct RestrictedBasis {
  Eigen::MatrixXcd matrix;
  std::vector<int> measurement_indices;
};

/// Uniform sweep of a descriptor range, endpoints included.
std::vector<double> sample_descriptor(const UncertaintyDescriptor& desc);

/// T x K_c matrix whose k-th column is the field radiated with the
/// descriptor set to the k-th sweep value.
Eigen::MatrixXcd snapshot_matrix(const ArrayGeometry& geom, const ExcitationVector& nominal,
                                 const UncertaintyDescriptor& desc, const ScanGrid& grid);

struct TsvdResult {
  Eigen::MatrixXcd left_vectors;     // T x Q_c, orthonormal
  Eigen::VectorXd singular_values;   // length Q_c, descending
};

/// Truncated SVD of a snapshot matrix under the given truncation rule.
TsvdResult tsvd_extract(const Eigen::MatrixXcd& snapshots, const TruncationRule& rule);

OvercompleteBasis build_basis(const ArrayGeometry& geom, const ExcitationVector& nominal,
                              const std::vector<UncertaintyDescriptor>& descriptors,
                              const ScanGrid& grid, const TruncationRule& rule);

/// Row-selection operator: keeps only the measurement rows, bit-exactly.
RestrictedBasis restrict(const OvercompleteBasis& basis,
                         const std::vector<int>& measurement_indices);

/// JSON container round-trip, lossless at double precision. Field names are
/// documented in the repository README.
void save_basis(const OvercompleteBasis& basis, const std::string& path);
OvercompleteBasis load_basis(const std::string& path);

}  // namespace mebd
