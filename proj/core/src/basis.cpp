#include "mebd/basis.hpp"

#include <fstream>
#include <set>

#include <Eigen/SVD>
#include <json.hpp>

namespace mebd {

std::vector<double> sample_descriptor(const UncertaintyDescriptor& desc) {
  desc.validate();
  std::vector<double> values(desc.samples);
  const double span = desc.range_max - desc.range_min;
  for (int k = 0; k < desc.samples; ++k)
    values[k] = desc.range_min + k * span / (desc.samples - 1);
  return values;
}

Eigen::MatrixXcd snapshot_matrix(const ArrayGeometry& geom, const ExcitationVector& nominal,
                                 const UncertaintyDescriptor& desc, const ScanGrid& grid) {
  const std::vector<double> sweep = sample_descriptor(desc);
  Eigen::MatrixXcd snapshots(grid.point_count(), desc.samples);
  for (int k = 0; k < desc.samples; ++k) {
    const ExcitationVector exc = apply_uncertainty(nominal, desc, sweep[k]);
    snapshots.col(k) = radiate(geom, exc, grid).values;
  }
  return snapshots;
}

TsvdResult tsvd_extract(const Eigen::MatrixXcd& snapshots, const TruncationRule& rule) {
  if (snapshots.size() == 0) throw std::invalid_argument("tsvd_extract: empty snapshot matrix");
  if (snapshots.norm() == 0.0)
    throw degenerate_input("tsvd_extract: all-zero snapshot matrix");

  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(snapshots,
                                         Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd sigma = svd.singularValues();

  int q = 0;
  if (rule.mode == TruncationRule::Mode::fixed) {
    if (rule.fixed_q < 1) throw std::invalid_argument("tsvd_extract: fixed Q must be >= 1");
    q = std::min<int>(rule.fixed_q, static_cast<int>(sigma.size()));
  } else {
    if (!(rule.epsilon > 0.0) || rule.epsilon > 1.0)
      throw std::invalid_argument("tsvd_extract: threshold must lie in (0, 1]");
    for (int i = 0; i < sigma.size(); ++i)
      if (sigma[i] >= rule.epsilon * sigma[0]) q = i + 1;
  }

  TsvdResult out;
  out.left_vectors = svd.matrixU().leftCols(q);
  out.singular_values = sigma.head(q);
  return out;
}

OvercompleteBasis build_basis(const ArrayGeometry& geom, const ExcitationVector& nominal,
                              const std::vector<UncertaintyDescriptor>& descriptors,
                              const ScanGrid& grid, const TruncationRule& rule) {
  if (descriptors.empty())
    throw std::invalid_argument("build_basis: at least one descriptor is required");

  OvercompleteBasis basis;
  basis.grid = grid;
  basis.matrix.resize(grid.point_count(), 0);
  for (const UncertaintyDescriptor& desc : descriptors) {
    const TsvdResult tsvd = tsvd_extract(snapshot_matrix(geom, nominal, desc, grid), rule);
    const int b0 = basis.column_count();
    basis.matrix.conservativeResize(Eigen::NoChange, b0 + tsvd.left_vectors.cols());
    basis.matrix.rightCols(tsvd.left_vectors.cols()) = tsvd.left_vectors;
    for (int q = 0; q < tsvd.left_vectors.cols(); ++q)
      basis.provenance.push_back({desc.index, q + 1, tsvd.singular_values[q]});
  }
  return basis;
}

RestrictedBasis restrict(const OvercompleteBasis& basis,
                         const std::vector<int>& measurement_indices) {
  if (measurement_indices.empty())
    throw std::invalid_argument("restrict: measurement index list is empty");
  std::set<int> unique(measurement_indices.begin(), measurement_indices.end());
  if (unique.size() != measurement_indices.size())
    throw std::invalid_argument("restrict: duplicate measurement index");
  const int t = static_cast<int>(basis.matrix.rows());
  RestrictedBasis out;
  out.measurement_indices = measurement_indices;
  out.matrix.resize(static_cast<int>(measurement_indices.size()), basis.matrix.cols());
  for (std::size_t m = 0; m < measurement_indices.size(); ++m) {
    const int idx = measurement_indices[m];
    if (idx < 0 || idx >= t) throw std::invalid_argument("restrict: measurement index out of range");
    out.matrix.row(static_cast<int>(m)) = basis.matrix.row(idx);
  }
  return out;
}

namespace {

using nlohmann::json;

}  // namespace

void save_basis(const OvercompleteBasis& basis, const std::string& path) {
  json j;
  j["format"] = "mebd.basis";
  j["version"] = 1;
  j["grid"] = {{"side", basis.grid.side},
               {"height", basis.grid.height},
               {"step", basis.grid.step}};
  j["rows"] = basis.matrix.rows();
  j["cols"] = basis.matrix.cols();
  json prov = json::array();
  for (const BasisColumnInfo& p : basis.provenance)
    prov.push_back({{"factor", p.factor},
                    {"singular_index", p.singular_index},
                    {"singular_value", p.singular_value}});
  j["provenance"] = std::move(prov);
  json data = json::array();  // column-major, complex entries as [re, im]
  for (int b = 0; b < basis.matrix.cols(); ++b)
    for (int t = 0; t < basis.matrix.rows(); ++t)
      data.push_back({basis.matrix(t, b).real(), basis.matrix(t, b).imag()});
  j["matrix"] = std::move(data);

  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_basis: cannot open " + path);
  out << j.dump(1) << '\n';
  if (!out) throw std::runtime_error("save_basis: write failed for " + path);
}

OvercompleteBasis load_basis(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_basis: cannot open " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw validation_error("load_basis: " + path + ": " + e.what());
  }
  try {
    if (j.at("format") != "mebd.basis") throw validation_error("load_basis: unknown format tag");
    OvercompleteBasis basis;
    basis.grid = build_grid(j.at("grid").at("side").get<double>(),
                            j.at("grid").at("height").get<double>(),
                            j.at("grid").at("step").get<double>());
    const int rows = j.at("rows").get<int>();
    const int cols = j.at("cols").get<int>();
    if (rows != basis.grid.point_count())
      throw validation_error("load_basis: row count does not match the grid");
    for (const json& p : j.at("provenance"))
      basis.provenance.push_back({p.at("factor").get<int>(),
                                  p.at("singular_index").get<int>(),
                                  p.at("singular_value").get<double>()});
    if (static_cast<int>(basis.provenance.size()) != cols)
      throw validation_error("load_basis: provenance does not cover every column");
    const json& data = j.at("matrix");
    if (static_cast<int>(data.size()) != rows * cols)
      throw validation_error("load_basis: matrix payload size mismatch");
    basis.matrix.resize(rows, cols);
    std::size_t i = 0;
    for (int b = 0; b < cols; ++b)
      for (int t = 0; t < rows; ++t, ++i)
        basis.matrix(t, b) = Complex(data[i].at(0).get<double>(), data[i].at(1).get<double>());
    return basis;
  } catch (const json::exception& e) {
    throw validation_error("load_basis: " + path + ": " + e.what());
  }
}

}  // namespace mebd
