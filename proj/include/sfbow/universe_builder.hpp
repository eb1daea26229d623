#pragma once

#include <Eigen/Core>
#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "sfbow/embedding_store.hpp"

namespace sfbow {

/// Dense points in double precision, one point per row.
using PointMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

enum class UniverseMethod : std::uint8_t {
  identity = 0,
  pca = 1,
  kmeans = 2,
  spherical_kmeans = 3,
  dbscan = 4,
};

std::string_view to_string(UniverseMethod method);

/// u x d matrix whose rows are the reference fuzzy sets memberships are
/// measured against. Immutable once built.
class UniverseMatrix {
 public:
  /// Requires u, d >= 1 and finite entries; identity method requires the
  /// exact identity matrix.
  UniverseMatrix(PointMatrix matrix, UniverseMethod method, std::string source = {},
                 nlohmann::json params = nlohmann::json::object());

  const PointMatrix& matrix() const noexcept { return matrix_; }
  std::size_t size() const noexcept { return static_cast<std::size_t>(matrix_.rows()); }
  std::size_t dim() const noexcept { return static_cast<std::size_t>(matrix_.cols()); }
  UniverseMethod method() const noexcept { return method_; }
  const std::string& source() const noexcept { return source_; }
  const nlohmann::json& params() const noexcept { return params_; }
  /// Content fingerprint; embeddings are only comparable when ids agree.
  std::uint64_t id() const noexcept { return id_; }

 private:
  PointMatrix matrix_;
  UniverseMethod method_;
  std::string source_;
  nlohmann::json params_;
  std::uint64_t id_;
};

/// Result of a clustering run. `point_rows[i]` is the model row clustered as
/// point i; `assignments[i]` is its cluster, or -1 for DBSCAN noise.
struct ClusterModel {
  PointMatrix centroids;
  std::vector<std::int32_t> assignments;
  std::vector<std::size_t> point_rows;
  std::vector<double> objective_trace;
  std::size_t iterations = 0;
};

struct PcaModel {
  Eigen::MatrixXd components;  // columns are eigenvectors
  Eigen::VectorXd eigenvalues;  // descending, clamped at 0
  Eigen::VectorXd explained_variance_ratio;
  Eigen::MatrixXd gram;
};

struct ClusterDiagnostics {
  double wcsos = 0.0;
  double bcsos = 0.0;
  std::size_t k = 0;
};

struct KMeansOptions {
  std::size_t k = 100;
  std::uint64_t seed = 42;
  std::size_t max_iterations = 300;
};

enum class DbscanMetric { euclidean, cosine };

DbscanMetric parse_dbscan_metric(std::string_view name);
std::string_view to_string(DbscanMetric metric);

struct DbscanOptions {
  double eps = 0.0;
  std::size_t min_pts = 5;
  DbscanMetric metric = DbscanMetric::euclidean;
};

struct PcaOptions {
  bool center = false;
};

template <typename Model>
struct BuiltUniverse {
  Model model;
  UniverseMatrix universe;
};

/// Widens the embedding matrix to doubles.
PointMatrix to_points(const WordEmbeddingModel& model);

UniverseMatrix identity_universe(std::size_t dim);

/// Eigendecomposition of the uncentered Gram matrix W^T W (or of the
/// scatter matrix when `center` is set). The universe is P^T with each
/// eigenvector's largest-magnitude entry made positive.
BuiltUniverse<PcaModel> pca_universe(const WordEmbeddingModel& model, PcaOptions options = {},
                                     std::string source = {});

/// Lloyd iterations with k-means++ seeding.
ClusterModel kmeans(const PointMatrix& points, const KMeansOptions& options);
/// Points are L2-normalized; assignment maximizes cosine similarity and
/// centroids are normalized member means. Zero rows must already be removed.
ClusterModel spherical_kmeans(const PointMatrix& points, const KMeansOptions& options);
ClusterModel dbscan(const PointMatrix& points, const DbscanOptions& options);

BuiltUniverse<ClusterModel> kmeans_universe(const WordEmbeddingModel& model,
                                            const KMeansOptions& options, std::string source = {});
BuiltUniverse<ClusterModel> spherical_kmeans_universe(const WordEmbeddingModel& model,
                                                      const KMeansOptions& options,
                                                      std::string source = {});
/// Throws Error("degenerate universe ...") when no cluster is found.
BuiltUniverse<ClusterModel> dbscan_universe(const WordEmbeddingModel& model,
                                            const DbscanOptions& options, std::string source = {});

/// Rows of `model` that spherical k-means would cluster, L2-normalized.
PointMatrix normalized_nonzero_rows(const WordEmbeddingModel& model,
                                    std::vector<std::size_t>* kept_rows = nullptr);

/// Noise points (assignment -1) are ignored.
ClusterDiagnostics cluster_diagnostics(const PointMatrix& points, const ClusterModel& clusters);

/// Little-endian binary: "SFBW", u16 version, u8 method, u32 u, u32 d,
/// u32-length-prefixed JSON {"source","params"}, u*d float32 row-major.
void save_universe(const UniverseMatrix& universe, const std::filesystem::path& path);
UniverseMatrix load_universe(const std::filesystem::path& path);

std::string serialize_universe(const UniverseMatrix& universe);
UniverseMatrix deserialize_universe(std::string_view bytes);

}  // namespace sfbow
