#include <cmath>
#include <deque>
#include <limits>
#include <random>

#include "parallel.hpp"
#include "sfbow/universe_builder.hpp"

namespace sfbow {
namespace {

constexpr std::size_t kBlock = 1024;

// Squared Euclidean distance; centroid = member mean.
struct Euclidean {
  static double distance(const double* x, const double* c, Eigen::Index d) {
    double s = 0.0;
    for (Eigen::Index j = 0; j < d; ++j) {
      double diff = x[j] - c[j];
      s += diff * diff;
    }
    return s;
  }
  static bool finish_centroid(Eigen::Ref<Eigen::RowVectorXd> sum, std::size_t count) {
    sum /= static_cast<double>(count);
    return true;
  }
};

// Cosine distance on unit vectors; centroid = normalized member sum.
struct Spherical {
  static double distance(const double* x, const double* c, Eigen::Index d) {
    double s = 0.0;
    for (Eigen::Index j = 0; j < d; ++j) s += x[j] * c[j];
    return 1.0 - s;
  }
  static bool finish_centroid(Eigen::Ref<Eigen::RowVectorXd> sum, std::size_t) {
    double norm = sum.norm();
    if (norm == 0.0) return false;
    sum /= norm;
    return true;
  }
};

template <typename Metric>
double point_distance(const PointMatrix& points, Eigen::Index i, const PointMatrix& centroids,
                      Eigen::Index c) {
  return Metric::distance(points.row(i).data(), centroids.row(c).data(), points.cols());
}

template <typename Metric>
PointMatrix seed_kmeanspp(const PointMatrix& points, std::size_t k, std::mt19937_64& rng) {
  const auto n = static_cast<std::size_t>(points.rows());
  PointMatrix centroids(static_cast<Eigen::Index>(k), points.cols());
  std::vector<double> weight(n, std::numeric_limits<double>::infinity());

  std::uniform_int_distribution<std::size_t> pick_any(0, n - 1);
  std::size_t chosen = pick_any(rng);
  for (std::size_t c = 0; c < k; ++c) {
    if (c > 0) {
      double total = 0.0;
      for (double w : weight) total += w;
      if (total > 0.0) {
        std::uniform_real_distribution<double> pick(0.0, total);
        double target = pick(rng);
        double cumulative = 0.0;
        chosen = n;
        std::size_t last_positive = 0;
        for (std::size_t i = 0; i < n; ++i) {
          if (weight[i] <= 0.0) continue;
          last_positive = i;
          cumulative += weight[i];
          if (cumulative > target) {
            chosen = i;
            break;
          }
        }
        if (chosen == n) chosen = last_positive;
      } else {
        chosen = pick_any(rng);
      }
    }
    centroids.row(static_cast<Eigen::Index>(c)) = points.row(static_cast<Eigen::Index>(chosen));
    detail::for_each_block(n, kBlock, [&](std::size_t, std::size_t begin, std::size_t end) {
      for (std::size_t i = begin; i < end; ++i) {
        double dist = point_distance<Metric>(points, static_cast<Eigen::Index>(i), centroids,
                                             static_cast<Eigen::Index>(c));
        weight[i] = std::min(weight[i], std::max(dist, 0.0));
      }
    });
  }
  return centroids;
}

// Moves every point to its nearest centroid; ties keep the current cluster.
template <typename Metric>
std::size_t assign(const PointMatrix& points, const PointMatrix& centroids,
                   std::vector<std::int32_t>& assignments) {
  const auto n = static_cast<std::size_t>(points.rows());
  const auto k = centroids.rows();
  std::vector<std::size_t> changes(detail::block_count(n, kBlock), 0);
  detail::for_each_block(n, kBlock, [&](std::size_t b, std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const auto row = static_cast<Eigen::Index>(i);
      std::int32_t best = assignments[i];
      double best_dist = best >= 0 ? point_distance<Metric>(points, row, centroids, best)
                                   : std::numeric_limits<double>::infinity();
      for (Eigen::Index c = 0; c < k; ++c) {
        double dist = point_distance<Metric>(points, row, centroids, c);
        if (dist < best_dist) {
          best_dist = dist;
          best = static_cast<std::int32_t>(c);
        }
      }
      if (best != assignments[i]) {
        assignments[i] = best;
        ++changes[b];
      }
    }
  });
  std::size_t total = 0;
  for (auto c : changes) total += c;
  return total;
}

template <typename Metric>
double objective(const PointMatrix& points, const PointMatrix& centroids,
                 const std::vector<std::int32_t>& assignments) {
  const auto n = static_cast<std::size_t>(points.rows());
  std::vector<double> partial(detail::block_count(n, kBlock), 0.0);
  detail::for_each_block(n, kBlock, [&](std::size_t b, std::size_t begin, std::size_t end) {
    double s = 0.0;
    for (std::size_t i = begin; i < end; ++i)
      s += point_distance<Metric>(points, static_cast<Eigen::Index>(i), centroids, assignments[i]);
    partial[b] = s;
  });
  double total = 0.0;
  for (double p : partial) total += p;
  return total;
}

template <typename Metric>
void update_centroids(const PointMatrix& points, const std::vector<std::int32_t>& assignments,
                      PointMatrix& centroids) {
  const auto k = centroids.rows();
  PointMatrix sums = PointMatrix::Zero(k, points.cols());
  std::vector<std::size_t> counts(static_cast<std::size_t>(k), 0);
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    sums.row(assignments[static_cast<std::size_t>(i)]) += points.row(i);
    ++counts[static_cast<std::size_t>(assignments[static_cast<std::size_t>(i)])];
  }

  std::vector<bool> used_for_reseed(static_cast<std::size_t>(points.rows()), false);
  for (Eigen::Index c = 0; c < k; ++c) {
    Eigen::RowVectorXd sum = sums.row(c);
    auto count = counts[static_cast<std::size_t>(c)];
    if (count > 0 && Metric::finish_centroid(sum, count)) {
      centroids.row(c) = sum;
      continue;
    }
    // Empty (or directionless) cluster: jump to the point farthest from the
    // old centroid so that u stays equal to k.
    Eigen::Index farthest = -1;
    double farthest_dist = -std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < points.rows(); ++i) {
      if (used_for_reseed[static_cast<std::size_t>(i)]) continue;
      double dist = point_distance<Metric>(points, i, centroids, c);
      if (dist > farthest_dist) {
        farthest_dist = dist;
        farthest = i;
      }
    }
    if (farthest >= 0) {
      used_for_reseed[static_cast<std::size_t>(farthest)] = true;
      centroids.row(c) = points.row(farthest);
    }
  }
}

template <typename Metric>
ClusterModel lloyd(const PointMatrix& points, const KMeansOptions& options) {
  const auto n = static_cast<std::size_t>(points.rows());
  if (options.k == 0) throw std::invalid_argument("k must be at least 1");
  if (options.k > n)
    throw std::invalid_argument("k = " + std::to_string(options.k) + " exceeds the " +
                                std::to_string(n) + " points available");
  if (!points.allFinite()) throw std::invalid_argument("points contain non-finite values");

  std::mt19937_64 rng(options.seed);
  ClusterModel result;
  result.centroids = seed_kmeanspp<Metric>(points, options.k, rng);
  result.assignments.assign(n, -1);
  result.point_rows.resize(n);
  for (std::size_t i = 0; i < n; ++i) result.point_rows[i] = i;

  for (std::size_t it = 0; it < options.max_iterations; ++it) {
    std::size_t changed = assign<Metric>(points, result.centroids, result.assignments);
    if (it > 0 && changed == 0) break;
    update_centroids<Metric>(points, result.assignments, result.centroids);
    result.objective_trace.push_back(objective<Metric>(points, result.centroids, result.assignments));
    result.iterations = it + 1;
  }
  return result;
}

nlohmann::json kmeans_params(const KMeansOptions& options, std::string_view metric) {
  return {{"k", options.k},
          {"seed", options.seed},
          {"max_iterations", options.max_iterations},
          {"metric", metric}};
}

// Universe files store float32; rounding here keeps save/load lossless.
PointMatrix to_float_precision(const PointMatrix& m) { return m.cast<float>().cast<double>(); }

std::string source_or_default(std::string source) { return source.empty() ? "full" : source; }

}  // namespace

PointMatrix to_points(const WordEmbeddingModel& model) { return model.matrix().cast<double>(); }

PointMatrix normalized_nonzero_rows(const WordEmbeddingModel& model,
                                    std::vector<std::size_t>* kept_rows) {
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < model.size(); ++i)
    if (model.matrix().row(static_cast<Eigen::Index>(i)).squaredNorm() > 0.0f) rows.push_back(i);
  PointMatrix points(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(model.dim()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    Eigen::RowVectorXd v = model.matrix().row(static_cast<Eigen::Index>(rows[r])).cast<double>();
    points.row(static_cast<Eigen::Index>(r)) = v / v.norm();
  }
  if (kept_rows != nullptr) *kept_rows = std::move(rows);
  return points;
}

ClusterModel kmeans(const PointMatrix& points, const KMeansOptions& options) {
  return lloyd<Euclidean>(points, options);
}

ClusterModel spherical_kmeans(const PointMatrix& points, const KMeansOptions& options) {
  PointMatrix unit = points;
  for (Eigen::Index i = 0; i < unit.rows(); ++i) {
    double norm = unit.row(i).norm();
    if (norm == 0.0) throw std::invalid_argument("spherical k-means cannot cluster zero vectors");
    unit.row(i) /= norm;
  }
  return lloyd<Spherical>(unit, options);
}

ClusterModel dbscan(const PointMatrix& input, const DbscanOptions& options) {
  if (!(options.eps > 0.0)) throw std::invalid_argument("DBSCAN eps must be positive");
  if (options.min_pts == 0) throw std::invalid_argument("DBSCAN min_pts must be at least 1");

  const bool cosine = options.metric == DbscanMetric::cosine;
  const auto n = static_cast<std::size_t>(input.rows());
  PointMatrix points = input;
  std::vector<bool> usable(n, true);
  if (cosine) {
    for (std::size_t i = 0; i < n; ++i) {
      double norm = points.row(static_cast<Eigen::Index>(i)).norm();
      if (norm == 0.0)
        usable[i] = false;
      else
        points.row(static_cast<Eigen::Index>(i)) /= norm;
    }
  }
  const double eps = cosine ? options.eps : options.eps * options.eps;
  auto distance = [&](std::size_t a, std::size_t b) {
    const double* x = points.row(static_cast<Eigen::Index>(a)).data();
    const double* y = points.row(static_cast<Eigen::Index>(b)).data();
    return cosine ? Spherical::distance(x, y, points.cols()) : Euclidean::distance(x, y, points.cols());
  };
  auto region = [&](std::size_t p) {
    std::vector<std::size_t> out;
    for (std::size_t q = 0; q < n; ++q)
      if (usable[q] && distance(p, q) <= eps) out.push_back(q);
    return out;
  };

  constexpr std::int32_t kUnvisited = -2;
  constexpr std::int32_t kNoise = -1;
  std::vector<std::int32_t> labels(n, kUnvisited);
  std::int32_t clusters = 0;
  for (std::size_t p = 0; p < n; ++p) {
    if (labels[p] != kUnvisited) continue;
    if (!usable[p]) {
      labels[p] = kNoise;
      continue;
    }
    auto seeds = region(p);
    if (seeds.size() < options.min_pts) {
      labels[p] = kNoise;
      continue;
    }
    const std::int32_t id = clusters++;
    labels[p] = id;
    std::deque<std::size_t> queue(seeds.begin(), seeds.end());
    while (!queue.empty()) {
      std::size_t q = queue.front();
      queue.pop_front();
      if (labels[q] == kNoise) labels[q] = id;  // border point
      if (labels[q] != kUnvisited) continue;
      labels[q] = id;
      auto neighbours = region(q);
      if (neighbours.size() >= options.min_pts) queue.insert(queue.end(), neighbours.begin(), neighbours.end());
    }
  }

  ClusterModel result;
  result.assignments = std::move(labels);
  result.point_rows.resize(n);
  for (std::size_t i = 0; i < n; ++i) result.point_rows[i] = i;
  result.centroids = PointMatrix::Zero(clusters, input.cols());
  std::vector<std::size_t> counts(static_cast<std::size_t>(clusters), 0);
  for (std::size_t i = 0; i < n; ++i) {
    auto c = result.assignments[i];
    if (c < 0) continue;
    result.centroids.row(c) += points.row(static_cast<Eigen::Index>(i));
    ++counts[static_cast<std::size_t>(c)];
  }
  for (std::int32_t c = 0; c < clusters; ++c) {
    Eigen::RowVectorXd sum = result.centroids.row(c);
    if (cosine)
      Spherical::finish_centroid(sum, counts[static_cast<std::size_t>(c)]);
    else
      Euclidean::finish_centroid(sum, counts[static_cast<std::size_t>(c)]);
    result.centroids.row(c) = sum;
  }
  return result;
}

DbscanMetric parse_dbscan_metric(std::string_view name) {
  if (name == "euclidean") return DbscanMetric::euclidean;
  if (name == "cosine") return DbscanMetric::cosine;
  throw std::invalid_argument("unknown DBSCAN metric: " + std::string(name));
}

std::string_view to_string(DbscanMetric metric) {
  return metric == DbscanMetric::cosine ? "cosine" : "euclidean";
}

BuiltUniverse<ClusterModel> kmeans_universe(const WordEmbeddingModel& model,
                                            const KMeansOptions& options, std::string source) {
  ClusterModel clusters = kmeans(to_points(model), options);
  UniverseMatrix universe(to_float_precision(clusters.centroids), UniverseMethod::kmeans,
                          source_or_default(std::move(source)), kmeans_params(options, "euclidean"));
  return {std::move(clusters), std::move(universe)};
}

BuiltUniverse<ClusterModel> spherical_kmeans_universe(const WordEmbeddingModel& model,
                                                      const KMeansOptions& options,
                                                      std::string source) {
  std::vector<std::size_t> rows;
  PointMatrix points = normalized_nonzero_rows(model, &rows);
  if (points.rows() == 0) throw Error("spherical k-means: every embedding row is zero");
  ClusterModel clusters = lloyd<Spherical>(points, options);
  clusters.point_rows = std::move(rows);
  UniverseMatrix universe(to_float_precision(clusters.centroids), UniverseMethod::spherical_kmeans,
                          source_or_default(std::move(source)), kmeans_params(options, "cosine"));
  return {std::move(clusters), std::move(universe)};
}

BuiltUniverse<ClusterModel> dbscan_universe(const WordEmbeddingModel& model,
                                            const DbscanOptions& options, std::string source) {
  ClusterModel clusters = dbscan(to_points(model), options);
  if (clusters.centroids.rows() == 0)
    throw Error("degenerate universe: DBSCAN found no clusters (eps=" + std::to_string(options.eps) +
                ", min_pts=" + std::to_string(options.min_pts) + ")");
  nlohmann::json params = {{"eps", options.eps},
                           {"min_pts", options.min_pts},
                           {"metric", to_string(options.metric)}};
  UniverseMatrix universe(to_float_precision(clusters.centroids), UniverseMethod::dbscan,
                          source_or_default(std::move(source)), std::move(params));
  return {std::move(clusters), std::move(universe)};
}

ClusterDiagnostics cluster_diagnostics(const PointMatrix& points, const ClusterModel& clusters) {
  if (clusters.assignments.size() != static_cast<std::size_t>(points.rows()))
    throw DimensionError("cluster assignments do not cover the points");
  ClusterDiagnostics out;
  out.k = static_cast<std::size_t>(clusters.centroids.rows());

  Eigen::RowVectorXd mean = Eigen::RowVectorXd::Zero(points.cols());
  std::vector<std::size_t> counts(out.k, 0);
  std::size_t assigned = 0;
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    auto c = clusters.assignments[static_cast<std::size_t>(i)];
    if (c < 0) continue;
    if (static_cast<std::size_t>(c) >= out.k) throw std::out_of_range("assignment has no centroid");
    mean += points.row(i);
    ++counts[static_cast<std::size_t>(c)];
    ++assigned;
  }
  if (assigned == 0) return out;
  mean /= static_cast<double>(assigned);

  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    auto c = clusters.assignments[static_cast<std::size_t>(i)];
    if (c >= 0) out.wcsos += (points.row(i) - clusters.centroids.row(c)).squaredNorm();
  }
  for (std::size_t c = 0; c < out.k; ++c)
    out.bcsos += static_cast<double>(counts[c]) *
                 (clusters.centroids.row(static_cast<Eigen::Index>(c)) - mean).squaredNorm();
  return out;
}

}  // namespace sfbow
