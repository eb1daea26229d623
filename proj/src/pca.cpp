#include <Eigen/Eigenvalues>

#include "sfbow/universe_builder.hpp"

namespace sfbow {

UniverseMatrix identity_universe(std::size_t dim) {
  if (dim == 0) throw std::invalid_argument("identity universe needs d >= 1");
  auto d = static_cast<Eigen::Index>(dim);
  return UniverseMatrix(PointMatrix::Identity(d, d), UniverseMethod::identity, "none",
                        {{"d", dim}});
}

BuiltUniverse<PcaModel> pca_universe(const WordEmbeddingModel& model, PcaOptions options,
                                     std::string source) {
  if (model.size() < 2) throw std::invalid_argument("PCA needs at least two embedding rows");
  const auto d = static_cast<Eigen::Index>(model.dim());
  const EmbeddingMatrix& w = model.matrix();

  Eigen::RowVectorXd mean = Eigen::RowVectorXd::Zero(d);
  if (options.center) {
    for (Eigen::Index i = 0; i < w.rows(); ++i) mean += w.row(i).cast<double>();
    mean /= static_cast<double>(w.rows());
  }

  // Accumulate W^T W in row blocks to avoid widening the whole matrix at once.
  constexpr Eigen::Index kRows = 4096;
  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(d, d);
  for (Eigen::Index start = 0; start < w.rows(); start += kRows) {
    Eigen::Index count = std::min(kRows, w.rows() - start);
    Eigen::MatrixXd block = w.middleRows(start, count).cast<double>();
    if (options.center) block.rowwise() -= mean;
    gram.selfadjointView<Eigen::Lower>().rankUpdate(block.transpose());
  }
  gram = gram.selfadjointView<Eigen::Lower>();
  if (!gram.allFinite()) throw std::invalid_argument("Gram matrix is not finite");

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(gram);
  if (solver.info() != Eigen::Success) throw Error("eigendecomposition did not converge");

  PcaModel pca;
  pca.gram = gram;
  pca.eigenvalues = solver.eigenvalues().reverse().cwiseMax(0.0);
  pca.components = solver.eigenvectors().rowwise().reverse();
  for (Eigen::Index c = 0; c < d; ++c) {
    Eigen::Index pivot = 0;
    pca.components.col(c).cwiseAbs().maxCoeff(&pivot);
    if (pca.components(pivot, c) < 0.0) pca.components.col(c) *= -1.0;
  }
  double total = pca.eigenvalues.sum();
  if (!(total > 0.0)) throw Error("PCA of an all-zero embedding matrix is undefined");
  pca.explained_variance_ratio = pca.eigenvalues / total;

  PointMatrix rows = pca.components.transpose().cast<float>().cast<double>();
  UniverseMatrix universe(std::move(rows), UniverseMethod::pca, source.empty() ? "full" : source,
                          {{"center", options.center}});
  return {std::move(pca), std::move(universe)};
}

}  // namespace sfbow
