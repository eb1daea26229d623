#include "sfbow/fuzzy_semantics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_set>

namespace sfbow {

std::string_view to_string(Measure measure) {
  switch (measure) {
    case Measure::fuzzy_jaccard:
      return "fuzzy_jaccard";
    case Measure::cosine:
      return "cosine";
    case Measure::crisp_jaccard:
      return "crisp_jaccard";
    case Measure::dynamax:
      return "dynamax";
  }
  return "unknown";
}

namespace {

template <typename T>
std::vector<double> memberships(const UniverseMatrix& universe, std::span<const T> word_vec, bool clip) {
  if (word_vec.size() != universe.dim())
    throw DimensionError("word vector has length " + std::to_string(word_vec.size()) +
                         " but universe expects " + std::to_string(universe.dim()));
  const PointMatrix& u = universe.matrix();
  std::vector<double> out(universe.size());
  if (universe.method() == UniverseMethod::identity) {
    for (std::size_t j = 0; j < out.size(); ++j) out[j] = static_cast<double>(word_vec[j]);
  } else {
    for (Eigen::Index j = 0; j < u.rows(); ++j) {
      const double* row = u.row(j).data();
      double s = 0.0;
      for (std::size_t k = 0; k < word_vec.size(); ++k) s += row[k] * static_cast<double>(word_vec[k]);
      out[static_cast<std::size_t>(j)] = s;
    }
  }
  if (clip)
    for (double& v : out) v = std::max(v, 0.0);
  return out;
}

// Running max of count * membership; starts at -inf so unclipped runs work.
void pool(std::vector<double>& mu, const std::vector<double>& v, std::uint32_t count) {
  const double c = static_cast<double>(count);
  for (std::size_t j = 0; j < mu.size(); ++j) mu[j] = std::max(mu[j], c * v[j]);
}

double dot(std::span<const float> a, std::span<const float> b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += static_cast<double>(a[k]) * static_cast<double>(b[k]);
  return s;
}

}  // namespace

std::vector<double> fuzzy_word_embedding(const UniverseMatrix& universe,
                                         std::span<const double> word_vec, bool clip) {
  return memberships(universe, word_vec, clip);
}

std::vector<double> fuzzy_word_embedding(const UniverseMatrix& universe,
                                         std::span<const float> word_vec, bool clip) {
  return memberships(universe, word_vec, clip);
}

FuzzySentenceEmbedding sfbow_embed(const UniverseMatrix& universe, const WordEmbeddingModel& model,
                                   const SentenceBag& bag, bool clip) {
  if (universe.dim() != model.dim())
    throw DimensionError("universe width " + std::to_string(universe.dim()) +
                         " does not match embedding dimension " + std::to_string(model.dim()));
  FuzzySentenceEmbedding out;
  out.universe_id = universe.id();
  if (bag.empty()) {
    out.values.assign(universe.size(), 0.0);
    return out;
  }
  out.values.assign(universe.size(), -std::numeric_limits<double>::infinity());
  for (const auto& [index, count] : bag.entries)
    pool(out.values, memberships(universe, model.row(index), clip), count);
  return out;
}

double fuzzy_jaccard(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size())
    throw DimensionError("fuzzy Jaccard operands differ in length");
  double shared = 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    shared += std::min(a[i], b[i]);
    total += std::max(a[i], b[i]);
  }
  return total == 0.0 ? 0.0 : shared / total;
}

SimilarityScore fuzzy_jaccard(const FuzzySentenceEmbedding& a, const FuzzySentenceEmbedding& b) {
  if (a.universe_id != b.universe_id)
    throw DimensionError("fuzzy embeddings come from different universes");
  return {fuzzy_jaccard(a.values, b.values), Measure::fuzzy_jaccard};
}

SimilarityScore crisp_jaccard(std::span<const std::string> tokens_a,
                              std::span<const std::string> tokens_b) {
  std::unordered_set<std::string_view> a(tokens_a.begin(), tokens_a.end());
  std::unordered_set<std::string_view> b(tokens_b.begin(), tokens_b.end());
  std::size_t shared = 0;
  for (auto t : a) shared += b.count(t);
  std::size_t total = a.size() + b.size() - shared;
  return {total == 0 ? 0.0 : static_cast<double>(shared) / static_cast<double>(total),
          Measure::crisp_jaccard};
}

std::pair<std::vector<double>, std::vector<double>> dynamax_embeddings(
    const WordEmbeddingModel& model, const SentenceBag& bag_a, const SentenceBag& bag_b, bool clip) {
  std::vector<WordIndex> universe;
  for (const auto& [index, count] : bag_a.entries) universe.push_back(index);
  for (const auto& [index, count] : bag_b.entries) universe.push_back(index);
  std::sort(universe.begin(), universe.end());
  universe.erase(std::unique(universe.begin(), universe.end()), universe.end());

  auto embed = [&](const SentenceBag& bag) {
    std::vector<double> mu(universe.size(), bag.empty() ? 0.0 : -std::numeric_limits<double>::infinity());
    std::vector<double> v(universe.size());
    for (const auto& [index, count] : bag.entries) {
      auto word = model.row(index);
      for (std::size_t j = 0; j < universe.size(); ++j) {
        double m = dot(model.row(universe[j]), word);
        v[j] = clip ? std::max(m, 0.0) : m;
      }
      pool(mu, v, count);
    }
    return mu;
  };
  return {embed(bag_a), embed(bag_b)};
}

SimilarityScore dynamax_similarity(const WordEmbeddingModel& model, const SentenceBag& bag_a,
                                   const SentenceBag& bag_b, Warnings* warnings, bool clip) {
  if (bag_a.empty() || bag_b.empty()) {
    warn(warnings, "DynaMax: sentence has no in-vocabulary words; similarity set to 0");
    return {0.0, Measure::dynamax};
  }
  auto [a, b] = dynamax_embeddings(model, bag_a, bag_b, clip);
  return {fuzzy_jaccard(a, b), Measure::dynamax};
}

SimilarityScore cosine_similarity(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw DimensionError("cosine operands differ in length");
  double ab = 0.0, aa = 0.0, bb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ab += a[i] * b[i];
    aa += a[i] * a[i];
    bb += b[i] * b[i];
  }
  if (aa == 0.0 || bb == 0.0) return {0.0, Measure::cosine};
  return {std::clamp(ab / (std::sqrt(aa) * std::sqrt(bb)), -1.0, 1.0), Measure::cosine};
}

std::vector<double> average_embedding(const WordEmbeddingModel& model, const SentenceBag& bag) {
  std::vector<double> mean(model.dim(), 0.0);
  std::size_t total = 0;
  for (const auto& [index, count] : bag.entries) {
    auto row = model.row(index);
    for (std::size_t k = 0; k < mean.size(); ++k) mean[k] += static_cast<double>(count) * row[k];
    total += count;
  }
  if (total > 0)
    for (double& v : mean) v /= static_cast<double>(total);
  return mean;
}

}  // namespace sfbow
