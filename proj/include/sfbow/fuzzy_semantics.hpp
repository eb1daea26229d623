#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sfbow/embedding_store.hpp"
#include "sfbow/universe_builder.hpp"

namespace sfbow {

/// Max-pooled membership degrees of a sentence over a universe. Values are
/// non-negative unless clipping was explicitly disabled.
struct FuzzySentenceEmbedding {
  std::vector<double> values;
  std::uint64_t universe_id = 0;
};

enum class Measure { fuzzy_jaccard, cosine, crisp_jaccard, dynamax };

std::string_view to_string(Measure measure);

struct SimilarityScore {
  double value = 0.0;
  Measure measure = Measure::fuzzy_jaccard;
};

/// U * word_vec, negative memberships clipped to zero when `clip` is set.
std::vector<double> fuzzy_word_embedding(const UniverseMatrix& universe,
                                         std::span<const double> word_vec, bool clip = true);
std::vector<double> fuzzy_word_embedding(const UniverseMatrix& universe,
                                         std::span<const float> word_vec, bool clip = true);

/// mu_j = max over bag words of count * membership_j. Empty bag -> zeros.
FuzzySentenceEmbedding sfbow_embed(const UniverseMatrix& universe, const WordEmbeddingModel& model,
                                   const SentenceBag& bag, bool clip = true);

/// sum(min) / sum(max); 0 when both vectors are zero.
double fuzzy_jaccard(std::span<const double> a, std::span<const double> b);
/// Throws DimensionError when the embeddings come from different universes.
SimilarityScore fuzzy_jaccard(const FuzzySentenceEmbedding& a, const FuzzySentenceEmbedding& b);

/// Set Jaccard over distinct tokens; 0 when both are empty.
SimilarityScore crisp_jaccard(std::span<const std::string> tokens_a,
                              std::span<const std::string> tokens_b);

/// Fuzzy Jaccard over a per-pair universe made of the distinct words of both
/// bags. Empty bags score 0 with a warning.
SimilarityScore dynamax_similarity(const WordEmbeddingModel& model, const SentenceBag& bag_a,
                                   const SentenceBag& bag_b, Warnings* warnings = nullptr,
                                   bool clip = true);

/// Both sentences embedded over the per-pair DynaMax universe; rows follow
/// ascending word index of the union.
std::pair<std::vector<double>, std::vector<double>> dynamax_embeddings(
    const WordEmbeddingModel& model, const SentenceBag& bag_a, const SentenceBag& bag_b,
    bool clip = true);

/// 0 when either norm is zero.
SimilarityScore cosine_similarity(std::span<const double> a, std::span<const double> b);

/// Count-weighted mean of member embeddings; empty bag -> zeros.
std::vector<double> average_embedding(const WordEmbeddingModel& model, const SentenceBag& bag);

}  // namespace sfbow
