#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "sfbow/error.hpp"

namespace sfbow {

/// Row-major so that each word embedding is a contiguous span.
using EmbeddingMatrix = Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

using WordIndex = std::uint32_t;

/// Ordered list of unique tokens. Position in the list is the word index;
/// for pretrained files this is also the corpus frequency rank.
class Vocabulary {
 public:
  Vocabulary() = default;
  /// Throws std::invalid_argument on duplicate tokens.
  explicit Vocabulary(std::vector<std::string> words);

  std::size_t size() const noexcept { return words_.size(); }
  bool empty() const noexcept { return words_.empty(); }
  const std::string& word(WordIndex i) const { return words_.at(i); }
  const std::vector<std::string>& words() const noexcept { return words_; }
  std::optional<WordIndex> index(std::string_view token) const;
  bool contains(std::string_view token) const { return index(token).has_value(); }

 private:
  struct Hash {
    using is_transparent = void;
    std::size_t operator()(std::string_view s) const noexcept {
      return std::hash<std::string_view>{}(s);
    }
  };
  std::vector<std::string> words_;
  std::unordered_map<std::string, WordIndex, Hash, std::equal_to<>> index_;
};

/// Immutable vocabulary plus |V| x d embedding matrix.
class WordEmbeddingModel {
 public:
  /// Validates shape, d > 0, |V| >= 1 and finiteness of every entry.
  WordEmbeddingModel(Vocabulary vocab, EmbeddingMatrix matrix);

  const Vocabulary& vocab() const noexcept { return vocab_; }
  const EmbeddingMatrix& matrix() const noexcept { return matrix_; }
  std::size_t size() const noexcept { return vocab_.size(); }
  std::size_t dim() const noexcept { return static_cast<std::size_t>(matrix_.cols()); }

  std::span<const float> row(WordIndex i) const;
  /// Row of `word`, or nullopt when the word is out of vocabulary.
  std::optional<std::span<const float>> lookup(std::string_view word) const;

 private:
  Vocabulary vocab_;
  EmbeddingMatrix matrix_;
};

enum class EmbeddingFormat { word2vec_text, glove_text };

EmbeddingFormat parse_embedding_format(std::string_view name);

/// Reads a text embedding file. Duplicate tokens keep their first row and
/// are reported through `warnings`.
WordEmbeddingModel load_embeddings(const std::filesystem::path& path, EmbeddingFormat format,
                                   Warnings* warnings = nullptr);

/// Writes word2vec-text with shortest round-trip float formatting.
void save_embeddings(const WordEmbeddingModel& model, const std::filesystem::path& path,
                     EmbeddingFormat format = EmbeddingFormat::word2vec_text);

struct TopN {
  std::size_t n;
};
struct WordListFile {
  std::filesystem::path path;
};
struct WordListTokens {
  std::vector<std::string> tokens;
};

/// Keeps the first n rows (n clamped to |V| with a warning).
WordEmbeddingModel reduce_vocabulary(const WordEmbeddingModel& model, TopN policy,
                                     Warnings* warnings = nullptr);
/// Keeps rows whose token is listed, in original order. Throws Error when
/// nothing matches; unmatched list entries are reported as one warning.
WordEmbeddingModel reduce_vocabulary(const WordEmbeddingModel& model, const WordListTokens& policy,
                                     Warnings* warnings = nullptr);
WordEmbeddingModel reduce_vocabulary(const WordEmbeddingModel& model, const WordListFile& policy,
                                     Warnings* warnings = nullptr);

std::vector<std::string> read_word_list(const std::filesystem::path& path);

/// Lowercase, split on Unicode whitespace, strip edge punctuation, drop empties.
std::vector<std::string> tokenize(std::string_view text);

/// Sparse count vector over a vocabulary. Entries are keyed by word index.
struct SentenceBag {
  std::map<WordIndex, std::uint32_t> entries;
  std::size_t oov_count = 0;

  bool empty() const noexcept { return entries.empty(); }
  std::size_t token_count() const noexcept;
};

SentenceBag bag_of_words(std::span<const std::string> tokens, const Vocabulary& vocab);

}  // namespace sfbow
