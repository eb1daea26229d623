#include "sfbow/embedding_store.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <unordered_set>

namespace sfbow {

Vocabulary::Vocabulary(std::vector<std::string> words) : words_(std::move(words)) {
  index_.reserve(words_.size());
  for (std::size_t i = 0; i < words_.size(); ++i) {
    auto [it, inserted] = index_.emplace(words_[i], static_cast<WordIndex>(i));
    if (!inserted) throw std::invalid_argument("duplicate token in vocabulary: " + words_[i]);
  }
}

std::optional<WordIndex> Vocabulary::index(std::string_view token) const {
  auto it = index_.find(token);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

WordEmbeddingModel::WordEmbeddingModel(Vocabulary vocab, EmbeddingMatrix matrix)
    : vocab_(std::move(vocab)), matrix_(std::move(matrix)) {
  if (vocab_.empty()) throw std::invalid_argument("embedding model needs at least one word");
  if (matrix_.cols() == 0) throw std::invalid_argument("embedding dimension must be positive");
  if (static_cast<std::size_t>(matrix_.rows()) != vocab_.size())
    throw DimensionError("embedding matrix has " + std::to_string(matrix_.rows()) +
                         " rows for a vocabulary of " + std::to_string(vocab_.size()));
  if (!matrix_.allFinite()) throw std::invalid_argument("embedding matrix has non-finite entries");
}

std::span<const float> WordEmbeddingModel::row(WordIndex i) const {
  if (i >= vocab_.size()) throw std::out_of_range("word index out of range");
  return {matrix_.data() + static_cast<std::size_t>(i) * dim(), dim()};
}

std::optional<std::span<const float>> WordEmbeddingModel::lookup(std::string_view word) const {
  auto i = vocab_.index(word);
  if (!i) return std::nullopt;
  return row(*i);
}

EmbeddingFormat parse_embedding_format(std::string_view name) {
  if (name == "word2vec" || name == "word2vec-text") return EmbeddingFormat::word2vec_text;
  if (name == "glove" || name == "glove-text") return EmbeddingFormat::glove_text;
  throw std::invalid_argument("unknown embedding format: " + std::string(name));
}

namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t pos = 0;
  while (pos < line.size()) {
    while (pos < line.size() && (line[pos] == ' ' || line[pos] == '\t')) ++pos;
    if (pos == line.size()) break;
    std::size_t end = pos;
    while (end < line.size() && line[end] != ' ' && line[end] != '\t') ++end;
    fields.push_back(line.substr(pos, end - pos));
    pos = end;
  }
  return fields;
}

template <typename T>
bool parse_number(std::string_view field, T& out) {
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), out);
  return ec == std::errc() && ptr == field.data() + field.size();
}

}  // namespace

WordEmbeddingModel load_embeddings(const std::filesystem::path& path, EmbeddingFormat format,
                                   Warnings* warnings) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open embedding file: " + path.string());

  std::vector<std::string> words;
  std::unordered_set<std::string> seen;
  std::vector<float> values;
  std::size_t dim = 0;
  std::size_t declared_rows = 0;
  std::size_t body_rows = 0;
  std::size_t duplicates = 0;
  bool header_pending = format == EmbeddingFormat::word2vec_text;

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    auto fields = split_fields(line);
    if (fields.empty()) continue;

    if (header_pending) {
      if (fields.size() != 2 || !parse_number(fields[0], declared_rows) ||
          !parse_number(fields[1], dim) || dim == 0)
        throw ParseError(line_no, "expected word2vec header \"<count> <dim>\"");
      header_pending = false;
      values.reserve(declared_rows * dim);
      words.reserve(declared_rows);
      continue;
    }

    if (dim == 0) dim = fields.size() - 1;
    if (dim == 0 || fields.size() != dim + 1)
      throw ParseError(line_no, "expected token followed by " + std::to_string(dim) +
                                    " values, got " + std::to_string(fields.size()) + " fields");

    ++body_rows;
    std::string token(fields[0]);
    bool keep = seen.insert(token).second;
    if (!keep) ++duplicates;
    for (std::size_t j = 1; j <= dim; ++j) {
      float v = 0.0f;
      if (!parse_number(fields[j], v) || !std::isfinite(v))
        throw ParseError(line_no, "bad value \"" + std::string(fields[j]) + "\"");
      if (keep) values.push_back(v);
    }
    if (keep) words.push_back(std::move(token));
  }

  if (header_pending) throw FormatError("missing word2vec header in " + path.string());
  if (format == EmbeddingFormat::word2vec_text && body_rows != declared_rows)
    throw FormatError("header declares " + std::to_string(declared_rows) + " rows but file has " +
                      std::to_string(body_rows));
  if (words.empty()) throw FormatError("no embeddings in " + path.string());
  if (duplicates > 0)
    warn(warnings, std::to_string(duplicates) + " duplicate tokens ignored (first occurrence kept)");

  EmbeddingMatrix matrix = Eigen::Map<const EmbeddingMatrix>(
      values.data(), static_cast<Eigen::Index>(words.size()), static_cast<Eigen::Index>(dim));
  return WordEmbeddingModel(Vocabulary(std::move(words)), std::move(matrix));
}

void save_embeddings(const WordEmbeddingModel& model, const std::filesystem::path& path,
                     EmbeddingFormat format) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write embedding file: " + path.string());
  if (format == EmbeddingFormat::word2vec_text) out << model.size() << ' ' << model.dim() << '\n';
  char buf[64];
  for (std::size_t i = 0; i < model.size(); ++i) {
    out << model.vocab().word(static_cast<WordIndex>(i));
    for (float v : model.row(static_cast<WordIndex>(i))) {
      auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
      out << ' ' << std::string_view(buf, static_cast<std::size_t>(ptr - buf));
    }
    out << '\n';
  }
  if (!out) throw Error("write failed: " + path.string());
}

namespace {

WordEmbeddingModel select_rows(const WordEmbeddingModel& model,
                               const std::vector<WordIndex>& keep) {
  std::vector<std::string> words;
  words.reserve(keep.size());
  EmbeddingMatrix matrix(static_cast<Eigen::Index>(keep.size()),
                         static_cast<Eigen::Index>(model.dim()));
  for (std::size_t r = 0; r < keep.size(); ++r) {
    words.push_back(model.vocab().word(keep[r]));
    matrix.row(static_cast<Eigen::Index>(r)) = model.matrix().row(keep[r]);
  }
  return WordEmbeddingModel(Vocabulary(std::move(words)), std::move(matrix));
}

}  // namespace

WordEmbeddingModel reduce_vocabulary(const WordEmbeddingModel& model, TopN policy,
                                     Warnings* warnings) {
  if (policy.n == 0) throw std::invalid_argument("top_n requires n >= 1");
  std::size_t n = policy.n;
  if (n > model.size()) {
    warn(warnings, "top_n(" + std::to_string(n) + ") exceeds vocabulary size " +
                       std::to_string(model.size()) + "; keeping all rows");
    n = model.size();
  }
  std::vector<std::string> words(model.vocab().words().begin(),
                                 model.vocab().words().begin() + static_cast<std::ptrdiff_t>(n));
  EmbeddingMatrix matrix = model.matrix().topRows(static_cast<Eigen::Index>(n));
  return WordEmbeddingModel(Vocabulary(std::move(words)), std::move(matrix));
}

WordEmbeddingModel reduce_vocabulary(const WordEmbeddingModel& model, const WordListTokens& policy,
                                     Warnings* warnings) {
  std::unordered_set<std::string_view> listed(policy.tokens.begin(), policy.tokens.end());
  std::vector<WordIndex> keep;
  for (std::size_t i = 0; i < model.size(); ++i) {
    if (listed.count(model.vocab().word(static_cast<WordIndex>(i))))
      keep.push_back(static_cast<WordIndex>(i));
  }
  if (keep.empty()) throw Error("word list shares no tokens with the embedding vocabulary");
  std::size_t unmatched = listed.size() - keep.size();
  if (unmatched > 0)
    warn(warnings, std::to_string(unmatched) + " word-list entries not in vocabulary");
  return select_rows(model, keep);
}

WordEmbeddingModel reduce_vocabulary(const WordEmbeddingModel& model, const WordListFile& policy,
                                     Warnings* warnings) {
  return reduce_vocabulary(model, WordListTokens{read_word_list(policy.path)}, warnings);
}

std::vector<std::string> read_word_list(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open word list: " + path.string());
  std::vector<std::string> tokens;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    auto fields = split_fields(line);
    if (!fields.empty()) tokens.emplace_back(fields[0]);
  }
  return tokens;
}

std::size_t SentenceBag::token_count() const noexcept {
  std::size_t total = oov_count;
  for (const auto& [index, count] : entries) total += count;
  return total;
}

SentenceBag bag_of_words(std::span<const std::string> tokens, const Vocabulary& vocab) {
  SentenceBag bag;
  for (const auto& token : tokens) {
    if (auto i = vocab.index(token)) {
      ++bag.entries[*i];
    } else {
      ++bag.oov_count;
    }
  }
  return bag;
}

}  // namespace sfbow
