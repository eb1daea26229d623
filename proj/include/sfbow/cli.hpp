#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "sfbow/universe_builder.hpp"

namespace sfbow::cli {

/// Parsed form of --universe.
struct UniverseSpec {
  enum class Kind { identity, pca, kmeans, spherical_kmeans, dbscan, dynamax, file };
  Kind kind = Kind::identity;
  std::size_t k = 0;
  DbscanOptions dbscan;
  std::filesystem::path path;
};

/// identity | pca | kmeans:K | skmeans:K | dbscan:EPS[:MINPTS[:METRIC]] | dynamax | file:PATH
UniverseSpec parse_universe_spec(std::string_view text);

/// Parsed form of --vocab: full | top:N | list:PATH.
struct VocabSpec {
  enum class Kind { full, top_n, word_list };
  Kind kind = Kind::full;
  std::size_t n = 0;
  std::filesystem::path path;
  std::string describe() const;
};

VocabSpec parse_vocab_spec(std::string_view text);

/// Runs the command line; all output goes to the given streams.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace sfbow::cli
