#include <doctest.h>

#include <algorithm>
#include <random>

#include "sfbow/embedding_store.hpp"
#include "support.hpp"

using namespace sfbow;
using sfbow::testing::TempDir;

namespace {

const char* kWord2Vec = "3 2\na 1 0\nb 0 1\nc 1 1\n";
const char* kGlove = "a 1 0\nb 0 1\nc 1 1\n";

std::vector<float> to_vec(std::span<const float> s) { return {s.begin(), s.end()}; }

}  // namespace

TEST_CASE("load word2vec text") {
  TempDir dir;
  auto model = load_embeddings(dir.file("m.txt", kWord2Vec), EmbeddingFormat::word2vec_text);
  CHECK(model.size() == 3);
  CHECK(model.dim() == 2);
  CHECK(to_vec(*model.lookup("c")) == std::vector<float>{1, 1});
  CHECK(model.vocab().words() == std::vector<std::string>{"a", "b", "c"});
}

TEST_CASE("glove text loads the same model without a header") {
  TempDir dir;
  auto w2v = load_embeddings(dir.file("m.txt", kWord2Vec), EmbeddingFormat::word2vec_text);
  auto glove = load_embeddings(dir.file("g.txt", kGlove), EmbeddingFormat::glove_text);
  CHECK(glove.vocab().words() == w2v.vocab().words());
  CHECK(glove.matrix() == w2v.matrix());
}

TEST_CASE("short row reports its line number") {
  TempDir dir;
  auto path = dir.file("bad.txt", "3 2\na 1 0\nb 0\nc 1 1\n");
  try {
    load_embeddings(path, EmbeddingFormat::word2vec_text);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 3);
  }
}

TEST_CASE("malformed embedding files") {
  TempDir dir;
  SUBCASE("unparsable float") {
    CHECK_THROWS_AS(load_embeddings(dir.file("x.txt", "1 2\na 1 zz\n"), EmbeddingFormat::word2vec_text),
                    ParseError);
  }
  SUBCASE("non-finite value") {
    CHECK_THROWS_AS(load_embeddings(dir.file("x.txt", "1 2\na 1 nan\n"), EmbeddingFormat::word2vec_text),
                    ParseError);
  }
  SUBCASE("row count disagrees with header") {
    CHECK_THROWS_AS(load_embeddings(dir.file("x.txt", "4 2\na 1 0\nb 0 1\n"), EmbeddingFormat::word2vec_text),
                    FormatError);
  }
  SUBCASE("bad header") {
    CHECK_THROWS_AS(load_embeddings(dir.file("x.txt", "a 1 0\n"), EmbeddingFormat::word2vec_text),
                    ParseError);
  }
  SUBCASE("missing file") {
    CHECK_THROWS_AS(load_embeddings(dir.path("none.txt"), EmbeddingFormat::glove_text), Error);
  }
}

TEST_CASE("duplicate tokens keep the first row and are tallied") {
  TempDir dir;
  Warnings warnings;
  auto model = load_embeddings(dir.file("d.txt", "3 1\na 1\nb 2\na 3\n"), EmbeddingFormat::word2vec_text,
                               &warnings);
  CHECK(model.size() == 2);
  CHECK((*model.lookup("a"))[0] == 1.0f);
  REQUIRE(warnings.size() == 1);
  CHECK(warnings.messages()[0].find("1 duplicate") != std::string::npos);
}

TEST_CASE("CRLF and trailing spaces are tolerated") {
  TempDir dir;
  auto model = load_embeddings(dir.file("crlf.txt", "2 2 \r\na 1 0 \r\nb 0 1\r\n"), EmbeddingFormat::word2vec_text);
  CHECK(model.size() == 2);
}

TEST_CASE("model invariants are enforced") {
  CHECK_THROWS_AS(Vocabulary({"a", "a"}), std::invalid_argument);
  EmbeddingMatrix m(2, 1);
  m << 1, std::numeric_limits<float>::infinity();
  CHECK_THROWS(WordEmbeddingModel(Vocabulary({"a", "b"}), m));
  CHECK_THROWS_AS(WordEmbeddingModel(Vocabulary({"a"}), m), DimensionError);
  CHECK_THROWS(WordEmbeddingModel(Vocabulary(std::vector<std::string>{}), EmbeddingMatrix(0, 1)));
}

TEST_CASE("lookup") {
  auto model = sfbow::testing::make_model({"a", "b", "c"}, {{1, 0}, {0, 1}, {1, 1}});
  CHECK(to_vec(*model.lookup("a")) == std::vector<float>{1, 0});
  CHECK_FALSE(model.lookup("zzz").has_value());
  for (WordIndex i = 0; i < model.size(); ++i)
    CHECK(model.lookup(model.vocab().word(i))->data() == model.row(i).data());
}

TEST_CASE("reduce_vocabulary") {
  auto model = sfbow::testing::make_model({"a", "b", "c"}, {{1, 0}, {0, 1}, {1, 1}});

  SUBCASE("top_n keeps a prefix") {
    auto reduced = reduce_vocabulary(model, TopN{2});
    CHECK(reduced.vocab().words() == std::vector<std::string>{"a", "b"});
  }
  SUBCASE("top_n beyond |V| clamps with a warning") {
    Warnings w;
    auto reduced = reduce_vocabulary(model, TopN{10}, &w);
    CHECK(reduced.size() == 3);
    CHECK(w.size() == 1);
  }
  SUBCASE("top_n(0) is rejected") { CHECK_THROWS(reduce_vocabulary(model, TopN{0})); }
  SUBCASE("word list intersection keeps original order") {
    Warnings w;
    auto reduced = reduce_vocabulary(model, WordListTokens{{"c", "zzz"}}, &w);
    CHECK(reduced.vocab().words() == std::vector<std::string>{"c"});
    REQUIRE(w.size() == 1);
    CHECK(w.messages()[0].starts_with("1 word-list"));
  }
  SUBCASE("word list file") {
    TempDir dir;
    auto reduced = reduce_vocabulary(model, WordListFile{dir.file("list.txt", "c\na\n")});
    CHECK(reduced.vocab().words() == std::vector<std::string>{"a", "c"});
  }
  SUBCASE("empty intersection is an error") {
    CHECK_THROWS_AS(reduce_vocabulary(model, WordListTokens{{"zzz"}}), Error);
  }
}

TEST_CASE("reduction keeps rows bit-identical and lookups consistent") {
  std::mt19937_64 rng(11);
  auto model = sfbow::testing::random_model(50, 7, rng);
  for (std::size_t n : {1u, 13u, 50u, 80u}) {
    auto reduced = reduce_vocabulary(model, TopN{n});
    CHECK(reduced.size() == std::min<std::size_t>(n, 50));
    for (const auto& word : reduced.vocab().words()) {
      auto before = *model.lookup(word);
      auto after = *reduced.lookup(word);
      CHECK(std::equal(before.begin(), before.end(), after.begin(), after.end()));
    }
  }
}

TEST_CASE("word2vec round trip") {
  std::mt19937_64 rng(5);
  auto model = sfbow::testing::random_model(20, 4, rng);
  TempDir dir;
  save_embeddings(model, dir.path("rt.txt"));
  auto back = load_embeddings(dir.path("rt.txt"), EmbeddingFormat::word2vec_text);
  CHECK(back.vocab().words() == model.vocab().words());
  CHECK(((back.matrix() - model.matrix()).cwiseAbs().array() <=
         1e-6f * model.matrix().cwiseAbs().array()).all());
}

TEST_CASE("tokenize") {
  using V = std::vector<std::string>;
  CHECK(tokenize("A man, a plan.") == V{"a", "man", "a", "plan"});
  CHECK(tokenize("").empty());
  CHECK(tokenize("don't") == V{"don't"});
  CHECK(tokenize("  \"Hello\"\tWORLD!! ") == V{"hello", "world"});
  CHECK(tokenize("... -- !!") == V{});
  CHECK(tokenize("e-mail (x)") == V{"e-mail", "x"});
  // U+00A0 no-break space splits; curly quotes are edge punctuation; É lowercases.
  CHECK(tokenize("\xE2\x80\x9C" "Caf\xC3\x89" "\xE2\x80\x9D\xC2\xA0ok") == V{"caf\xC3\xA9", "ok"});
}

TEST_CASE("bag_of_words") {
  Vocabulary vocab({"a", "man"});
  std::vector<std::string> tokens{"a", "man", "a"};
  auto bag = bag_of_words(tokens, vocab);
  CHECK(bag.entries == std::map<WordIndex, std::uint32_t>{{0, 2}, {1, 1}});
  CHECK(bag.oov_count == 0);

  std::vector<std::string> oov{"zzz"};
  auto empty = bag_of_words(oov, vocab);
  CHECK(empty.empty());
  CHECK(empty.oov_count == 1);

  auto none = bag_of_words(std::vector<std::string>{}, vocab);
  CHECK(none.empty());
  CHECK(none.oov_count == 0);
}

TEST_CASE("bag counts plus OOV equal the token count") {
  Vocabulary vocab({"a", "b", "c"});
  std::mt19937_64 rng(3);
  const std::vector<std::string> pool{"a", "b", "c", "x", "y"};
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<std::string> tokens(rng() % 12);
    for (auto& t : tokens) t = pool[rng() % pool.size()];
    CHECK(bag_of_words(tokens, vocab).token_count() == tokens.size());
  }
}
