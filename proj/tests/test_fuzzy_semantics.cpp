#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "oracles.hpp"
#include "sfbow/fuzzy_semantics.hpp"
#include "support.hpp"

using namespace sfbow;
using sfbow::testing::make_model;

namespace {

UniverseMatrix custom_universe(std::initializer_list<std::initializer_list<double>> rows) {
  PointMatrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.begin()->size()));
  Eigen::Index i = 0;
  for (const auto& r : rows) {
    Eigen::Index j = 0;
    for (double v : r) m(i, j++) = v;
    ++i;
  }
  return UniverseMatrix(std::move(m), UniverseMethod::kmeans, "test");
}

}  // namespace

TEST_CASE("fuzzy word embedding clips negative memberships") {
  auto u = custom_universe({{1, 0}, {0, 1}, {1, 1}});
  std::vector<double> word{0.5, -0.2};
  auto v = fuzzy_word_embedding(u, std::span<const double>(word));
  CHECK(v[0] == doctest::Approx(0.5));
  CHECK(v[1] == 0.0);
  CHECK(v[2] == doctest::Approx(0.3));
  auto raw = fuzzy_word_embedding(u, std::span<const double>(word), false);
  CHECK(raw[1] == doctest::Approx(-0.2));

  std::vector<double> zero{0, 0};
  CHECK(fuzzy_word_embedding(u, std::span<const double>(zero)) == std::vector<double>{0, 0, 0});

  std::vector<double> wrong{1, 2, 3};
  CHECK_THROWS_AS(fuzzy_word_embedding(u, std::span<const double>(wrong)), DimensionError);
}

TEST_CASE("identity universe passes non-negative vectors through") {
  auto u = identity_universe(3);
  std::vector<float> word{0.25f, 2.0f, 0.0f};
  CHECK(fuzzy_word_embedding(u, std::span<const float>(word)) == std::vector<double>{0.25, 2.0, 0.0});
}

TEST_CASE("sfbow_embed max-pools count-weighted memberships") {
  // Identity universe so that the fuzzy word embeddings are the rows themselves.
  auto model = make_model({"w1", "w2"}, {{0.5f, 0.0f, 0.3f}, {0.1f, 0.4f, 0.0f}});
  auto u = identity_universe(3);
  SentenceBag bag;
  bag.entries = {{0, 2}, {1, 1}};
  auto e = sfbow_embed(u, model, bag);
  CHECK(e.values[0] == doctest::Approx(1.0));
  CHECK(e.values[1] == doctest::Approx(0.4));
  CHECK(e.values[2] == doctest::Approx(0.6));
  CHECK(e.universe_id == u.id());

  SentenceBag single;
  single.entries = {{1, 1}};
  auto row = model.row(1);
  CHECK(sfbow_embed(u, model, single).values == std::vector<double>(row.begin(), row.end()));

  CHECK(sfbow_embed(u, model, SentenceBag{}).values == std::vector<double>{0, 0, 0});
  CHECK_THROWS_AS(sfbow_embed(identity_universe(2), model, bag), DimensionError);
}

TEST_CASE("sfbow_embed worked example with a non-trivial universe") {
  // Memberships [0.5,0,0.3] (count 2) and [0.1,0.4,0.5] (count 1).
  auto u = custom_universe({{1, 0}, {0, 1}, {1, 1}});
  auto model = make_model({"w1", "w2"}, {{0.5f, -0.2f}, {0.1f, 0.4f}});
  SentenceBag bag;
  bag.entries = {{0, 2}, {1, 1}};
  auto e = sfbow_embed(u, model, bag).values;
  CHECK(e[0] == doctest::Approx(1.0));
  CHECK(e[1] == doctest::Approx(0.4));
  CHECK(e[2] == doctest::Approx(0.6));
}

TEST_CASE("fuzzy jaccard") {
  std::vector<double> a{1, 2, 0}, b{2, 1, 0}, zero{0, 0, 0};
  CHECK(fuzzy_jaccard(a, b) == 0.5);
  CHECK(fuzzy_jaccard(a, a) == 1.0);
  CHECK(fuzzy_jaccard(zero, b) == 0.0);
  CHECK(fuzzy_jaccard(zero, zero) == 0.0);
  std::vector<double> short_vec{1};
  CHECK_THROWS_AS(fuzzy_jaccard(a, short_vec), DimensionError);

  FuzzySentenceEmbedding x{a, 1}, y{b, 2};
  CHECK_THROWS_AS(fuzzy_jaccard(x, y), DimensionError);
  y.universe_id = 1;
  CHECK(fuzzy_jaccard(x, y).value == 0.5);
  CHECK(fuzzy_jaccard(x, y).measure == Measure::fuzzy_jaccard);
}

TEST_CASE("crisp jaccard") {
  using V = std::vector<std::string>;
  CHECK(crisp_jaccard(V{"a", "b"}, V{"b", "c"}).value == doctest::Approx(1.0 / 3.0));
  CHECK(crisp_jaccard(V{"a", "b"}, V{"b", "a"}).value == 1.0);
  CHECK(crisp_jaccard(V{"a"}, V{"b"}).value == 0.0);
  CHECK(crisp_jaccard(V{}, V{}).value == 0.0);
  // Repeating a shared word is invisible to set semantics.
  CHECK(crisp_jaccard(V{"a", "b", "b", "b"}, V{"b", "c", "b"}).value == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("dynamax") {
  auto model = make_model({"w1", "w2", "w3"}, {{1, 0}, {0, 1}, {1, 1}});
  SentenceBag a, b;
  a.entries = {{0, 1}};
  b.entries = {{1, 1}};
  CHECK(dynamax_similarity(model, a, b).value == 0.0);
  CHECK(dynamax_similarity(model, a, a).value == 1.0);

  SentenceBag c, d;
  c.entries = {{0, 1}, {2, 1}};
  d.entries = {{1, 1}, {2, 1}};
  auto [mu_c, mu_d] = dynamax_embeddings(model, c, d);
  CHECK(mu_c.size() == 3);
  CHECK(mu_d.size() == 3);

  Warnings w;
  CHECK(dynamax_similarity(model, a, SentenceBag{}, &w).value == 0.0);
  CHECK(w.size() == 1);
}

TEST_CASE("dynamax agrees with the literal one-hot reference") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t vocab = 2 + rng() % 9;
    auto model = sfbow::testing::random_model(vocab, 3, rng);
    Eigen::MatrixXd w = model.matrix().cast<double>();
    oracle::Sentence sa(1 + rng() % 6), sb(1 + rng() % 6);
    for (auto& i : sa) i = rng() % vocab;
    for (auto& i : sb) i = rng() % vocab;
    SentenceBag a, b;
    for (auto i : sa) ++a.entries[static_cast<WordIndex>(i)];
    for (auto i : sb) ++b.entries[static_cast<WordIndex>(i)];
    CHECK(std::abs(dynamax_similarity(model, a, b).value - oracle::dynamax(w, sa, sb)) <= 1e-9);
  }
}

TEST_CASE("cosine similarity") {
  std::vector<double> a{1, 0}, b{1, 1}, c{0, 1}, z{0, 0};
  CHECK(cosine_similarity(a, a).value == doctest::Approx(1.0));
  CHECK(cosine_similarity(a, c).value == 0.0);
  CHECK(cosine_similarity(a, b).value == doctest::Approx(1.0 / std::sqrt(2.0)));
  CHECK(cosine_similarity(a, z).value == 0.0);
  std::vector<double> three{1, 2, 3};
  CHECK_THROWS_AS(cosine_similarity(a, three), DimensionError);
}

TEST_CASE("average embedding") {
  auto model = make_model({"a", "b"}, {{1, 0}, {0, 1}});
  SentenceBag both;
  both.entries = {{0, 1}, {1, 1}};
  CHECK(average_embedding(model, both) == std::vector<double>{0.5, 0.5});
  SentenceBag one;
  one.entries = {{1, 1}};
  CHECK(average_embedding(model, one) == std::vector<double>{0, 1});
  CHECK(average_embedding(model, SentenceBag{}) == std::vector<double>{0, 0});
  SentenceBag weighted;
  weighted.entries = {{0, 3}, {1, 1}};
  CHECK(average_embedding(model, weighted) == std::vector<double>{0.75, 0.25});
}

TEST_CASE("sfbow embedding ignores token order") {
  std::mt19937_64 rng(12);
  auto model = sfbow::testing::random_model(8, 4, rng);
  std::mt19937_64 urng(1);
  auto u = pca_universe(model).universe;
  std::vector<std::string> tokens{"w1", "w3", "w3", "w7", "w0", "zzz"};
  auto reference = sfbow_embed(u, model, bag_of_words(tokens, model.vocab())).values;
  for (int i = 0; i < 20; ++i) {
    std::shuffle(tokens.begin(), tokens.end(), urng);
    CHECK(sfbow_embed(u, model, bag_of_words(tokens, model.vocab())).values == reference);
  }
}
