#include "sfbow/cli.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <chrono>
#include <cstdio>
#include <memory>
#include <optional>
#include <ostream>

#include "sfbow/embedding_store.hpp"
#include "sfbow/fuzzy_semantics.hpp"
#include "sfbow/sts_eval.hpp"

namespace sfbow::cli {
namespace {

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> parts;
  for (;;) {
    auto pos = text.find(sep);
    parts.push_back(text.substr(0, pos));
    if (pos == std::string_view::npos) return parts;
    text.remove_prefix(pos + 1);
  }
}

template <typename T>
T parse_number(std::string_view text, std::string_view what) {
  T value{};
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size())
    throw std::invalid_argument("bad " + std::string(what) + ": \"" + std::string(text) + "\"");
  return value;
}

std::string format(const char* fmt, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), fmt, v);
  return buf;
}

}  // namespace

UniverseSpec parse_universe_spec(std::string_view text) {
  UniverseSpec spec;
  auto parts = split(text, ':');
  std::string_view kind = parts[0];
  auto expect_parts = [&](std::size_t lo, std::size_t hi) {
    if (parts.size() < lo || parts.size() > hi)
      throw std::invalid_argument("malformed --universe value: " + std::string(text));
  };
  if (kind == "identity") {
    expect_parts(1, 1);
    spec.kind = UniverseSpec::Kind::identity;
  } else if (kind == "pca") {
    expect_parts(1, 1);
    spec.kind = UniverseSpec::Kind::pca;
  } else if (kind == "dynamax") {
    expect_parts(1, 1);
    spec.kind = UniverseSpec::Kind::dynamax;
  } else if (kind == "kmeans" || kind == "skmeans") {
    expect_parts(2, 2);
    spec.kind = kind == "kmeans" ? UniverseSpec::Kind::kmeans : UniverseSpec::Kind::spherical_kmeans;
    spec.k = parse_number<std::size_t>(parts[1], "cluster count");
  } else if (kind == "dbscan") {
    expect_parts(2, 4);
    spec.kind = UniverseSpec::Kind::dbscan;
    spec.dbscan.eps = parse_number<double>(parts[1], "DBSCAN eps");
    if (parts.size() > 2) spec.dbscan.min_pts = parse_number<std::size_t>(parts[2], "DBSCAN min_pts");
    if (parts.size() > 3) spec.dbscan.metric = parse_dbscan_metric(parts[3]);
  } else if (kind == "file") {
    if (parts.size() < 2) throw std::invalid_argument("--universe file: needs a path");
    spec.kind = UniverseSpec::Kind::file;
    spec.path = std::string(text.substr(5));
  } else {
    throw std::invalid_argument("unknown universe: " + std::string(text));
  }
  return spec;
}

VocabSpec parse_vocab_spec(std::string_view text) {
  VocabSpec spec;
  if (text == "full") return spec;
  if (text.starts_with("top:")) {
    spec.kind = VocabSpec::Kind::top_n;
    spec.n = parse_number<std::size_t>(text.substr(4), "top-n size");
    return spec;
  }
  if (text.starts_with("list:") && text.size() > 5) {
    spec.kind = VocabSpec::Kind::word_list;
    spec.path = std::string(text.substr(5));
    return spec;
  }
  throw std::invalid_argument("unknown --vocab value: " + std::string(text));
}

std::string VocabSpec::describe() const {
  switch (kind) {
    case Kind::full:
      return "full";
    case Kind::top_n:
      return "top:" + std::to_string(n);
    case Kind::word_list:
      return "list:" + path.filename().string();
  }
  return "full";
}

namespace {

struct Settings {
  std::string embeddings;
  std::string format = "word2vec";
  std::string vocab = "full";
  std::string universe = "identity";
  std::string measure = "fuzzy-jaccard";
  std::string output = "tsv";
  std::uint64_t seed = 42;
  bool no_clip = false;
  bool pca_center = false;
};

class Session {
 public:
  Session(const Settings& settings, std::ostream& err) : settings_(settings), err_(err) {}

  void flush_warnings() {
    for (const auto& m : warnings_.messages()) err_ << "warning: " << m << '\n';
    warnings_ = Warnings{};
  }

  Warnings* warnings() { return &warnings_; }

  const WordEmbeddingModel& model() {
    if (!model_) {
      if (settings_.embeddings.empty()) throw std::invalid_argument("--embeddings is required");
      model_.emplace(load_embeddings(settings_.embeddings, parse_embedding_format(settings_.format),
                                     &warnings_));
    }
    return *model_;
  }

  /// Vocabulary subset used as universe construction source.
  const WordEmbeddingModel& source_model() {
    VocabSpec spec = parse_vocab_spec(settings_.vocab);
    if (spec.kind == VocabSpec::Kind::full) return model();
    if (!reduced_) {
      if (spec.kind == VocabSpec::Kind::top_n)
        reduced_.emplace(reduce_vocabulary(model(), TopN{spec.n}, &warnings_));
      else
        reduced_.emplace(reduce_vocabulary(model(), WordListFile{spec.path}, &warnings_));
    }
    return *reduced_;
  }

  std::string source_description() { return parse_vocab_spec(settings_.vocab).describe(); }

  /// nullopt means the per-pair DynaMax universe.
  std::optional<UniverseMatrix> universe() {
    UniverseSpec spec = parse_universe_spec(settings_.universe);
    KMeansOptions km{spec.k, settings_.seed};
    switch (spec.kind) {
      case UniverseSpec::Kind::identity:
        return identity_universe(model().dim());
      case UniverseSpec::Kind::pca:
        return pca_universe(source_model(), {settings_.pca_center}, source_description()).universe;
      case UniverseSpec::Kind::kmeans:
        return kmeans_universe(source_model(), km, source_description()).universe;
      case UniverseSpec::Kind::spherical_kmeans:
        return spherical_kmeans_universe(source_model(), km, source_description()).universe;
      case UniverseSpec::Kind::dbscan:
        return dbscan_universe(source_model(), spec.dbscan, source_description()).universe;
      case UniverseSpec::Kind::dynamax:
        return std::nullopt;
      case UniverseSpec::Kind::file: {
        UniverseMatrix u = load_universe(spec.path);
        if (u.dim() != model().dim())
          throw DimensionError("universe file width " + std::to_string(u.dim()) +
                               " does not match embedding dimension " + std::to_string(model().dim()));
        return u;
      }
    }
    return std::nullopt;
  }

  SimilarityPipeline pipeline() {
    auto measure = parse_pipeline_measure(settings_.measure);
    std::optional<UniverseMatrix> u;
    if (measure != PipelineMeasure::avg_cosine) u = universe();
    return SimilarityPipeline(model(), std::move(u), measure, !settings_.no_clip);
  }

 private:
  const Settings& settings_;
  std::ostream& err_;
  Warnings warnings_;
  std::optional<WordEmbeddingModel> model_;
  std::optional<WordEmbeddingModel> reduced_;
};

int cmd_build_universe(Session& session, const std::string& out_path, std::ostream& out,
                       std::ostream& err) {
  auto start = std::chrono::steady_clock::now();
  auto u = session.universe();
  if (!u) throw std::invalid_argument("build-universe cannot persist a dynamax universe");
  save_universe(*u, out_path);
  double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  out << "u=" << u->size() << " d=" << u->dim() << " method=" << to_string(u->method())
      << " source=" << u->source() << '\n';
  err << "elapsed " << format("%.3f", seconds) << "s\n";
  return 0;
}

int cmd_similarity(Session& session, const Settings& settings, const std::string& a,
                   const std::string& b, std::ostream& out) {
  auto pipeline = session.pipeline();
  double value = pipeline.score(a, b, session.warnings());
  out << format("%.6f", value) << ' ' << settings.measure << '\n';
  return 0;
}

int cmd_eval_sts(Session& session, const Settings& settings,
                 const std::vector<std::string>& paths, std::ostream& out) {
  auto format_kind = parse_report_format(settings.output);
  auto pipeline = session.pipeline();
  std::vector<TaskResult> results;
  for (const auto& path : paths) {
    StsDataset dataset = load_sts(path, session.warnings());
    results.push_back(evaluate_task(dataset, pipeline, session.warnings()));
    session.flush_warnings();
  }
  out << report(aggregate(results), format_kind);
  return 0;
}

int cmd_diagnostics(Session& session, const Settings& settings, const std::vector<std::size_t>& ks,
                    bool pca, const std::string& algorithm, std::ostream& out) {
  if (pca == !ks.empty()) throw std::invalid_argument("diagnostics needs exactly one of --pca or --k-list");
  const WordEmbeddingModel& model = session.source_model();
  if (pca) {
    auto built = pca_universe(model, {settings.pca_center});
    out << "component\texplained_variance_ratio\n";
    for (Eigen::Index c = 0; c < built.model.explained_variance_ratio.size(); ++c)
      out << (c + 1) << '\t' << format("%.12g", built.model.explained_variance_ratio(c)) << '\n';
    return 0;
  }
  const bool spherical = algorithm == "skmeans";
  if (!spherical && algorithm != "kmeans")
    throw std::invalid_argument("unknown --algorithm: " + algorithm);
  PointMatrix points = spherical ? normalized_nonzero_rows(model) : to_points(model);
  out << "k\twcsos\tbcsos\n";
  for (std::size_t k : ks) {
    KMeansOptions options{k, settings.seed};
    ClusterModel clusters = spherical ? spherical_kmeans(points, options) : kmeans(points, options);
    auto diag = cluster_diagnostics(points, clusters);
    out << k << '\t' << format("%.10g", diag.wcsos) << '\t' << format("%.10g", diag.bcsos) << '\n';
  }
  return 0;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Settings settings;
  CLI::App app{"Static fuzzy bag-of-words sentence embeddings and similarity", "sfbow"};
  app.set_config("--config", "", "key=value configuration file; command-line flags take precedence");
  app.fallthrough();
  app.require_subcommand(1);

  app.add_option("--embeddings", settings.embeddings, "Pretrained word embeddings (text format)");
  app.add_option("--format", settings.format, "word2vec | glove")->capture_default_str();
  app.add_option("--vocab", settings.vocab, "Universe source rows: full | top:N | list:PATH")
      ->capture_default_str();
  app.add_option("--universe", settings.universe,
                 "identity | pca | kmeans:K | skmeans:K | dbscan:EPS[:MINPTS[:METRIC]] | dynamax | file:PATH")
      ->capture_default_str();
  app.add_option("--measure", settings.measure, "fuzzy-jaccard | cosine | avg-cosine")->capture_default_str();
  app.add_option("--seed", settings.seed, "Seed for clustering initialisation")->capture_default_str();
  app.add_option("--output", settings.output, "Report format: tsv | json")->capture_default_str();
  app.add_flag("--no-clip", settings.no_clip, "Keep negative memberships (diagnostic)");
  app.add_flag("--pca-center", settings.pca_center, "Mean-center embeddings before PCA");

  std::string out_path;
  auto* build = app.add_subcommand("build-universe", "Build a universe matrix and write it to disk");
  build->add_option("--out", out_path, "Output universe file")->required();

  std::string sentence_a, sentence_b;
  auto* similarity = app.add_subcommand("similarity", "Score one sentence pair");
  similarity->add_option("sentence_a", sentence_a)->required();
  similarity->add_option("sentence_b", sentence_b)->required();

  std::vector<std::string> datasets;
  auto* eval = app.add_subcommand("eval-sts", "Spearman correlation on STS TSV files");
  eval->add_option("datasets", datasets, "gold<TAB>sentence_a<TAB>sentence_b files")->required();

  std::vector<std::size_t> ks;
  bool pca = false;
  std::string algorithm = "kmeans";
  auto* diagnostics = app.add_subcommand("diagnostics", "Emit WCSoS/BCSoS or explained-variance curves");
  diagnostics->add_option("--k-list", ks, "Comma-separated cluster counts")->delimiter(',');
  diagnostics->add_flag("--pca", pca, "Explained variance ratio per principal component");
  diagnostics->add_option("--algorithm", algorithm, "kmeans | skmeans")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  Session session(settings, err);
  try {
    int status = 0;
    if (*build) status = cmd_build_universe(session, out_path, out, err);
    if (*similarity) status = cmd_similarity(session, settings, sentence_a, sentence_b, out);
    if (*eval) status = cmd_eval_sts(session, settings, datasets, out);
    if (*diagnostics) status = cmd_diagnostics(session, settings, ks, pca, algorithm, out);
    session.flush_warnings();
    return status;
  } catch (const std::exception& e) {
    session.flush_warnings();
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv;
  argv.push_back("sfbow");
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace sfbow::cli
