#include "sfbow/sts_eval.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <cmath>
#include <fstream>
#include <numeric>

#include "parallel.hpp"

namespace sfbow {

StsDataset load_sts(const std::filesystem::path& path, Warnings* warnings,
                    std::optional<std::string> name) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open STS file: " + path.string());
  StsDataset dataset;
  dataset.name = name ? *name : path.stem().string();

  std::size_t unlabelled = 0;
  std::size_t malformed = 0;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string_view> fields;
    std::string_view rest(line);
    for (;;) {
      auto tab = rest.find('\t');
      fields.push_back(rest.substr(0, tab));
      if (tab == std::string_view::npos) break;
      rest.remove_prefix(tab + 1);
    }
    if (fields.size() != 3) {
      ++malformed;
      continue;
    }
    if (fields[0].find_first_not_of(" ") == std::string_view::npos) {
      ++unlabelled;
      continue;
    }
    double gold = 0.0;
    auto [ptr, ec] = std::from_chars(fields[0].data(), fields[0].data() + fields[0].size(), gold);
    if (ec != std::errc() || ptr != fields[0].data() + fields[0].size() || !std::isfinite(gold)) {
      ++malformed;
      continue;
    }
    dataset.pairs.push_back({std::string(fields[1]), std::string(fields[2]), gold});
  }
  if (unlabelled > 0)
    warn(warnings, dataset.name + ": skipped " + std::to_string(unlabelled) + " unlabelled pairs");
  if (malformed > 0)
    warn(warnings, dataset.name + ": skipped " + std::to_string(malformed) + " malformed lines");
  if (dataset.pairs.empty()) throw Error(dataset.name + ": no labelled sentence pairs in " + path.string());
  return dataset;
}

std::vector<double> average_ranks(std::span<const double> values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(values.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) ++j;
    double rank = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
    for (std::size_t t = i; t <= j; ++t) ranks[order[t]] = rank;
    i = j + 1;
  }
  return ranks;
}

double spearman_rho(std::span<const double> predicted, std::span<const double> gold) {
  if (predicted.size() != gold.size())
    throw std::invalid_argument("spearman: predicted and gold lengths differ");
  if (predicted.size() < 2) throw std::invalid_argument("spearman: need at least two items");
  auto rp = average_ranks(predicted);
  auto rg = average_ranks(gold);
  const double n = static_cast<double>(rp.size());
  // Average ranks always have mean (n + 1) / 2.
  const double mean = (n + 1.0) / 2.0;
  double cov = 0.0, vp = 0.0, vg = 0.0;
  for (std::size_t i = 0; i < rp.size(); ++i) {
    double a = rp[i] - mean;
    double b = rg[i] - mean;
    cov += a * b;
    vp += a * a;
    vg += b * b;
  }
  if (vp == 0.0 || vg == 0.0) throw std::invalid_argument("spearman: constant input has no rank variance");
  return std::clamp(cov / std::sqrt(vp * vg), -1.0, 1.0);
}

PipelineMeasure parse_pipeline_measure(std::string_view name) {
  if (name == "fuzzy-jaccard" || name == "fuzzy_jaccard") return PipelineMeasure::fuzzy_jaccard;
  if (name == "cosine") return PipelineMeasure::cosine;
  if (name == "avg-cosine" || name == "avg_cosine") return PipelineMeasure::avg_cosine;
  throw std::invalid_argument("unknown measure: " + std::string(name));
}

std::string_view to_string(PipelineMeasure measure) {
  switch (measure) {
    case PipelineMeasure::fuzzy_jaccard:
      return "fuzzy-jaccard";
    case PipelineMeasure::cosine:
      return "cosine";
    case PipelineMeasure::avg_cosine:
      return "avg-cosine";
  }
  return "unknown";
}

SimilarityPipeline::SimilarityPipeline(const WordEmbeddingModel& model,
                                       std::optional<UniverseMatrix> universe,
                                       PipelineMeasure measure, bool clip)
    : model_(&model), universe_(std::move(universe)), measure_(measure), clip_(clip) {
  if (universe_ && universe_->dim() != model.dim())
    throw DimensionError("universe width " + std::to_string(universe_->dim()) +
                         " does not match embedding dimension " + std::to_string(model.dim()));
}

double SimilarityPipeline::score(std::string_view a, std::string_view b, Warnings* warnings) const {
  auto tokens_a = tokenize(a);
  auto tokens_b = tokenize(b);
  SentenceBag bag_a = bag_of_words(tokens_a, model_->vocab());
  SentenceBag bag_b = bag_of_words(tokens_b, model_->vocab());
  if (bag_a.empty() || bag_b.empty()) {
    warn(warnings, "sentence has no in-vocabulary words; similarity set to 0");
    return 0.0;
  }

  if (measure_ == PipelineMeasure::avg_cosine)
    return cosine_similarity(average_embedding(*model_, bag_a), average_embedding(*model_, bag_b)).value;

  std::vector<double> mu_a, mu_b;
  if (universe_) {
    mu_a = sfbow_embed(*universe_, *model_, bag_a, clip_).values;
    mu_b = sfbow_embed(*universe_, *model_, bag_b, clip_).values;
  } else {
    std::tie(mu_a, mu_b) = dynamax_embeddings(*model_, bag_a, bag_b, clip_);
  }
  return measure_ == PipelineMeasure::cosine ? cosine_similarity(mu_a, mu_b).value
                                             : fuzzy_jaccard(mu_a, mu_b);
}

TaskResult evaluate_task(const StsDataset& dataset, const SimilarityPipeline& pipeline,
                         Warnings* warnings) {
  constexpr std::size_t kBlock = 64;
  const std::size_t n = dataset.pairs.size();
  std::vector<double> predicted(n);
  std::vector<double> gold(n);
  std::vector<Warnings> block_warnings(detail::block_count(n, kBlock));
  try {
    detail::for_each_block(n, kBlock, [&](std::size_t b, std::size_t begin, std::size_t end) {
      for (std::size_t i = begin; i < end; ++i) {
        const auto& pair = dataset.pairs[i];
        predicted[i] = pipeline.score(pair.sentence_a, pair.sentence_b, &block_warnings[b]);
        gold[i] = pair.gold;
      }
    });
    std::size_t empty = 0;
    for (const auto& w : block_warnings) empty += w.size();
    if (empty > 0)
      warn(warnings, dataset.name + ": " + std::to_string(empty) +
                         " pairs had a sentence with no in-vocabulary words (scored 0)");
    return {dataset.name, n, 100.0 * spearman_rho(predicted, gold)};
  } catch (const std::exception& e) {
    throw Error(dataset.name + ": " + e.what());
  }
}

namespace {

struct MeanStd {
  double mean;
  double std;
};

// Population statistics: divide by the total weight.
MeanStd weighted_stats(std::span<const double> x, std::span<const double> w) {
  double total = 0.0, sum = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    total += w[i];
    sum += w[i] * x[i];
  }
  double mean = sum / total;
  double ss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) ss += w[i] * (x[i] - mean) * (x[i] - mean);
  return {mean, std::sqrt(ss / total)};
}

}  // namespace

EvalSummary aggregate(std::span<const TaskResult> results) {
  if (results.empty()) throw std::invalid_argument("aggregate: no task results");
  EvalSummary summary;
  summary.per_task.assign(results.begin(), results.end());
  std::vector<double> rho, ones, support;
  for (const auto& r : results) {
    if (r.support == 0) throw std::invalid_argument("aggregate: task " + r.task + " has zero support");
    rho.push_back(r.rho);
    ones.push_back(1.0);
    support.push_back(static_cast<double>(r.support));
  }
  auto plain = weighted_stats(rho, ones);
  auto weighted = weighted_stats(rho, support);
  summary.average = plain.mean;
  summary.std = plain.std;
  summary.weighted_average = weighted.mean;
  summary.weighted_std = weighted.std;
  return summary;
}

EvalSummary aggregate(std::span<const TaskScore> results,
                      const std::map<std::string, std::size_t, std::less<>>& supports) {
  std::vector<TaskResult> full;
  for (const auto& r : results) {
    auto it = supports.find(r.task);
    if (it == supports.end()) throw std::invalid_argument("aggregate: no support for task " + r.task);
    full.push_back({r.task, it->second, r.rho});
  }
  return aggregate(full);
}

ReportFormat parse_report_format(std::string_view name) {
  if (name == "tsv") return ReportFormat::tsv;
  if (name == "json") return ReportFormat::json;
  throw std::invalid_argument("unknown report format: " + std::string(name));
}

namespace {

std::string fixed2(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

double round2(double v) { return std::stod(fixed2(v)); }

}  // namespace

std::string report(const EvalSummary& summary, ReportFormat format) {
  if (summary.per_task.empty()) throw std::invalid_argument("report: no per-task results");
  if (format == ReportFormat::tsv) {
    std::string out = "task\tsupport\trho\n";
    for (const auto& t : summary.per_task)
      out += t.task + "\t" + std::to_string(t.support) + "\t" + fixed2(t.rho) + "\n";
    out += "average\t\t" + fixed2(summary.average) + "\n";
    out += "std\t\t" + fixed2(summary.std) + "\n";
    out += "weighted_average\t\t" + fixed2(summary.weighted_average) + "\n";
    out += "weighted_std\t\t" + fixed2(summary.weighted_std) + "\n";
    return out;
  }
  nlohmann::ordered_json j;
  j["tasks"] = nlohmann::ordered_json::array();
  for (const auto& t : summary.per_task)
    j["tasks"].push_back({{"task", t.task}, {"support", t.support}, {"rho", round2(t.rho)}});
  j["average"] = round2(summary.average);
  j["std"] = round2(summary.std);
  j["weighted_average"] = round2(summary.weighted_average);
  j["weighted_std"] = round2(summary.weighted_std);
  return j.dump(2) + "\n";
}

EvalSummary parse_report_json(std::string_view text) {
  try {
    auto j = nlohmann::json::parse(text);
    EvalSummary s;
    for (const auto& t : j.at("tasks"))
      s.per_task.push_back({t.at("task").get<std::string>(), t.at("support").get<std::size_t>(),
                            t.at("rho").get<double>()});
    s.average = j.at("average").get<double>();
    s.std = j.at("std").get<double>();
    s.weighted_average = j.at("weighted_average").get<double>();
    s.weighted_std = j.at("weighted_std").get<double>();
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("bad report JSON: ") + e.what());
  }
}

}  // namespace sfbow
