#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sfbow/embedding_store.hpp"
#include "sfbow/fuzzy_semantics.hpp"
#include "sfbow/universe_builder.hpp"

namespace sfbow {

struct StsPair {
  std::string sentence_a;
  std::string sentence_b;
  double gold = 0.0;
};

struct StsDataset {
  std::string name;
  std::vector<StsPair> pairs;

  std::size_t support() const noexcept { return pairs.size(); }
};

/// TSV rows "gold<TAB>sentence_a<TAB>sentence_b". Unlabelled and malformed
/// rows are skipped and tallied in `warnings`. The task name defaults to
/// the file stem.
StsDataset load_sts(const std::filesystem::path& path, Warnings* warnings = nullptr,
                    std::optional<std::string> name = std::nullopt);

/// 1-based ranks; tied values share the mean of the ranks they span.
std::vector<double> average_ranks(std::span<const double> values);

/// Pearson correlation of average ranks. Throws std::invalid_argument on a
/// length mismatch, fewer than 2 items, or a constant input.
double spearman_rho(std::span<const double> predicted, std::span<const double> gold);

enum class PipelineMeasure { fuzzy_jaccard, cosine, avg_cosine };

PipelineMeasure parse_pipeline_measure(std::string_view name);
std::string_view to_string(PipelineMeasure measure);

/// Fully resolved scoring configuration. With no static universe the
/// fuzzy measures fall back to the per-pair DynaMax universe.
class SimilarityPipeline {
 public:
  SimilarityPipeline(const WordEmbeddingModel& model, std::optional<UniverseMatrix> universe,
                     PipelineMeasure measure, bool clip = true);

  /// Tokenizes both sentences and scores them. A sentence with no
  /// in-vocabulary words scores 0 and adds a warning.
  double score(std::string_view a, std::string_view b, Warnings* warnings = nullptr) const;

  const WordEmbeddingModel& model() const noexcept { return *model_; }
  const std::optional<UniverseMatrix>& universe() const noexcept { return universe_; }
  PipelineMeasure measure() const noexcept { return measure_; }
  bool dynamax() const noexcept { return !universe_.has_value(); }

 private:
  const WordEmbeddingModel* model_;
  std::optional<UniverseMatrix> universe_;
  PipelineMeasure measure_;
  bool clip_;
};

struct TaskResult {
  std::string task;
  std::size_t support = 0;
  double rho = 0.0;  // percentage
};

/// Scores every pair (in parallel; results do not depend on scheduling) and
/// correlates with gold. Errors are rethrown with the task name prefixed.
TaskResult evaluate_task(const StsDataset& dataset, const SimilarityPipeline& pipeline,
                         Warnings* warnings = nullptr);

/// Per-task scores with mean +- population std, plus the support-weighted
/// counterparts.
struct EvalSummary {
  std::vector<TaskResult> per_task;
  double average = 0.0;
  double std = 0.0;
  double weighted_average = 0.0;
  double weighted_std = 0.0;
};

struct TaskScore {
  std::string task;
  double rho = 0.0;
};

EvalSummary aggregate(std::span<const TaskScore> results,
                      const std::map<std::string, std::size_t, std::less<>>& supports);
EvalSummary aggregate(std::span<const TaskResult> results);

enum class ReportFormat { tsv, json };

ReportFormat parse_report_format(std::string_view name);

/// Deterministic serialization; rho values as 2-decimal percentages.
std::string report(const EvalSummary& summary, ReportFormat format);
/// Inverse of report(..., json).
EvalSummary parse_report_json(std::string_view text);

}  // namespace sfbow
