#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "persona/attentive.h"
#include "persona/classifier.h"
#include "persona/formats.h"
#include "persona/logreg.h"
#include "persona/trait.h"

namespace persona {

inline constexpr std::uint64_t kDefaultSeed = 42;

struct FoldPlan {
  std::size_t n_items = 0;
  std::size_t k = 0;
  std::uint64_t seed = 0;
  std::vector<std::vector<std::size_t>> folds;  // test indices per fold
};

// Shuffles 0..n-1 with Fisher-Yates driven by splitmix64(seed), then deals
// the permutation round-robin into k folds. Throws BadKError unless
// 2 <= k <= n.
FoldPlan KFoldSplit(std::size_t n, std::size_t k, std::uint64_t seed = kDefaultSeed);

// As KFoldSplit, but the shuffled indices are grouped by label (0 first)
// before dealing, so each fold receives a near-equal share of both classes.
FoldPlan StratifiedKFoldSplit(std::span<const int> labels, std::size_t k,
                              std::uint64_t seed = kDefaultSeed);

// Throws DataError unless the folds partition 0..n_items-1.
void ValidatePlan(const FoldPlan& plan);

enum class ModelKind { kMajority, kLogReg, kAttentive, kMemorize };

std::string_view ModelName(ModelKind kind);
std::optional<ModelKind> ParseModelKind(std::string_view name);

struct ModelSpec {
  ModelKind kind = ModelKind::kMajority;
  LogRegConfig logreg;
  AttentiveConfig attentive;
};

std::unique_ptr<Classifier> MakeClassifier(const ModelSpec& spec);

struct CvOptions {
  // Harness self-check: score each fold's model on its own training set.
  bool evaluate_on_train = false;
};

struct CvResult {
  std::vector<double> fold_accuracy;  // fraction correct per fold
  double mean = 0;                    // mean fold accuracy, fraction

  double MeanPercent() const { return 100.0 * mean; }
};

// Trains on each fold's complement and scores accuracy on the fold. Training
// examples are presented in a canonical (text, label) order, so the result
// depends only on which items each fold holds. Errors raised while training
// fold f are rethrown with "fold f:" prepended.
CvResult CrossValidate(std::span<const Example> items, const ModelSpec& spec,
                       const FoldPlan& plan, const CvOptions& options = {});

// Projects labeled items onto one trait. Throws LabelError for an unlabeled
// item.
std::vector<Example> ExamplesFor(std::span<const FormattedItem> items, Trait trait);

// Share of the dominant class, as a fraction.
double DominantClassShare(std::span<const int> labels);

enum class TableStyle { kCsv, kMarkdown };

struct ResultRow {
  std::string model;
  std::optional<Format> format;
  PerTrait<std::optional<double>> cells{};  // fractions in [0, 1]
};

struct ResultTable {
  std::vector<ResultRow> rows;

  // Creates the (model, format) row on first use. Throws DataError when the
  // value is outside [0, 1].
  void Set(const std::string& model, std::optional<Format> format, Trait trait,
           double fraction);
};

// Percentage with two decimals, rounded half-up: 0.59716 -> "59.72".
std::string FormatPercent(double fraction);

// Columns AGR..NEU in canonical order; rows with a format are grouped in the
// order S, S+C, F (stable within a group). An empty table renders its header.
std::string EmitResults(const ResultTable& table, TableStyle style);

}  // namespace persona
