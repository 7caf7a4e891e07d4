#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "persona/annotation.h"
#include "persona/trait.h"

namespace persona::agreement {

// Rating alphabet shared by every metric here.
inline constexpr int kCategories[] = {-1, 0, 1};

enum class Weighting {
  kNone,    // plain Cohen's kappa
  kLinear,  // agreement weight 1 - |i - j| / 2 on the ordered scale -1 < 0 < 1
};

// Cohen's kappa (p_o - p_e) / (1 - p_e) between two raters over the same
// items. Returns 1 when both raters use one and the same category throughout.
// Throws LengthMismatchError, EmptyInputError, ScoreRangeError.
double CohenKappa(std::span<const int> r1, std::span<const int> r2,
                  Weighting weighting = Weighting::kNone);

// Fleiss' kappa. items[i] holds the categories assigned to item i; every item
// must carry the same number n >= 2 of ratings. When expected agreement is 1
// (a single category used everywhere) the result is 1.
// Throws EmptyInputError, UnequalRaterCountError, ScoreRangeError,
// DegenerateError.
double FleissKappa(std::span<const std::vector<int>> items);

// Items x raters table of five-trait judgments.
struct RatingMatrix {
  std::vector<std::string> items;
  std::vector<std::string> raters;
  // ratings[i][r] is rater r's judgment of item i, if any.
  std::vector<std::vector<std::optional<PerTrait<int>>>> ratings;
};

enum class RaterColumns {
  kAnnotatorId,  // one column per annotator id
  kSlot,         // column j holds each item's j-th annotation (by annotator id)
};

RatingMatrix BuildRatingMatrix(const AnnotationStore& store,
                               RaterColumns columns = RaterColumns::kAnnotatorId);

// Cohen's kappa between two raters on one trait over items both rated.
double PairKappa(const RatingMatrix& m, std::size_t rater_a, std::size_t rater_b,
                 Trait trait, Weighting weighting = Weighting::kNone);

// Mean of PairKappa over every unordered rater pair and every trait, each
// (pair, trait) cell weighted equally. Requires at least two raters.
double AveragePairwiseKappa(const RatingMatrix& m,
                            Weighting weighting = Weighting::kNone);

// Fleiss' kappa on one trait over items that carry ratings.
double FleissKappa(const RatingMatrix& m, Trait trait);

struct PairKappaRow {
  std::string rater_a;
  std::string rater_b;
  PerTrait<double> kappa{};
};

struct AgreementReport {
  std::vector<PairKappaRow> pairs;
  PerTrait<double> pairwise_by_trait{};  // mean over pairs
  double pairwise_mean = 0;              // mean over (pair, trait) cells
  // Per pair, one kappa over all five traits' ratings pooled as items; then
  // averaged over pairs.
  double pairwise_pooled_traits = 0;
  PerTrait<double> fleiss_by_trait{};
  double fleiss_mean = 0;
};

AgreementReport Summarize(const RatingMatrix& m,
                          Weighting weighting = Weighting::kNone);

}  // namespace persona::agreement
