#include "persona/agreement.h"

#include <array>
#include <cmath>
#include <map>

#include "persona/error.h"

namespace persona::agreement {

namespace {

constexpr std::size_t kK = 3;

std::size_t CategoryIndex(int c) {
  if (c < -1 || c > 1) {
    throw ScoreRangeError("rating " + std::to_string(c) +
                          " outside the alphabet {-1, 0, 1}");
  }
  return static_cast<std::size_t>(c + 1);
}

double AgreementWeight(std::size_t i, std::size_t j, Weighting weighting) {
  if (weighting == Weighting::kNone) return i == j ? 1.0 : 0.0;
  const double d = i > j ? double(i - j) : double(j - i);
  return 1.0 - d / double(kK - 1);
}

}  // namespace

double CohenKappa(std::span<const int> r1, std::span<const int> r2,
                  Weighting weighting) {
  if (r1.size() != r2.size()) {
    throw LengthMismatchError("rating lists differ in length: " +
                              std::to_string(r1.size()) + " vs " +
                              std::to_string(r2.size()));
  }
  if (r1.empty()) throw EmptyInputError("cohen kappa of empty rating lists");

  std::array<std::array<double, kK>, kK> joint{};
  std::array<double, kK> m1{}, m2{};
  for (std::size_t i = 0; i < r1.size(); ++i) {
    const std::size_t a = CategoryIndex(r1[i]);
    const std::size_t b = CategoryIndex(r2[i]);
    joint[a][b] += 1;
    m1[a] += 1;
    m2[b] += 1;
  }
  const double n = static_cast<double>(r1.size());
  double p_o = 0, p_e = 0;
  for (std::size_t a = 0; a < kK; ++a) {
    for (std::size_t b = 0; b < kK; ++b) {
      const double w = AgreementWeight(a, b, weighting);
      p_o += w * joint[a][b] / n;
      p_e += w * (m1[a] / n) * (m2[b] / n);
    }
  }
  if (p_e >= 1.0) return 1.0;  // single shared category: p_o is 1 too
  return (p_o - p_e) / (1.0 - p_e);
}

double FleissKappa(std::span<const std::vector<int>> items) {
  if (items.empty()) throw EmptyInputError("fleiss kappa of zero items");
  const std::size_t n = items.front().size();
  if (n < 2) throw UnequalRaterCountError("fleiss kappa needs >= 2 raters per item");

  std::array<double, kK> totals{};
  double p_bar = 0;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (items[i].size() != n) {
      throw UnequalRaterCountError("item " + std::to_string(i) + " has " +
                                   std::to_string(items[i].size()) +
                                   " ratings, expected " + std::to_string(n));
    }
    std::array<double, kK> counts{};
    for (int c : items[i]) counts[CategoryIndex(c)] += 1;
    double agree = 0;
    for (std::size_t c = 0; c < kK; ++c) {
      agree += counts[c] * (counts[c] - 1);
      totals[c] += counts[c];
    }
    p_bar += agree / (double(n) * double(n - 1));
  }
  p_bar /= double(items.size());

  const double total = double(items.size()) * double(n);
  double p_e = 0;
  for (double t : totals) p_e += (t / total) * (t / total);
  if (p_e >= 1.0) {
    if (p_bar >= 1.0) return 1.0;
    throw DegenerateError("fleiss kappa undefined: expected agreement is 1");
  }
  return (p_bar - p_e) / (1.0 - p_e);
}

RatingMatrix BuildRatingMatrix(const AnnotationStore& store, RaterColumns columns) {
  RatingMatrix m;
  std::map<std::string, std::vector<const AnnotationRecord*>> by_item;
  const std::vector<AnnotationRecord> records = store.Records();
  for (const AnnotationRecord& r : records) by_item[r.subscene_id].push_back(&r);

  if (columns == RaterColumns::kAnnotatorId) {
    m.raters = store.Annotators();
  } else {
    std::size_t slots = 0;
    for (const auto& [id, recs] : by_item) slots = std::max(slots, recs.size());
    for (std::size_t s = 0; s < slots; ++s) m.raters.push_back("slot" + std::to_string(s));
  }
  std::map<std::string, std::size_t> column_of;
  for (std::size_t c = 0; c < m.raters.size(); ++c) column_of[m.raters[c]] = c;

  for (const auto& [id, recs] : by_item) {
    m.items.push_back(id);
    auto& row = m.ratings.emplace_back(m.raters.size());
    // Records() is ordered by annotator id within an item.
    for (std::size_t j = 0; j < recs.size(); ++j) {
      const std::size_t col = columns == RaterColumns::kSlot
                                  ? j
                                  : column_of.at(recs[j]->annotator_id);
      row[col] = recs[j]->scores;
    }
  }
  return m;
}

double PairKappa(const RatingMatrix& m, std::size_t rater_a, std::size_t rater_b,
                 Trait trait, Weighting weighting) {
  std::vector<int> a, b;
  for (const auto& row : m.ratings) {
    if (row[rater_a] && row[rater_b]) {
      a.push_back((*row[rater_a])[Index(trait)]);
      b.push_back((*row[rater_b])[Index(trait)]);
    }
  }
  if (a.empty()) {
    throw EmptyInputError("raters " + m.raters[rater_a] + " and " +
                          m.raters[rater_b] + " share no items");
  }
  return CohenKappa(a, b, weighting);
}

double AveragePairwiseKappa(const RatingMatrix& m, Weighting weighting) {
  if (m.raters.size() < 2) throw EmptyInputError("pairwise kappa needs >= 2 raters");
  double sum = 0;
  std::size_t cells = 0;
  for (std::size_t a = 0; a < m.raters.size(); ++a) {
    for (std::size_t b = a + 1; b < m.raters.size(); ++b) {
      for (Trait t : kAllTraits) {
        sum += PairKappa(m, a, b, t, weighting);
        ++cells;
      }
    }
  }
  return sum / double(cells);
}

double FleissKappa(const RatingMatrix& m, Trait trait) {
  std::vector<std::vector<int>> items;
  for (const auto& row : m.ratings) {
    std::vector<int> cats;
    for (const auto& r : row) {
      if (r) cats.push_back((*r)[Index(trait)]);
    }
    if (!cats.empty()) items.push_back(std::move(cats));
  }
  return FleissKappa(items);
}

AgreementReport Summarize(const RatingMatrix& m, Weighting weighting) {
  if (m.raters.size() < 2) throw EmptyInputError("agreement needs >= 2 raters");
  AgreementReport rep;
  double pooled_sum = 0;
  for (std::size_t a = 0; a < m.raters.size(); ++a) {
    for (std::size_t b = a + 1; b < m.raters.size(); ++b) {
      PairKappaRow row{m.raters[a], m.raters[b], {}};
      std::vector<int> ra, rb;
      for (Trait t : kAllTraits) {
        row.kappa[Index(t)] = PairKappa(m, a, b, t, weighting);
        for (const auto& item : m.ratings) {
          if (item[a] && item[b]) {
            ra.push_back((*item[a])[Index(t)]);
            rb.push_back((*item[b])[Index(t)]);
          }
        }
      }
      pooled_sum += CohenKappa(ra, rb, weighting);
      rep.pairs.push_back(std::move(row));
    }
  }
  const double n_pairs = double(rep.pairs.size());
  rep.pairwise_pooled_traits = pooled_sum / n_pairs;
  double cell_sum = 0;
  for (Trait t : kAllTraits) {
    double s = 0;
    for (const auto& p : rep.pairs) s += p.kappa[Index(t)];
    rep.pairwise_by_trait[Index(t)] = s / n_pairs;
    cell_sum += s;
    rep.fleiss_by_trait[Index(t)] = FleissKappa(m, t);
    rep.fleiss_mean += rep.fleiss_by_trait[Index(t)] / double(kNumTraits);
  }
  rep.pairwise_mean = cell_sum / (n_pairs * double(kNumTraits));
  return rep;
}

}  // namespace persona::agreement
