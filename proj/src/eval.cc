#include "persona/eval.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <tuple>

#include "persona/csv.h"
#include "persona/error.h"
#include "persona/majority.h"
#include "persona/random.h"

namespace persona {

namespace {

void CheckK(std::size_t n, std::size_t k) {
  if (k < 2 || k > n) {
    throw BadKError("k must satisfy 2 <= k <= n (k=" + std::to_string(k) +
                    ", n=" + std::to_string(n) + ")");
  }
}

FoldPlan Deal(std::span<const std::size_t> order, std::size_t k, std::uint64_t seed) {
  FoldPlan plan;
  plan.n_items = order.size();
  plan.k = k;
  plan.seed = seed;
  plan.folds.resize(k);
  for (std::size_t t = 0; t < order.size(); ++t) plan.folds[t % k].push_back(order[t]);
  return plan;
}

}  // namespace

FoldPlan KFoldSplit(std::size_t n, std::size_t k, std::uint64_t seed) {
  CheckK(n, k);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  SplitMix64 rng(seed);
  Shuffle(std::span(order), rng);
  return Deal(order, k, seed);
}

FoldPlan StratifiedKFoldSplit(std::span<const int> labels, std::size_t k,
                              std::uint64_t seed) {
  CheckK(labels.size(), k);
  std::vector<std::size_t> order(labels.size());
  std::iota(order.begin(), order.end(), 0);
  SplitMix64 rng(seed);
  Shuffle(std::span(order), rng);
  std::stable_partition(order.begin(), order.end(),
                        [&](std::size_t i) { return labels[i] == 0; });
  return Deal(order, k, seed);
}

void ValidatePlan(const FoldPlan& plan) {
  if (plan.folds.size() != plan.k) throw DataError("fold plan: fold count != k");
  std::vector<char> seen(plan.n_items, 0);
  std::size_t total = 0;
  for (const auto& fold : plan.folds) {
    for (std::size_t i : fold) {
      if (i >= plan.n_items || seen[i]) {
        throw DataError("fold plan: index " + std::to_string(i) +
                        " out of range or repeated");
      }
      seen[i] = 1;
      ++total;
    }
  }
  if (total != plan.n_items) throw DataError("fold plan does not cover every item");
}

std::string_view ModelName(ModelKind kind) {
  switch (kind) {
    case ModelKind::kMajority:
      return "majority";
    case ModelKind::kLogReg:
      return "logreg";
    case ModelKind::kAttentive:
      return "attentive";
    case ModelKind::kMemorize:
      return "memorize";
  }
  return "?";
}

std::optional<ModelKind> ParseModelKind(std::string_view name) {
  for (ModelKind k : {ModelKind::kMajority, ModelKind::kLogReg, ModelKind::kAttentive,
                      ModelKind::kMemorize}) {
    if (name == ModelName(k)) return k;
  }
  return std::nullopt;
}

std::unique_ptr<Classifier> MakeClassifier(const ModelSpec& spec) {
  switch (spec.kind) {
    case ModelKind::kMajority:
      return std::make_unique<MajorityClassifier>();
    case ModelKind::kLogReg:
      return std::make_unique<LogRegClassifier>(spec.logreg);
    case ModelKind::kAttentive:
      return std::make_unique<AttentiveClassifier>(spec.attentive);
    case ModelKind::kMemorize:
      return std::make_unique<MemorizingClassifier>();
  }
  throw ConfigError("unknown model kind");
}

CvResult CrossValidate(std::span<const Example> items, const ModelSpec& spec,
                       const FoldPlan& plan, const CvOptions& options) {
  if (plan.n_items != items.size()) {
    throw ConfigError("fold plan covers " + std::to_string(plan.n_items) +
                      " items, dataset has " + std::to_string(items.size()));
  }
  ValidatePlan(plan);

  CvResult result;
  std::vector<char> in_test(items.size());
  for (std::size_t f = 0; f < plan.folds.size(); ++f) {
    std::fill(in_test.begin(), in_test.end(), 0);
    for (std::size_t i : plan.folds[f]) in_test[i] = 1;
    std::vector<Example> train;
    train.reserve(items.size());
    for (std::size_t i = 0; i < items.size(); ++i) {
      if (!in_test[i]) train.push_back(items[i]);
    }
    std::sort(train.begin(), train.end(), [](const Example& a, const Example& b) {
      return std::tie(a.text, a.label) < std::tie(b.text, b.label);
    });

    std::unique_ptr<Classifier> model = MakeClassifier(spec);
    try {
      model->Fit(train);
    } catch (const SingleClassError& e) {
      throw SingleClassError("fold " + std::to_string(f) + ": " + e.what());
    } catch (const EmptyDatasetError& e) {
      throw EmptyDatasetError("fold " + std::to_string(f) + ": " + e.what());
    }

    std::size_t correct = 0, total = 0;
    if (options.evaluate_on_train) {
      for (const Example& e : train) correct += model->Predict(e.text) == e.label;
      total = train.size();
    } else {
      for (std::size_t i : plan.folds[f]) correct += model->Predict(items[i].text) == items[i].label;
      total = plan.folds[f].size();
    }
    result.fold_accuracy.push_back(total ? double(correct) / double(total) : 0.0);
  }
  result.mean = std::accumulate(result.fold_accuracy.begin(), result.fold_accuracy.end(), 0.0) /
                double(result.fold_accuracy.size());
  return result;
}

std::vector<Example> ExamplesFor(std::span<const FormattedItem> items, Trait trait) {
  std::vector<Example> out;
  out.reserve(items.size());
  for (const FormattedItem& item : items) {
    if (!item.labels) throw LabelError("item " + item.subscene_id + " has no labels");
    out.push_back({item.text, (*item.labels)[Index(trait)]});
  }
  return out;
}

double DominantClassShare(std::span<const int> labels) {
  return TrainMajority(labels).TrainingAccuracy();
}

void ResultTable::Set(const std::string& model, std::optional<Format> format, Trait trait,
                      double fraction) {
  if (!(fraction >= 0.0 && fraction <= 1.0)) {
    throw DataError("accuracy " + std::to_string(fraction) + " outside [0, 1]");
  }
  auto it = std::find_if(rows.begin(), rows.end(), [&](const ResultRow& r) {
    return r.model == model && r.format == format;
  });
  if (it == rows.end()) {
    rows.push_back({model, format, {}});
    it = rows.end() - 1;
  }
  it->cells[Index(trait)] = fraction;
}

std::string FormatPercent(double fraction) {
  // Integer hundredths of a percent, half-up; the nudge absorbs binary
  // representation error such as 0.123450 -> 1234.4999999.
  const double scaled = fraction * 10000.0;
  const auto hundredths = static_cast<long long>(std::floor(scaled + 0.5 + 1e-9 * std::max(1.0, std::abs(scaled))));
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%lld.%02lld", hundredths / 100, hundredths % 100);
  return buf;
}

std::string EmitResults(const ResultTable& table, TableStyle style) {
  std::vector<const ResultRow*> rows;
  bool has_format = false;
  for (const ResultRow& r : table.rows) {
    rows.push_back(&r);
    has_format |= r.format.has_value();
  }
  if (has_format) {
    std::stable_sort(rows.begin(), rows.end(), [](const ResultRow* a, const ResultRow* b) {
      auto rank = [](const ResultRow* r) { return r->format ? int(*r->format) : -1; };
      return rank(a) < rank(b);
    });
  }

  csv::Row header = {"model"};
  if (has_format) header.push_back("format");
  for (Trait t : kAllTraits) header.emplace_back(TraitName(t));

  std::vector<csv::Row> body;
  for (const ResultRow* r : rows) {
    csv::Row row = {r->model};
    if (has_format) row.emplace_back(r->format ? FormatName(*r->format) : "");
    for (Trait t : kAllTraits) {
      const auto& cell = r->cells[Index(t)];
      row.push_back(cell ? FormatPercent(*cell) : (style == TableStyle::kCsv ? "" : "-"));
    }
    body.push_back(std::move(row));
  }

  std::string out;
  if (style == TableStyle::kCsv) {
    out += csv::FormatRow(header);
    for (const auto& row : body) out += csv::FormatRow(row);
    return out;
  }
  auto md_row = [&](const csv::Row& row) {
    out += "|";
    for (const auto& c : row) out += " " + c + " |";
    out += "\n";
  };
  md_row(header);
  out += "|";
  for (std::size_t i = 0; i < header.size(); ++i) out += i == 0 ? " --- |" : " ---: |";
  out += "\n";
  for (const auto& row : body) md_row(row);
  return out;
}

}  // namespace persona
