#pragma once

#include <chrono>
#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "persona/trait.h"

namespace persona {

using Timestamp = std::chrono::sys_seconds;

// One annotator's ternary judgments for one sub-scene.
struct AnnotationRecord {
  std::string subscene_id;
  std::string annotator_id;
  PerTrait<int> scores{};  // each in {-1, 0, +1}
  Timestamp timestamp{};

  bool operator==(const AnnotationRecord&) const = default;
};

// "2026-10-16T08:30:00Z"
std::string FormatTimestamp(Timestamp ts);
Timestamp ParseTimestamp(std::string_view iso);
Timestamp Now();

// Store line format:
//   {"subscene_id":..,"annotator_id":..,"AGR":1,..,"NEU":0,"ts":"..Z"}
std::string ToJsonLine(const AnnotationRecord& record);
AnnotationRecord ParseJsonLine(std::string_view line);

// Throws ScoreRangeError if any score is outside {-1, 0, +1}.
void ValidateScores(const PerTrait<int>& scores);

// In-memory annotation store keyed by (subscene_id, annotator_id). Not
// thread-safe; callers serialize writes.
class AnnotationStore {
 public:
  // Accepts records for any sub-scene id.
  AnnotationStore() = default;
  // Accepts records only for the given corpus.
  explicit AnnotationStore(std::set<std::string> known_subscenes);

  struct UpsertResult {
    bool replaced = false;
    std::size_t subscene_count = 0;  // annotations for that sub-scene after the write
  };

  // Inserts or replaces. Throws UnknownSubSceneError and ScoreRangeError;
  // nothing is modified on error. Each successful write is forwarded to the
  // attached log sink, if any.
  UpsertResult Record(const AnnotationRecord& record);

  // Sink receiving every accepted record, e.g. an append-only file.
  void SetLogSink(std::function<void(const AnnotationRecord&)> sink) {
    sink_ = std::move(sink);
  }

  // Replays a line-delimited log; later lines replace earlier ones for the
  // same (sub-scene, annotator). Blank lines are skipped. Returns the number
  // of lines applied.
  std::size_t Replay(std::string_view jsonl);

  std::size_t size() const { return records_.size(); }
  bool IsKnown(const std::string& subscene_id) const;
  bool Has(const std::string& subscene_id, const std::string& annotator_id) const;
  std::size_t CountFor(const std::string& subscene_id) const;
  const std::optional<std::set<std::string>>& known_subscenes() const {
    return known_;
  }

  // Ordered by (subscene_id, annotator_id).
  std::vector<AnnotationRecord> Records() const;
  std::vector<std::string> Annotators() const;

 private:
  UpsertResult Apply(const AnnotationRecord& record);

  std::optional<std::set<std::string>> known_;
  std::map<std::pair<std::string, std::string>, AnnotationRecord> records_;
  std::map<std::string, std::size_t> per_subscene_;
  std::function<void(const AnnotationRecord&)> sink_;
};

struct TraitSum {
  std::string subscene_id;
  Trait trait = Trait::kAGR;
  int sum = 0;
  std::size_t n_annotators = 0;

  bool operator==(const TraitSum&) const = default;
};

// One entry per (sub-scene, trait) with at least one annotation, ordered by
// sub-scene id then canonical trait order.
std::vector<TraitSum> TraitSums(const AnnotationStore& store);

enum class TiePolicy {
  kStrictGreater,   // label 1 iff sum > median
  kGreaterOrEqual,  // label 1 iff sum >= median
};

struct MedianSplitOptions {
  TiePolicy tie = TiePolicy::kStrictGreater;
  std::size_t required_annotators = 3;
  // Keep items with fewer than required_annotators annotations.
  bool include_incomplete = false;
};

struct MedianSplitResult {
  Trait trait = Trait::kAGR;
  double median = 0;  // always an integer or half-integer
  std::vector<std::pair<std::string, int>> labels;  // input order
  std::vector<std::string> warnings;
};

// Median of the given sums (mean of the two middle values for even counts).
double Median(std::vector<int> values);

// Binarizes the sums of one trait at their median. Items whose annotator
// count differs from required_annotators trigger a warning; those with fewer
// are excluded unless include_incomplete is set. Throws InsufficientDataError
// when fewer than two items remain.
MedianSplitResult MedianSplit(std::span<const TraitSum> sums, Trait trait,
                              const MedianSplitOptions& options = {});

struct BinaryLabelSet {
  std::string subscene_id;
  PerTrait<int> labels{};
  PerTrait<double> medians{};
};

struct AggregateResult {
  std::vector<BinaryLabelSet> labels;  // ordered by sub-scene id
  std::vector<std::string> warnings;
};

// Sums and median-splits every trait over the whole store.
AggregateResult AggregateLabels(const AnnotationStore& store,
                                const MedianSplitOptions& options = {});

// Row of the labels export `subscene_id,main_speaker,AGR,CON,EXT,OPN,NEU`.
struct LabelRow {
  std::string subscene_id;
  std::string main_speaker;
  PerTrait<int> labels{};

  bool operator==(const LabelRow&) const = default;
};

std::string WriteLabelsCsv(std::span<const LabelRow> rows);
// Throws SchemaError for a missing column, LabelError for a label other than
// 0/1 (y/n also accepted).
std::vector<LabelRow> ReadLabelsCsv(std::string_view text);

}  // namespace persona
