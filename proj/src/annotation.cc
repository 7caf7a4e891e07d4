#include "persona/annotation.h"

#include <algorithm>
#include <cctype>
#include <cstdio>

#include "json.hpp"
#include "persona/csv.h"
#include "persona/error.h"
#include "persona/transcript.h"

namespace persona {

using nlohmann::json;

std::string FormatTimestamp(Timestamp ts) {
  const auto days = std::chrono::floor<std::chrono::days>(ts);
  const std::chrono::year_month_day ymd{days};
  const std::chrono::hh_mm_ss hms{ts - days};
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%04d-%02u-%02uT%02d:%02d:%02dZ",
                static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
                static_cast<unsigned>(ymd.day()),
                static_cast<int>(hms.hours().count()),
                static_cast<int>(hms.minutes().count()),
                static_cast<int>(hms.seconds().count()));
  return buf;
}

Timestamp ParseTimestamp(std::string_view iso) {
  int y, mo, d, h, mi, s;
  char z = 0;
  const std::string str(iso);
  if (std::sscanf(str.c_str(), "%4d-%2d-%2dT%2d:%2d:%2d%c", &y, &mo, &d, &h, &mi,
                  &s, &z) != 7 ||
      z != 'Z') {
    throw SchemaError("timestamp: expected YYYY-MM-DDTHH:MM:SSZ, got \"" + str +
                      "\"");
  }
  const std::chrono::year_month_day ymd{std::chrono::year{y},
                                        std::chrono::month{static_cast<unsigned>(mo)},
                                        std::chrono::day{static_cast<unsigned>(d)}};
  if (!ymd.ok() || h > 23 || mi > 59 || s > 60) {
    throw SchemaError("timestamp: out of range \"" + str + "\"");
  }
  return std::chrono::sys_days{ymd} + std::chrono::hours{h} +
         std::chrono::minutes{mi} + std::chrono::seconds{s};
}

Timestamp Now() {
  return std::chrono::floor<std::chrono::seconds>(std::chrono::system_clock::now());
}

std::string ToJsonLine(const AnnotationRecord& record) {
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  j["subscene_id"] = record.subscene_id;
  j["annotator_id"] = record.annotator_id;
  for (Trait t : kAllTraits) j[std::string(TraitName(t))] = record.scores[Index(t)];
  j["ts"] = FormatTimestamp(record.timestamp);
  return j.dump();
}

AnnotationRecord ParseJsonLine(std::string_view line) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::parse_error& e) {
    throw SchemaError(std::string("annotation: malformed JSON: ") + e.what());
  }
  if (!j.is_object()) throw SchemaError("annotation: expected an object");
  AnnotationRecord r;
  auto get_string = [&](const char* key) {
    auto it = j.find(key);
    if (it == j.end() || !it->is_string()) {
      throw SchemaError(std::string("annotation: missing string field \"") + key +
                        "\"");
    }
    return it->get<std::string>();
  };
  r.subscene_id = get_string("subscene_id");
  r.annotator_id = get_string("annotator_id");
  for (Trait t : kAllTraits) {
    const std::string key(TraitName(t));
    auto it = j.find(key);
    if (it == j.end() || !it->is_number_integer()) {
      throw SchemaError("annotation: missing integer field \"" + key + "\"");
    }
    r.scores[Index(t)] = it->get<int>();
  }
  r.timestamp = ParseTimestamp(get_string("ts"));
  ValidateScores(r.scores);
  return r;
}

void ValidateScores(const PerTrait<int>& scores) {
  for (Trait t : kAllTraits) {
    const int s = scores[Index(t)];
    if (s < -1 || s > 1) {
      throw ScoreRangeError("score for " + std::string(TraitName(t)) + " is " +
                            std::to_string(s) + ", expected -1, 0 or 1");
    }
  }
}

AnnotationStore::AnnotationStore(std::set<std::string> known_subscenes)
    : known_(std::move(known_subscenes)) {}

bool AnnotationStore::IsKnown(const std::string& subscene_id) const {
  return !known_ || known_->count(subscene_id) > 0;
}

AnnotationStore::UpsertResult AnnotationStore::Record(
    const AnnotationRecord& record) {
  UpsertResult result = Apply(record);
  if (sink_) sink_(record);
  return result;
}

AnnotationStore::UpsertResult AnnotationStore::Apply(
    const AnnotationRecord& record) {
  if (!IsKnown(record.subscene_id)) {
    throw UnknownSubSceneError("unknown sub-scene \"" + record.subscene_id + "\"");
  }
  if (record.annotator_id.empty()) throw SchemaError("empty annotator id");
  ValidateScores(record.scores);

  UpsertResult result;
  auto key = std::make_pair(record.subscene_id, record.annotator_id);
  auto [it, inserted] = records_.insert_or_assign(std::move(key), record);
  result.replaced = !inserted;
  std::size_t& count = per_subscene_[record.subscene_id];
  if (inserted) ++count;
  result.subscene_count = count;
  return result;
}

std::size_t AnnotationStore::Replay(std::string_view jsonl) {
  std::size_t applied = 0;
  std::size_t line_no = 0;
  while (!jsonl.empty()) {
    const std::size_t nl = jsonl.find('\n');
    std::string_view line = jsonl.substr(0, nl);
    jsonl.remove_prefix(nl == std::string_view::npos ? jsonl.size() : nl + 1);
    ++line_no;
    if (Trim(line).empty()) continue;
    AnnotationRecord r;
    try {
      r = ParseJsonLine(line);
    } catch (const DataError& e) {
      throw SchemaError("store line " + std::to_string(line_no) + ": " + e.what());
    }
    Apply(r);
    ++applied;
  }
  return applied;
}

bool AnnotationStore::Has(const std::string& subscene_id,
                          const std::string& annotator_id) const {
  return records_.count({subscene_id, annotator_id}) > 0;
}

std::size_t AnnotationStore::CountFor(const std::string& subscene_id) const {
  auto it = per_subscene_.find(subscene_id);
  return it == per_subscene_.end() ? 0 : it->second;
}

std::vector<AnnotationRecord> AnnotationStore::Records() const {
  std::vector<AnnotationRecord> out;
  out.reserve(records_.size());
  for (const auto& [key, r] : records_) out.push_back(r);
  return out;
}

std::vector<std::string> AnnotationStore::Annotators() const {
  std::set<std::string> ids;
  for (const auto& [key, r] : records_) ids.insert(key.second);
  return {ids.begin(), ids.end()};
}

std::vector<TraitSum> TraitSums(const AnnotationStore& store) {
  std::map<std::string, std::pair<PerTrait<int>, std::size_t>> acc;
  for (const AnnotationRecord& r : store.Records()) {
    auto& [sums, n] = acc[r.subscene_id];
    for (Trait t : kAllTraits) sums[Index(t)] += r.scores[Index(t)];
    ++n;
  }
  std::vector<TraitSum> out;
  out.reserve(acc.size() * kNumTraits);
  for (const auto& [id, entry] : acc) {
    for (Trait t : kAllTraits) {
      out.push_back({id, t, entry.first[Index(t)], entry.second});
    }
  }
  return out;
}

double Median(std::vector<int> values) {
  if (values.empty()) throw InsufficientDataError("median of an empty list");
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  if (n % 2 == 1) return values[n / 2];
  return (static_cast<double>(values[n / 2 - 1]) + values[n / 2]) / 2.0;
}

MedianSplitResult MedianSplit(std::span<const TraitSum> sums, Trait trait,
                              const MedianSplitOptions& options) {
  MedianSplitResult result;
  result.trait = trait;
  const std::string name(TraitName(trait));

  std::vector<const TraitSum*> kept;
  std::size_t excluded = 0;
  std::size_t off_count = 0;
  for (const TraitSum& s : sums) {
    if (s.trait != trait) continue;
    if (s.n_annotators != options.required_annotators) ++off_count;
    if (s.n_annotators < options.required_annotators && !options.include_incomplete) {
      ++excluded;
      continue;
    }
    kept.push_back(&s);
  }
  if (off_count > 0) {
    result.warnings.push_back(
        name + ": " + std::to_string(off_count) + " item(s) do not have exactly " +
        std::to_string(options.required_annotators) + " annotations" +
        (excluded ? " (" + std::to_string(excluded) + " excluded)" : ""));
  }
  if (kept.size() < 2) {
    throw InsufficientDataError(name + ": median split needs at least 2 items, got " +
                                std::to_string(kept.size()));
  }

  std::vector<int> values;
  values.reserve(kept.size());
  for (const TraitSum* s : kept) values.push_back(s->sum);
  result.median = Median(values);

  std::size_t positives = 0;
  for (const TraitSum* s : kept) {
    const bool pos = options.tie == TiePolicy::kStrictGreater ? s->sum > result.median
                                                            : s->sum >= result.median;
    result.labels.emplace_back(s->subscene_id, pos ? 1 : 0);
    positives += pos;
  }
  if (positives == 0 || positives == kept.size()) {
    result.warnings.push_back(name + ": degenerate split, every item labeled " +
                              std::to_string(positives ? 1 : 0));
  }
  return result;
}

AggregateResult AggregateLabels(const AnnotationStore& store,
                                const MedianSplitOptions& options) {
  const std::vector<TraitSum> sums = TraitSums(store);
  AggregateResult out;
  std::map<std::string, BinaryLabelSet> by_id;
  for (Trait t : kAllTraits) {
    MedianSplitResult split = MedianSplit(sums, t, options);
    for (auto& w : split.warnings) out.warnings.push_back(std::move(w));
    for (const auto& [id, label] : split.labels) {
      BinaryLabelSet& set = by_id[id];
      set.subscene_id = id;
      set.labels[Index(t)] = label;
      set.medians[Index(t)] = split.median;
    }
  }
  for (auto& [id, set] : by_id) out.labels.push_back(std::move(set));
  return out;
}

std::string WriteLabelsCsv(std::span<const LabelRow> rows) {
  std::string out = "subscene_id,main_speaker,AGR,CON,EXT,OPN,NEU\n";
  for (const LabelRow& r : rows) {
    csv::Row row = {r.subscene_id, r.main_speaker};
    for (Trait t : kAllTraits) row.push_back(std::to_string(r.labels[Index(t)]));
    out += csv::FormatRow(row);
  }
  return out;
}

std::vector<LabelRow> ReadLabelsCsv(std::string_view text) {
  if (text.substr(0, 3) == "\xEF\xBB\xBF") text.remove_prefix(3);
  std::vector<csv::Row> rows = csv::Parse(text);
  if (rows.empty()) throw SchemaError("labels: missing header row");
  const csv::Row& header = rows.front();
  int id_col = -1;
  int speaker_col = -1;
  PerTrait<int> cols;
  cols.fill(-1);
  for (std::size_t c = 0; c < header.size(); ++c) {
    const std::string name(Trim(header[c]));
    if (name == "subscene_id") {
      id_col = static_cast<int>(c);
    } else if (name == "main_speaker") {
      speaker_col = static_cast<int>(c);
    } else if (auto t = ParseTrait(name)) {
      cols[Index(*t)] = static_cast<int>(c);
    }
  }
  if (id_col < 0) throw SchemaError("labels: missing column \"subscene_id\"");
  for (Trait t : kAllTraits) {
    if (cols[Index(t)] < 0) {
      throw SchemaError("labels: missing column \"" + std::string(TraitName(t)) +
                        "\"");
    }
  }
  std::vector<LabelRow> out;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const csv::Row& row = rows[r];
    if (row.size() == 1 && Trim(row[0]).empty()) continue;
    if (row.size() != header.size()) {
      throw SchemaError("labels: row " + std::to_string(r) + " has " +
                        std::to_string(row.size()) + " fields");
    }
    LabelRow lr;
    lr.subscene_id = row[id_col];
    if (speaker_col >= 0) lr.main_speaker = row[speaker_col];
    for (Trait t : kAllTraits) {
      std::string tok(Trim(row[cols[Index(t)]]));
      for (char& ch : tok) ch = std::tolower(static_cast<unsigned char>(ch));
      if (tok == "1" || tok == "y" || tok == "true") {
        lr.labels[Index(t)] = 1;
      } else if (tok == "0" || tok == "n" || tok == "false") {
        lr.labels[Index(t)] = 0;
      } else {
        throw LabelError("labels: row " + std::to_string(r) + " column " +
                         std::string(TraitName(t)) + ": unrecognized label \"" +
                         row[cols[Index(t)]] + "\"");
      }
    }
    out.push_back(std::move(lr));
  }
  return out;
}

}  // namespace persona
