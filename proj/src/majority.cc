#include "persona/majority.h"

#include <map>
#include <sstream>
#include <vector>

#include "persona/error.h"

namespace persona {

void RequireBothClasses(std::span<const Example> train) {
  if (train.empty()) throw EmptyDatasetError("training set is empty");
  bool seen[2] = {false, false};
  for (const Example& e : train) {
    if (e.label != 0 && e.label != 1) {
      throw LabelError("label " + std::to_string(e.label) + " is not 0 or 1");
    }
    seen[e.label] = true;
  }
  if (!seen[0] || !seen[1]) {
    throw SingleClassError("training set contains only class " +
                           std::to_string(seen[1] ? 1 : 0));
  }
}

double MajorityModel::TrainingAccuracy() const {
  const std::size_t total = class_counts[0] + class_counts[1];
  if (total == 0) return 0;
  return static_cast<double>(class_counts[predicted_class]) / static_cast<double>(total);
}

MajorityModel TrainMajority(std::span<const int> labels) {
  if (labels.empty()) throw EmptyDatasetError("majority baseline needs labels");
  MajorityModel m;
  for (int y : labels) {
    if (y != 0 && y != 1) throw LabelError("label " + std::to_string(y) + " is not 0 or 1");
    ++m.class_counts[y];
  }
  m.predicted_class = m.class_counts[1] > m.class_counts[0] ? 1 : 0;
  return m;
}

std::string SaveMajority(const MajorityModel& model) {
  std::ostringstream os;
  os << "persona-model majority 1\n"
     << "predicted_class " << model.predicted_class << "\n"
     << "class_counts " << model.class_counts[0] << " " << model.class_counts[1] << "\n";
  return os.str();
}

MajorityModel LoadMajority(std::string_view text) {
  std::istringstream is{std::string(text)};
  std::string magic, kind, key;
  int version = 0;
  MajorityModel m;
  if (!(is >> magic >> kind >> version) || magic != "persona-model" ||
      kind != "majority" || version != 1) {
    throw SchemaError("majority model: bad header");
  }
  if (!(is >> key >> m.predicted_class) || key != "predicted_class" ||
      !(is >> key >> m.class_counts[0] >> m.class_counts[1]) || key != "class_counts" ||
      (m.predicted_class != 0 && m.predicted_class != 1)) {
    throw SchemaError("majority model: malformed body");
  }
  return m;
}

void MajorityClassifier::Fit(std::span<const Example> train) {
  std::vector<int> labels;
  labels.reserve(train.size());
  for (const Example& e : train) labels.push_back(e.label);
  model_ = TrainMajority(labels);
}

void MemorizingClassifier::Fit(std::span<const Example> train) {
  std::map<std::string, std::array<std::size_t, 2>> votes;
  std::vector<int> labels;
  for (const Example& e : train) {
    ++votes[e.text][e.label];
    labels.push_back(e.label);
  }
  fallback_ = TrainMajority(labels).predicted_class;
  seen_.clear();
  for (const auto& [text, v] : votes) seen_[text] = v[1] > v[0] ? 1 : 0;
}

int MemorizingClassifier::Predict(std::string_view text) const {
  auto it = seen_.find(std::string(text));
  return it == seen_.end() ? fallback_ : it->second;
}

}  // namespace persona
