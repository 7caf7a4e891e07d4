#pragma once

#include <array>
#include <span>
#include <string>
#include <unordered_map>

#include "persona/classifier.h"

namespace persona {

struct MajorityModel {
  int predicted_class = 0;
  std::array<std::size_t, 2> class_counts{};

  // Share of the dominant class in the training labels.
  double TrainingAccuracy() const;
};

// Predicts the more frequent label; ties go to 0. Throws EmptyDatasetError.
MajorityModel TrainMajority(std::span<const int> labels);

std::string SaveMajority(const MajorityModel& model);
MajorityModel LoadMajority(std::string_view text);

class MajorityClassifier : public Classifier {
 public:
  void Fit(std::span<const Example> train) override;
  int Predict(std::string_view) const override { return model_.predicted_class; }
  const MajorityModel& model() const { return model_; }

 private:
  MajorityModel model_;
};

// Returns the label seen with an identical training text (majority over
// duplicates), else the training majority. Used by the harness self-check.
class MemorizingClassifier : public Classifier {
 public:
  void Fit(std::span<const Example> train) override;
  int Predict(std::string_view text) const override;

 private:
  std::unordered_map<std::string, int> seen_;
  int fallback_ = 0;
};

}  // namespace persona
