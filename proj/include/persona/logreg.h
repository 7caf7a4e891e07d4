#pragma once

#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "persona/classifier.h"
#include "persona/text.h"

namespace persona {

struct LogRegConfig {
  std::size_t max_n = 2;  // n-grams of order 1..max_n
  std::size_t min_freq = 2;
  double l2 = 1e-4;
  // Scale each document's count vector to unit Euclidean length.
  bool l2_normalize = true;
  SgdConfig sgd{.learning_rate = 0.5};
};

// Sparse feature vector: (feature index, value), indices ascending and unique.
using SparseVector = std::vector<std::pair<std::size_t, double>>;

// "w1", "w1 w2", ... for every order 1..max_n.
std::vector<std::string> NgramKeys(std::span<const std::string> tokens,
                                   std::size_t max_n);

struct NgramLogRegModel {
  Vocabulary vocabulary;  // n-gram -> feature index, 0 = unknown n-gram
  std::vector<double> weights;
  double bias = 0;
  std::size_t max_n = 2;
  double l2 = 0;
  bool l2_normalize = true;

  SparseVector Featurize(std::string_view text) const;
  double Probability(std::string_view text) const;
  // Class 1 iff probability >= 0.5.
  int Predict(std::string_view text) const;
};

// Minimizes mean binary cross-entropy + (l2 / 2) * |w|^2 by mini-batch
// gradient descent. Throws SingleClassError / EmptyDatasetError.
NgramLogRegModel TrainLogReg(std::span<const Example> train,
                             const LogRegConfig& config = {});

std::string SaveLogReg(const NgramLogRegModel& model);
NgramLogRegModel LoadLogReg(std::string_view text);

class LogRegClassifier : public Classifier {
 public:
  explicit LogRegClassifier(LogRegConfig config = {}) : config_(config) {}
  void Fit(std::span<const Example> train) override;
  int Predict(std::string_view text) const override { return model_.Predict(text); }
  const NgramLogRegModel& model() const { return model_; }

 private:
  LogRegConfig config_;
  NgramLogRegModel model_;
};

}  // namespace persona
