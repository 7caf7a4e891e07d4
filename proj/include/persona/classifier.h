#pragma once

#include <span>
#include <string>
#include <string_view>
#include <cstdint>
#include <cstddef>

namespace persona {

// One binary classification instance: text plus a {0,1} label.
struct Example {
  std::string text;
  int label = 0;

  bool operator==(const Example&) const = default;
};

class Classifier {
 public:
  virtual ~Classifier() = default;

  virtual void Fit(std::span<const Example> train) = 0;
  virtual int Predict(std::string_view text) const = 0;
};

// Shared mini-batch gradient descent settings.
struct SgdConfig {
  std::size_t batch_size = 16;
  double learning_rate = 0.05;
  std::size_t max_epochs = 200;
  // Stop once the full training loss improved by less than plateau_delta over
  // the last plateau_window epochs.
  double plateau_delta = 1e-5;
  std::size_t plateau_window = 10;
  std::uint64_t seed = 42;
};

// Throws EmptyDatasetError for an empty set and SingleClassError when only
// one label value occurs.
void RequireBothClasses(std::span<const Example> train);

}  // namespace persona
