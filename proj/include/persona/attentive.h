#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "persona/classifier.h"
#include "persona/text.h"

namespace persona {

// Attention-pooled bag of embeddings:
//   score_i = query . e_i
//   a = softmax(score)
//   pooled = sum_i a_i e_i
//   p = sigmoid(output . pooled + bias)
struct AttentivePoolModel {
  Vocabulary vocabulary;
  std::size_t dim = 0;
  std::vector<double> embeddings;  // vocabulary.size() x dim, row-major
  std::vector<double> query;       // dim
  std::vector<double> output;      // dim
  double bias = 0;

  std::span<double> Row(std::size_t token) {
    return {embeddings.data() + token * dim, dim};
  }
  std::span<const double> Row(std::size_t token) const {
    return {embeddings.data() + token * dim, dim};
  }
  std::size_t vocab_size() const { return vocabulary.size(); }
};

struct AttentiveConfig {
  std::size_t dim = 32;
  std::size_t min_freq = 2;
  double init_range = 0.1;  // parameters drawn uniform(-init_range, init_range)
  SgdConfig sgd;
  // Optional word-vector file ("token v1 .. vd" per line, optional
  // "count dim" header) used to initialize matching embedding rows.
  std::filesystem::path pretrained;
};

// Parameters drawn from a splitmix64 stream seeded by config.sgd.seed, in the
// order embeddings (row-major), query, output; bias starts at 0.
AttentivePoolModel InitAttentive(Vocabulary vocabulary, const AttentiveConfig& config);

// Overwrites rows of tokens present in the vectors file. Returns the number of
// rows set. Throws SchemaError when a vector's width differs from model.dim.
std::size_t LoadPretrainedEmbeddings(AttentivePoolModel& model, std::string_view vectors);

struct ForwardResult {
  double logit = 0;
  double probability = 0;
  std::vector<double> attention;
  std::vector<double> pooled;
};

// Throws EmptySequenceError and IndexOutOfVocabError.
ForwardResult AttentiveForward(const AttentivePoolModel& model,
                               std::span<const std::size_t> tokens);

struct EncodedExample {
  std::vector<std::size_t> tokens;
  int label = 0;
};

// Gradient of the mean loss; embedding rows are stored sparsely.
struct AttentiveGradients {
  std::unordered_map<std::size_t, std::vector<double>> embeddings;
  std::vector<double> query;
  std::vector<double> output;
  double bias = 0;
};

// Mean binary cross-entropy over the batch.
double AttentiveLoss(const AttentivePoolModel& model,
                     std::span<const EncodedExample> batch);

// Returns the mean loss and fills `grads` with its analytic gradient.
double AttentiveLossAndGradients(const AttentivePoolModel& model,
                                 std::span<const EncodedExample> batch,
                                 AttentiveGradients& grads);

void ApplyGradients(AttentivePoolModel& model, const AttentiveGradients& grads,
                    double learning_rate);

struct AttentiveTrainStats {
  std::size_t epochs = 0;
  std::vector<double> loss_history;  // full training loss after each epoch
};

// Vocabulary from the training texts (min_freq), seeded initialization,
// shuffled mini-batches, early stop on loss plateau. Throws SingleClassError
// and EmptyDatasetError.
AttentivePoolModel TrainAttentive(std::span<const Example> train,
                                  const AttentiveConfig& config = {},
                                  AttentiveTrainStats* stats = nullptr);

EncodedExample Encode(const AttentivePoolModel& model, std::string_view text,
                      int label = 0);
// Class 1 iff probability >= 0.5. Text without tokens maps to a single
// unknown token.
int PredictAttentive(const AttentivePoolModel& model, std::string_view text);

std::string SaveAttentive(const AttentivePoolModel& model);
AttentivePoolModel LoadAttentive(std::string_view text);

class AttentiveClassifier : public Classifier {
 public:
  explicit AttentiveClassifier(AttentiveConfig config = {}) : config_(std::move(config)) {}
  void Fit(std::span<const Example> train) override;
  int Predict(std::string_view text) const override {
    return PredictAttentive(model_, text);
  }
  const AttentivePoolModel& model() const { return model_; }

 private:
  AttentiveConfig config_;
  AttentivePoolModel model_;
};

}  // namespace persona
