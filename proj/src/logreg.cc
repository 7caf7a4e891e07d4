#include "persona/logreg.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>
#include <sstream>

#include "persona/error.h"
#include "persona/random.h"

namespace persona {

namespace {

double Sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// log(1 + exp(z)) - y * z
double LogisticLoss(double z, int y) {
  const double softplus = z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
  return softplus - y * z;
}

std::string FormatDouble(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

std::vector<std::string> NgramKeys(std::span<const std::string> tokens,
                                   std::size_t max_n) {
  std::vector<std::string> keys;
  for (std::size_t n = 1; n <= max_n; ++n) {
    for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
      std::string key = tokens[i];
      for (std::size_t k = 1; k < n; ++k) {
        key.push_back(' ');
        key += tokens[i + k];
      }
      keys.push_back(std::move(key));
    }
  }
  return keys;
}

SparseVector NgramLogRegModel::Featurize(std::string_view text) const {
  const std::vector<std::string> keys = NgramKeys(Tokenize(text), max_n);
  std::map<std::size_t, double> counts;
  for (const auto& k : keys) counts[vocabulary.Lookup(k)] += 1.0;
  SparseVector x(counts.begin(), counts.end());
  if (l2_normalize && !x.empty()) {
    double norm = 0;
    for (const auto& [i, v] : x) norm += v * v;
    norm = std::sqrt(norm);
    for (auto& [i, v] : x) v /= norm;
  }
  return x;
}

double NgramLogRegModel::Probability(std::string_view text) const {
  double z = bias;
  for (const auto& [i, v] : Featurize(text)) z += weights[i] * v;
  return Sigmoid(z);
}

int NgramLogRegModel::Predict(std::string_view text) const {
  return Probability(text) >= 0.5 ? 1 : 0;
}

NgramLogRegModel TrainLogReg(std::span<const Example> train,
                             const LogRegConfig& config) {
  RequireBothClasses(train);
  if (config.max_n < 1) throw ConfigError("logreg: max_n must be >= 1");
  if (config.sgd.batch_size < 1) throw ConfigError("logreg: batch_size must be >= 1");

  NgramLogRegModel model;
  model.max_n = config.max_n;
  model.l2 = config.l2;
  model.l2_normalize = config.l2_normalize;

  std::vector<std::vector<std::string>> docs;
  docs.reserve(train.size());
  for (const Example& e : train) docs.push_back(NgramKeys(Tokenize(e.text), config.max_n));
  model.vocabulary = Vocabulary::Build(docs, config.min_freq);
  model.weights.assign(model.vocabulary.size(), 0.0);

  std::vector<SparseVector> xs;
  xs.reserve(train.size());
  for (const Example& e : train) xs.push_back(model.Featurize(e.text));

  // Weights are kept as scale * v so the L2 shrinkage is O(1) per step.
  std::vector<double>& v = model.weights;
  double scale = 1.0;
  auto renormalize = [&] {
    for (double& w : v) w *= scale;
    scale = 1.0;
  };
  auto full_loss = [&] {
    double loss = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      double z = model.bias;
      for (const auto& [j, x] : xs[i]) z += scale * v[j] * x;
      loss += LogisticLoss(z, train[i].label);
    }
    double sq = 0;
    for (double w : v) sq += w * w;
    return loss / double(xs.size()) + 0.5 * config.l2 * scale * scale * sq;
  };

  const SgdConfig& sgd = config.sgd;
  SplitMix64 rng(sgd.seed);
  std::vector<std::size_t> order(train.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> history;
  std::map<std::size_t, double> grad;

  for (std::size_t epoch = 0; epoch < sgd.max_epochs; ++epoch) {
    Shuffle(std::span(order), rng);
    for (std::size_t b = 0; b < order.size(); b += sgd.batch_size) {
      const std::size_t e = std::min(order.size(), b + sgd.batch_size);
      const double inv = 1.0 / double(e - b);
      grad.clear();
      double grad_bias = 0;
      for (std::size_t k = b; k < e; ++k) {
        const std::size_t i = order[k];
        double z = model.bias;
        for (const auto& [j, x] : xs[i]) z += scale * v[j] * x;
        const double r = (Sigmoid(z) - train[i].label) * inv;
        grad_bias += r;
        for (const auto& [j, x] : xs[i]) grad[j] += r * x;
      }
      // w <- (1 - lr * l2) w - lr * g
      scale *= 1.0 - sgd.learning_rate * config.l2;
      for (const auto& [j, g] : grad) v[j] -= sgd.learning_rate * g / scale;
      model.bias -= sgd.learning_rate * grad_bias;
      if (scale < 1e-6) renormalize();
    }
    history.push_back(full_loss());
    if (history.size() > sgd.plateau_window &&
        std::abs(history[history.size() - 1 - sgd.plateau_window] - history.back()) <
            sgd.plateau_delta) {
      break;
    }
  }
  renormalize();
  return model;
}

std::string SaveLogReg(const NgramLogRegModel& model) {
  std::ostringstream os;
  os << "persona-model logreg 1\n";
  os << "max_n " << model.max_n << "\n";
  os << "l2 " << FormatDouble(model.l2) << "\n";
  os << "l2_normalize " << (model.l2_normalize ? 1 : 0) << "\n";
  os << "bias " << FormatDouble(model.bias) << "\n";
  os << "features " << model.weights.size() << "\n";
  for (std::size_t i = 0; i < model.weights.size(); ++i) {
    os << FormatDouble(model.weights[i]) << "\t" << model.vocabulary.tokens()[i] << "\n";
  }
  return os.str();
}

NgramLogRegModel LoadLogReg(std::string_view text) {
  std::istringstream is{std::string(text)};
  auto fail = [](const std::string& what) {
    return SchemaError("logreg model: " + what);
  };
  std::string magic, kind, key;
  int version = 0;
  if (!(is >> magic >> kind >> version) || magic != "persona-model" ||
      kind != "logreg" || version != 1) {
    throw fail("bad header");
  }
  NgramLogRegModel m;
  int normalize = 0;
  std::size_t n = 0;
  if (!(is >> key >> m.max_n) || key != "max_n") throw fail("max_n");
  if (!(is >> key >> m.l2) || key != "l2") throw fail("l2");
  if (!(is >> key >> normalize) || key != "l2_normalize") throw fail("l2_normalize");
  if (!(is >> key >> m.bias) || key != "bias") throw fail("bias");
  if (!(is >> key >> n) || key != "features") throw fail("features");
  m.l2_normalize = normalize != 0;
  is.ignore(1);  // newline
  std::string line;
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::getline(is, line)) throw fail("truncated weights");
    const std::size_t tab = line.find('\t');
    if (tab == std::string::npos) throw fail("weight line without tab");
    const std::string token = line.substr(tab + 1);
    const double w = std::strtod(line.substr(0, tab).c_str(), nullptr);
    if (i == 0 ? token != Vocabulary::kUnkToken : m.vocabulary.Add(token) != i) {
      throw fail("duplicate or misplaced feature \"" + token + "\"");
    }
    m.weights.push_back(w);
  }
  return m;
}

void LogRegClassifier::Fit(std::span<const Example> train) {
  model_ = TrainLogReg(train, config_);
}

}  // namespace persona
