#include "persona/attentive.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <numeric>
#include <sstream>

#include "persona/error.h"
#include "persona/io.h"
#include "persona/random.h"

namespace persona {

namespace {

double Dot(std::span<const double> a, std::span<const double> b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double Sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double LogisticLoss(double z, int y) {
  const double softplus = z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
  return softplus - y * z;
}

void AppendDoubles(std::ostringstream& os, std::span<const double> v) {
  char buf[40];
  for (std::size_t i = 0; i < v.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g", v[i]);
    if (i) os << ' ';
    os << buf;
  }
}

std::vector<double> ParseDoubles(std::string_view s) {
  std::vector<double> out;
  std::string buf(s);
  const char* p = buf.c_str();
  char* end = nullptr;
  while (true) {
    while (*p == ' ' || *p == '\t') ++p;
    if (*p == '\0' || *p == '\r' || *p == '\n') break;
    const double v = std::strtod(p, &end);
    if (end == p) throw SchemaError("expected a number near \"" + std::string(p).substr(0, 16) + "\"");
    out.push_back(v);
    p = end;
  }
  return out;
}

}  // namespace

AttentivePoolModel InitAttentive(Vocabulary vocabulary, const AttentiveConfig& config) {
  if (config.dim == 0) throw ConfigError("attentive: dim must be >= 1");
  AttentivePoolModel m;
  m.vocabulary = std::move(vocabulary);
  m.dim = config.dim;
  SplitMix64 rng(config.sgd.seed);
  const double r = config.init_range;
  m.embeddings.resize(m.vocabulary.size() * m.dim);
  for (double& x : m.embeddings) x = rng.Uniform(-r, r);
  m.query.resize(m.dim);
  for (double& x : m.query) x = rng.Uniform(-r, r);
  m.output.resize(m.dim);
  for (double& x : m.output) x = rng.Uniform(-r, r);
  m.bias = 0;
  return m;
}

std::size_t LoadPretrainedEmbeddings(AttentivePoolModel& model, std::string_view vectors) {
  std::size_t set = 0;
  bool first = true;
  while (!vectors.empty()) {
    const std::size_t nl = vectors.find('\n');
    std::string_view line = vectors.substr(0, nl);
    vectors.remove_prefix(nl == std::string_view::npos ? vectors.size() : nl + 1);
    const std::size_t sp = line.find(' ');
    if (sp == std::string_view::npos) continue;
    const std::string token(line.substr(0, sp));
    std::vector<double> values = ParseDoubles(line.substr(sp + 1));
    if (first) {
      first = false;
      // "count dim" header line of the word2vec text format.
      if (values.size() == 1 &&
          token.find_first_not_of("0123456789") == std::string::npos) {
        continue;
      }
    }
    if (values.size() != model.dim) {
      throw SchemaError("pretrained vector for \"" + token + "\" has " +
                        std::to_string(values.size()) + " values, model dim is " +
                        std::to_string(model.dim));
    }
    const std::size_t id = model.vocabulary.Lookup(token);
    if (id == Vocabulary::kUnk) continue;
    std::copy(values.begin(), values.end(), model.Row(id).begin());
    ++set;
  }
  return set;
}

ForwardResult AttentiveForward(const AttentivePoolModel& model,
                               std::span<const std::size_t> tokens) {
  if (tokens.empty()) throw EmptySequenceError("attentive forward on empty sequence");
  const std::size_t n = tokens.size();
  ForwardResult r;
  r.attention.resize(n);
  double max_score = -INFINITY;
  for (std::size_t i = 0; i < n; ++i) {
    if (tokens[i] >= model.vocab_size()) {
      throw IndexOutOfVocabError("token index " + std::to_string(tokens[i]) +
                                 " >= vocabulary size " +
                                 std::to_string(model.vocab_size()));
    }
    r.attention[i] = Dot(model.query, model.Row(tokens[i]));
    max_score = std::max(max_score, r.attention[i]);
  }
  double total = 0;
  for (double& a : r.attention) {
    a = std::exp(a - max_score);
    total += a;
  }
  r.pooled.assign(model.dim, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    r.attention[i] /= total;
    const auto row = model.Row(tokens[i]);
    for (std::size_t k = 0; k < model.dim; ++k) r.pooled[k] += r.attention[i] * row[k];
  }
  r.logit = Dot(model.output, r.pooled) + model.bias;
  r.probability = Sigmoid(r.logit);
  return r;
}

double AttentiveLoss(const AttentivePoolModel& model,
                     std::span<const EncodedExample> batch) {
  if (batch.empty()) throw EmptyDatasetError("loss over an empty batch");
  double loss = 0;
  for (const EncodedExample& ex : batch) {
    loss += LogisticLoss(AttentiveForward(model, ex.tokens).logit, ex.label);
  }
  return loss / double(batch.size());
}

double AttentiveLossAndGradients(const AttentivePoolModel& model,
                                 std::span<const EncodedExample> batch,
                                 AttentiveGradients& grads) {
  if (batch.empty()) throw EmptyDatasetError("gradient over an empty batch");
  const std::size_t d = model.dim;
  grads.embeddings.clear();
  grads.query.assign(d, 0.0);
  grads.output.assign(d, 0.0);
  grads.bias = 0;

  const double inv = 1.0 / double(batch.size());
  double loss = 0;
  std::vector<double> g(d);
  std::vector<double> ds;
  for (const EncodedExample& ex : batch) {
    const ForwardResult f = AttentiveForward(model, ex.tokens);
    loss += LogisticLoss(f.logit, ex.label);
    const double dz = (f.probability - ex.label) * inv;

    grads.bias += dz;
    for (std::size_t k = 0; k < d; ++k) {
      grads.output[k] += dz * f.pooled[k];
      g[k] = dz * model.output[k];  // dL/dpooled
    }
    // Softmax backward: ds_i = a_i (g.e_i - g.pooled).
    const double g_pooled = Dot(g, f.pooled);
    const std::size_t n = ex.tokens.size();
    ds.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      ds[i] = f.attention[i] * (Dot(g, model.Row(ex.tokens[i])) - g_pooled);
    }
    for (std::size_t i = 0; i < n; ++i) {
      const auto row = model.Row(ex.tokens[i]);
      auto& ge = grads.embeddings[ex.tokens[i]];
      if (ge.empty()) ge.assign(d, 0.0);
      for (std::size_t k = 0; k < d; ++k) {
        grads.query[k] += ds[i] * row[k];
        ge[k] += f.attention[i] * g[k] + ds[i] * model.query[k];
      }
    }
  }
  return loss * inv;
}

void ApplyGradients(AttentivePoolModel& model, const AttentiveGradients& grads,
                    double learning_rate) {
  for (const auto& [token, ge] : grads.embeddings) {
    auto row = model.Row(token);
    for (std::size_t k = 0; k < model.dim; ++k) row[k] -= learning_rate * ge[k];
  }
  for (std::size_t k = 0; k < model.dim; ++k) {
    model.query[k] -= learning_rate * grads.query[k];
    model.output[k] -= learning_rate * grads.output[k];
  }
  model.bias -= learning_rate * grads.bias;
}

EncodedExample Encode(const AttentivePoolModel& model, std::string_view text, int label) {
  EncodedExample ex;
  ex.tokens = model.vocabulary.Encode(Tokenize(text));
  if (ex.tokens.empty()) ex.tokens.push_back(Vocabulary::kUnk);
  ex.label = label;
  return ex;
}

int PredictAttentive(const AttentivePoolModel& model, std::string_view text) {
  const EncodedExample ex = Encode(model, text);
  return AttentiveForward(model, ex.tokens).probability >= 0.5 ? 1 : 0;
}

AttentivePoolModel TrainAttentive(std::span<const Example> train,
                                  const AttentiveConfig& config,
                                  AttentiveTrainStats* stats) {
  RequireBothClasses(train);
  const SgdConfig& sgd = config.sgd;
  if (sgd.batch_size < 1) throw ConfigError("attentive: batch_size must be >= 1");

  std::vector<std::vector<std::string>> docs;
  docs.reserve(train.size());
  for (const Example& e : train) docs.push_back(Tokenize(e.text));
  AttentivePoolModel model = InitAttentive(Vocabulary::Build(docs, config.min_freq), config);
  if (!config.pretrained.empty()) {
    LoadPretrainedEmbeddings(model, io::ReadFile(config.pretrained));
  }

  std::vector<EncodedExample> data;
  data.reserve(train.size());
  for (const Example& e : train) data.push_back(Encode(model, e.text, e.label));

  // Batch order stream is separate from the initialization stream.
  SplitMix64 rng(sgd.seed ^ 0xA5A5A5A5A5A5A5A5ULL);
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<EncodedExample> batch;
  AttentiveGradients grads;
  std::vector<double> history;

  for (std::size_t epoch = 0; epoch < sgd.max_epochs; ++epoch) {
    Shuffle(std::span(order), rng);
    for (std::size_t b = 0; b < order.size(); b += sgd.batch_size) {
      batch.clear();
      for (std::size_t k = b; k < std::min(order.size(), b + sgd.batch_size); ++k) {
        batch.push_back(data[order[k]]);
      }
      AttentiveLossAndGradients(model, batch, grads);
      ApplyGradients(model, grads, sgd.learning_rate);
    }
    history.push_back(AttentiveLoss(model, data));
    if (history.size() > sgd.plateau_window &&
        std::abs(history[history.size() - 1 - sgd.plateau_window] - history.back()) <
            sgd.plateau_delta) {
      break;
    }
  }
  if (stats) {
    stats->epochs = history.size();
    stats->loss_history = std::move(history);
  }
  return model;
}

std::string SaveAttentive(const AttentivePoolModel& model) {
  std::ostringstream os;
  os << "persona-model attentive 1\n";
  os << "dim " << model.dim << "\n";
  os << "bias ";
  AppendDoubles(os, std::span<const double>(&model.bias, 1));
  os << "\nquery ";
  AppendDoubles(os, model.query);
  os << "\noutput ";
  AppendDoubles(os, model.output);
  os << "\nvocab " << model.vocab_size() << "\n";
  for (std::size_t i = 0; i < model.vocab_size(); ++i) {
    os << model.vocabulary.tokens()[i] << '\t';
    AppendDoubles(os, model.Row(i));
    os << '\n';
  }
  return os.str();
}

AttentivePoolModel LoadAttentive(std::string_view text) {
  auto fail = [](const std::string& what) {
    return SchemaError("attentive model: " + what);
  };
  std::vector<std::string_view> lines;
  while (!text.empty()) {
    const std::size_t nl = text.find('\n');
    lines.push_back(text.substr(0, nl));
    text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);
  }
  auto field = [&](std::size_t i, std::string_view key) {
    if (i >= lines.size()) throw fail("truncated before \"" + std::string(key) + "\"");
    std::string_view l = lines[i];
    if (l.substr(0, key.size() + 1) != std::string(key) + " ") {
      throw fail("expected \"" + std::string(key) + "\" on line " + std::to_string(i + 1));
    }
    return l.substr(key.size() + 1);
  };
  if (lines.empty() || lines[0] != "persona-model attentive 1") throw fail("bad header");

  AttentivePoolModel m;
  m.dim = static_cast<std::size_t>(std::stoul(std::string(field(1, "dim"))));
  const auto bias = ParseDoubles(field(2, "bias"));
  m.query = ParseDoubles(field(3, "query"));
  m.output = ParseDoubles(field(4, "output"));
  const std::size_t n = static_cast<std::size_t>(std::stoul(std::string(field(5, "vocab"))));
  if (bias.size() != 1 || m.query.size() != m.dim || m.output.size() != m.dim) {
    throw fail("parameter width mismatch");
  }
  m.bias = bias[0];
  if (lines.size() < 6 + n) throw fail("truncated embedding table");
  m.embeddings.reserve(n * m.dim);
  for (std::size_t i = 0; i < n; ++i) {
    std::string_view l = lines[6 + i];
    const std::size_t tab = l.find('\t');
    if (tab == std::string_view::npos) throw fail("embedding line without tab");
    const std::string token(l.substr(0, tab));
    if (i == 0 ? token != Vocabulary::kUnkToken : m.vocabulary.Add(token) != i) {
      throw fail("duplicate or misplaced token \"" + token + "\"");
    }
    const auto row = ParseDoubles(l.substr(tab + 1));
    if (row.size() != m.dim) throw fail("embedding row width mismatch");
    m.embeddings.insert(m.embeddings.end(), row.begin(), row.end());
  }
  return m;
}

void AttentiveClassifier::Fit(std::span<const Example> train) {
  model_ = TrainAttentive(train, config_);
}

}  // namespace persona
