// persona: corpus construction and evaluation command-line tool.
//
//   persona ingest    --in transcript.json [--kind transcript|essays]
//   persona extract   --in transcript.json --out subscenes.jsonl
//   persona agree     --store annotations.jsonl
//   persona aggregate --store annotations.jsonl --subscenes subscenes.jsonl --out labels.csv
//   persona format    --mode S|SC|F --in subscenes.jsonl --labels labels.csv --out items.jsonl
//   persona split     --n 711 --k 10 --seed 42
//   persona eval      --dataset friends|essays --format S --model majority --in items.jsonl
//   persona serve     --subscenes subscenes.jsonl --store annotations.jsonl --port 8080
//
// Exit codes: 0 success, 2 data error, 3 configuration error.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "persona/agreement.h"
#include "persona/annotation.h"
#include "persona/error.h"
#include "persona/eval.h"
#include "persona/formats.h"
#include "persona/io.h"
#include "persona/msf.h"
#include "persona/service.h"
#include "persona/transcript.h"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace persona;

namespace {

constexpr int kDataErrorExit = 2;
constexpr int kConfigErrorExit = 3;

void Emit(const std::string& out_path, const std::string& contents) {
  if (out_path.empty() || out_path == "-") {
    std::cout << contents;
  } else {
    io::WriteFile(out_path, contents);
  }
}

std::string Fixed(double v, int decimals = 4) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", decimals, v);
  return buf;
}

Format RequireFormat(const std::string& name) {
  auto f = ParseFormat(name);
  if (!f) throw ConfigError("unknown format \"" + name + "\" (expected S, SC or F)");
  return *f;
}

AnnotationStore LoadStore(const std::string& path) {
  AnnotationStore store;
  if (fs::exists(path)) store.Replay(io::ReadFile(path));
  return store;
}

// ---------------------------------------------------------------------------

struct IngestArgs {
  std::string in, out, kind = "transcript";
  bool drop_empty_speaker = false;
};

void RunIngest(const IngestArgs& a) {
  const std::string doc = io::ReadFile(a.in);
  if (a.kind == "essays") {
    const auto essays = ParseEssays(doc);
    std::cout << "documents " << essays.size() << "\n";
    for (Trait t : kAllTraits) {
      std::vector<int> labels;
      for (const auto& e : essays) labels.push_back(e.labels[Index(t)]);
      if (!labels.empty()) {
        std::cout << TraitName(t) << " majority " << FormatPercent(DominantClassShare(labels))
                  << "\n";
      }
    }
    return;
  }
  if (a.kind != "transcript") throw ConfigError("unknown --kind \"" + a.kind + "\"");
  TranscriptOptions opts;
  opts.drop_empty_speaker = a.drop_empty_speaker;
  const auto scenes = ParseTranscript(doc, opts);
  std::set<std::string> episodes, speakers;
  std::size_t utterances = 0;
  for (const auto& s : scenes) {
    episodes.insert(s.episode_id);
    utterances += s.utterances.size();
    for (const auto& u : s.utterances) speakers.insert(u.speaker);
  }
  std::cerr << "episodes " << episodes.size() << "\nscenes " << scenes.size()
            << "\nutterances " << utterances << "\nspeakers " << speakers.size() << "\n";
  if (!a.out.empty()) Emit(a.out, SerializeTranscript(scenes));
}

struct ExtractArgs {
  std::string in, out;
  msf::WindowConfig config;
  bool drop_empty_speaker = false;
};

void RunExtract(const ExtractArgs& a) {
  a.config.Validate();
  TranscriptOptions opts;
  opts.drop_empty_speaker = a.drop_empty_speaker;
  const auto scenes = ParseTranscript(io::ReadFile(a.in), opts);
  std::vector<msf::SubScene> all;
  std::size_t skipped = 0;
  for (const Scene& scene : scenes) {
    if (scene.utterances.empty()) {
      ++skipped;
      continue;
    }
    auto subs = msf::ExtractSubScenes(scene, a.config);
    all.insert(all.end(), std::make_move_iterator(subs.begin()),
               std::make_move_iterator(subs.end()));
  }
  std::cerr << "scenes " << scenes.size() << " (empty skipped " << skipped
            << "), sub-scenes " << all.size() << "\n";
  Emit(a.out, io::WriteSubScenes(all));
}

struct AgreeArgs {
  std::string store;
  std::string raters = "id";
  bool linear = false;
};

void RunAgree(const AgreeArgs& a) {
  if (!fs::exists(a.store)) throw ConfigError("store " + a.store + " does not exist");
  const AnnotationStore store = LoadStore(a.store);
  agreement::RaterColumns cols;
  if (a.raters == "id") {
    cols = agreement::RaterColumns::kAnnotatorId;
  } else if (a.raters == "slot") {
    cols = agreement::RaterColumns::kSlot;
  } else {
    throw ConfigError("--raters must be id or slot");
  }
  const auto matrix = agreement::BuildRatingMatrix(store, cols);
  const auto rep = agreement::Summarize(
      matrix, a.linear ? agreement::Weighting::kLinear : agreement::Weighting::kNone);

  std::cout << "items " << matrix.items.size() << ", raters " << matrix.raters.size() << "\n\n";
  std::cout << "pair";
  for (Trait t : kAllTraits) std::cout << "\t" << TraitName(t);
  std::cout << "\tmean\n";
  for (const auto& p : rep.pairs) {
    double s = 0;
    std::cout << p.rater_a << "~" << p.rater_b;
    for (Trait t : kAllTraits) {
      std::cout << "\t" << Fixed(p.kappa[Index(t)]);
      s += p.kappa[Index(t)];
    }
    std::cout << "\t" << Fixed(s / kNumTraits) << "\n";
  }
  std::cout << "pairwise";
  for (Trait t : kAllTraits) std::cout << "\t" << Fixed(rep.pairwise_by_trait[Index(t)]);
  std::cout << "\t" << Fixed(rep.pairwise_mean) << "\n";
  std::cout << "fleiss";
  for (Trait t : kAllTraits) std::cout << "\t" << Fixed(rep.fleiss_by_trait[Index(t)]);
  std::cout << "\t" << Fixed(rep.fleiss_mean) << "\n\n";
  std::cout << "average pairwise kappa (pair x trait cells): " << Fixed(rep.pairwise_mean) << "\n";
  std::cout << "average pairwise kappa (traits pooled per pair): "
            << Fixed(rep.pairwise_pooled_traits) << "\n";
  std::cout << "fleiss kappa (mean over traits): " << Fixed(rep.fleiss_mean) << "\n";
}

struct AggregateArgs {
  std::string store, subscenes, out, tie = "strict";
  std::size_t min_annotators = 3;
  bool include_incomplete = false;
};

void RunAggregate(const AggregateArgs& a) {
  if (!fs::exists(a.store)) throw ConfigError("store " + a.store + " does not exist");
  const AnnotationStore store = LoadStore(a.store);
  MedianSplitOptions opts;
  if (a.tie == "strict") {
    opts.tie = TiePolicy::kStrictGreater;
  } else if (a.tie == "inclusive") {
    opts.tie = TiePolicy::kGreaterOrEqual;
  } else {
    throw ConfigError("--tie must be strict or inclusive");
  }
  opts.required_annotators = a.min_annotators;
  opts.include_incomplete = a.include_incomplete;

  std::map<std::string, std::string> speaker_of;
  if (!a.subscenes.empty()) {
    for (const auto& s : io::ReadSubScenes(io::ReadFile(a.subscenes))) {
      speaker_of[s.Id()] = s.main_speaker;
    }
  }
  const AggregateResult agg = AggregateLabels(store, opts);
  for (const auto& w : agg.warnings) std::cerr << "warning: " << w << "\n";
  std::vector<LabelRow> rows;
  for (const auto& set : agg.labels) {
    rows.push_back({set.subscene_id, speaker_of[set.subscene_id], set.labels});
  }
  if (!agg.labels.empty()) {
    std::cerr << "medians";
    for (Trait t : kAllTraits) {
      std::cerr << " " << TraitName(t) << "=" << agg.labels.front().medians[Index(t)];
    }
    std::cerr << "\nlabeled " << rows.size() << "\n";
  }
  Emit(a.out, WriteLabelsCsv(rows));
}

struct FormatArgs {
  std::string mode, in, labels, out;
  bool keep_names = false;
};

void RunFormat(const FormatArgs& a) {
  const Format format = RequireFormat(a.mode);
  const auto subscenes = io::ReadSubScenes(io::ReadFile(a.in));
  std::map<std::string, PerTrait<int>> labels;
  if (!a.labels.empty()) {
    for (const auto& row : ReadLabelsCsv(io::ReadFile(a.labels))) {
      labels[row.subscene_id] = row.labels;
    }
  }
  AnonymizeOptions anon;
  anon.replace_in_text = !a.keep_names;
  std::vector<FormattedItem> items;
  std::size_t unlabeled = 0;
  for (const auto& s : subscenes) {
    FormattedItem item = ToFormat(Anonymize(s, anon), format);
    if (!a.labels.empty()) {
      auto it = labels.find(item.subscene_id);
      if (it == labels.end()) {
        ++unlabeled;
        continue;
      }
      item.labels = it->second;
    }
    items.push_back(std::move(item));
  }
  if (unlabeled) std::cerr << "skipped " << unlabeled << " sub-scene(s) without labels\n";
  std::cerr << "items " << items.size() << "\n";
  Emit(a.out, io::WriteItems(items));
}

struct SplitArgs {
  std::size_t n = 0, k = 10;
  std::uint64_t seed = kDefaultSeed;
  std::string out;
};

void RunSplit(const SplitArgs& a) {
  const FoldPlan plan = KFoldSplit(a.n, a.k, a.seed);
  json j = {{"n_items", plan.n_items}, {"k", plan.k}, {"seed", plan.seed}, {"folds", plan.folds}};
  Emit(a.out, j.dump() + "\n");
}

struct EvalArgs {
  std::string dataset = "friends", format = "S", model = "majority", in, out,
              style = "csv", pretrained;
  std::uint64_t seed = kDefaultSeed;
  std::size_t k = 10;
  bool stratify = false, smoke = false, dominant_share = false;
  std::optional<std::size_t> epochs, dim;
  std::optional<double> lr;
};

void RunEval(const EvalArgs& a) {
  auto kind = ParseModelKind(a.model);
  if (!kind) throw ConfigError("unknown --model \"" + a.model + "\"");
  if (a.dominant_share && *kind != ModelKind::kMajority) {
    throw ConfigError("--dominant-share applies to --model majority only");
  }
  TableStyle style;
  if (a.style == "csv") {
    style = TableStyle::kCsv;
  } else if (a.style == "markdown") {
    style = TableStyle::kMarkdown;
  } else {
    throw ConfigError("--style must be csv or markdown");
  }
  ModelSpec spec;
  spec.kind = *kind;
  for (SgdConfig* sgd : {&spec.logreg.sgd, &spec.attentive.sgd}) {
    sgd->seed = a.seed;
    if (a.epochs) sgd->max_epochs = *a.epochs;
    if (a.lr) sgd->learning_rate = *a.lr;
  }
  if (a.dim) spec.attentive.dim = *a.dim;
  spec.attentive.pretrained = a.pretrained;

  std::vector<std::string> texts;
  std::vector<PerTrait<int>> labels;
  std::optional<Format> row_format;
  if (a.dataset == "essays") {
    for (auto& e : ParseEssays(io::ReadFile(a.in))) {
      texts.push_back(std::move(e.text));
      labels.push_back(e.labels);
    }
  } else if (a.dataset == "friends") {
    row_format = RequireFormat(a.format);
    for (auto& item : io::ReadItems(io::ReadFile(a.in))) {
      if (item.format != *row_format) {
        throw ConfigError("item " + item.subscene_id + " has format " +
                          std::string(FormatName(item.format)) + ", --format is " +
                          std::string(FormatName(*row_format)));
      }
      if (!item.labels) throw LabelError("item " + item.subscene_id + " has no labels");
      texts.push_back(std::move(item.text));
      labels.push_back(*item.labels);
    }
  } else {
    throw ConfigError("--dataset must be friends or essays");
  }
  if (texts.empty()) throw DataError("dataset " + a.in + " is empty");

  ResultTable table;
  for (Trait t : kAllTraits) {
    std::vector<Example> examples;
    std::vector<int> y;
    for (std::size_t i = 0; i < texts.size(); ++i) {
      examples.push_back({texts[i], labels[i][Index(t)]});
      y.push_back(labels[i][Index(t)]);
    }
    if (a.dominant_share) {
      const double share = DominantClassShare(y);
      table.Set(std::string(ModelName(*kind)), row_format, t, share);
      std::cerr << TraitName(t) << " " << FormatPercent(share) << "\n";
      continue;
    }
    const FoldPlan plan = a.stratify ? StratifiedKFoldSplit(y, a.k, a.seed)
                                     : KFoldSplit(examples.size(), a.k, a.seed);
    CvOptions cv;
    cv.evaluate_on_train = a.smoke;
    const CvResult r = CrossValidate(examples, spec, plan, cv);
    table.Set(std::string(ModelName(*kind)), row_format, t, r.mean);
    std::cerr << TraitName(t) << " " << FormatPercent(r.mean) << "\n";
  }
  std::cerr << "items " << texts.size() << "\n";
  Emit(a.out, EmitResults(table, style));
}

struct ServeArgs {
  std::string subscenes, store, host = "127.0.0.1", static_dir;
  int port = 8080;
  std::vector<std::string> annotators;
};

void RunServe(const ServeArgs& a) {
  std::vector<Annotator> annotators;
  for (const auto& spec : a.annotators) {
    const auto colon = spec.find(':');
    annotators.push_back({spec.substr(0, colon),
                          colon == std::string::npos ? "" : spec.substr(colon + 1)});
  }
  if (annotators.empty()) throw ConfigError("register at least one --annotator");
  AnnotationStore replay = LoadStore(a.store);
  AnnotationService service(io::ReadSubScenes(io::ReadFile(a.subscenes)), annotators,
                            std::move(replay));
  service.SetLogSink(AppendToFile(a.store));
  AnnotationServer server(service, a.static_dir);
  std::cerr << "serving " << service.GetProgress().total << " sub-scenes on http://"
            << a.host << ":" << a.port << "\n";
  if (!server.Listen(a.host, a.port)) {
    throw ConfigError("cannot listen on " + a.host + ":" + std::to_string(a.port));
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dialogue personality corpus toolkit"};
  app.require_subcommand(1);

  IngestArgs ingest;
  auto* c_ingest = app.add_subcommand("ingest", "Validate a transcript or essays file");
  c_ingest->add_option("--in", ingest.in, "Input file")->required();
  c_ingest->add_option("--kind", ingest.kind, "transcript or essays");
  c_ingest->add_option("--out", ingest.out, "Write the canonical transcript here");
  c_ingest->add_flag("--drop-empty-speaker", ingest.drop_empty_speaker,
                     "Drop lines without a speaker instead of failing");

  ExtractArgs extract;
  auto* c_extract = app.add_subcommand("extract", "Extract main-speaker sub-scenes");
  c_extract->add_option("--in", extract.in, "Transcript JSON")->required();
  c_extract->add_option("--out", extract.out, "Sub-scene JSONL output");
  c_extract->add_option("--window", extract.config.window_size, "Window size");
  c_extract->add_option("--stride", extract.config.stride, "Window stride");
  c_extract->add_option("--min-peak", extract.config.min_peak_count, "Minimum peak count");
  c_extract->add_option("--pad", extract.config.pad, "Context utterances on each side");
  c_extract->add_flag("--drop-empty-speaker", extract.drop_empty_speaker);

  AgreeArgs agree;
  auto* c_agree = app.add_subcommand("agree", "Inter-annotator agreement");
  c_agree->add_option("--store", agree.store, "Annotation store JSONL")->required();
  c_agree->add_option("--raters", agree.raters, "Rater columns: id or slot");
  c_agree->add_flag("--linear", agree.linear, "Linearly weighted Cohen's kappa");

  AggregateArgs aggregate;
  auto* c_agg = app.add_subcommand("aggregate", "Median-split annotations into labels");
  c_agg->add_option("--store", aggregate.store, "Annotation store JSONL")->required();
  c_agg->add_option("--subscenes", aggregate.subscenes, "Sub-scene JSONL (main speakers)");
  c_agg->add_option("--out", aggregate.out, "Labels CSV output");
  c_agg->add_option("--tie", aggregate.tie, "strict (sum > median) or inclusive (>=)");
  c_agg->add_option("--min-annotators", aggregate.min_annotators, "Required annotations");
  c_agg->add_flag("--include-incomplete", aggregate.include_incomplete);

  FormatArgs format;
  auto* c_format = app.add_subcommand("format", "Render sub-scenes as classifier input");
  c_format->add_option("--mode", format.mode, "S, SC or F")->required();
  c_format->add_option("--in", format.in, "Sub-scene JSONL")->required();
  c_format->add_option("--labels", format.labels, "Labels CSV");
  c_format->add_option("--out", format.out, "Item JSONL output");
  c_format->add_flag("--keep-names-in-text", format.keep_names,
                     "Do not replace speaker names inside utterance text");

  SplitArgs split;
  auto* c_split = app.add_subcommand("split", "Print a seeded k-fold plan");
  c_split->add_option("--n", split.n, "Item count")->required();
  c_split->add_option("--k", split.k, "Folds");
  c_split->add_option("--seed", split.seed, "Seed");
  c_split->add_option("--out", split.out, "Plan JSON output");

  EvalArgs eval;
  auto* c_eval = app.add_subcommand("eval", "Cross-validated accuracy per trait");
  c_eval->add_option("--dataset", eval.dataset, "friends or essays");
  c_eval->add_option("--format", eval.format, "S, SC or F (friends)");
  c_eval->add_option("--model", eval.model, "majority, logreg, attentive or memorize");
  c_eval->add_option("--in", eval.in, "Item JSONL (friends) or essays CSV")->required();
  c_eval->add_option("--seed", eval.seed, "Seed");
  c_eval->add_option("--k", eval.k, "Folds");
  c_eval->add_option("--out", eval.out, "Results output");
  c_eval->add_option("--style", eval.style, "csv or markdown");
  c_eval->add_flag("--stratify", eval.stratify, "Stratified folds");
  c_eval->add_flag("--smoke", eval.smoke, "Score on training folds (harness self-check)");
  c_eval->add_flag("--dominant-share", eval.dominant_share,
                   "Majority only: report the dataset's dominant-class share instead of CV");
  c_eval->add_option("--epochs", eval.epochs, "Epoch cap");
  c_eval->add_option("--lr", eval.lr, "Learning rate");
  c_eval->add_option("--dim", eval.dim, "Embedding width (attentive)");
  c_eval->add_option("--pretrained", eval.pretrained, "Word vectors (attentive)");

  ServeArgs serve;
  auto* c_serve = app.add_subcommand("serve", "Annotation HTTP service");
  c_serve->add_option("--subscenes", serve.subscenes, "Sub-scene JSONL")->required();
  c_serve->add_option("--store", serve.store, "Annotation store JSONL")->required();
  c_serve->add_option("--port", serve.port, "Port");
  c_serve->add_option("--host", serve.host, "Bind address");
  c_serve->add_option("--annotator", serve.annotators, "ID or ID:TOKEN (repeatable)");
  c_serve->add_option("--static", serve.static_dir, "Web app bundle directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfigErrorExit;
  }

  try {
    if (*c_ingest) RunIngest(ingest);
    if (*c_extract) RunExtract(extract);
    if (*c_agree) RunAgree(agree);
    if (*c_agg) RunAggregate(aggregate);
    if (*c_format) RunFormat(format);
    if (*c_split) RunSplit(split);
    if (*c_eval) RunEval(eval);
    if (*c_serve) RunServe(serve);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigErrorExit;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kDataErrorExit;
  }
  return 0;
}
