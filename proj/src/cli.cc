// Copyright 2026 The acls Authors. All rights reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "acls/cli.h"

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <sstream>

#include "acls/checkpoint.h"
#include "acls/corpus.h"
#include "acls/errors.h"
#include "acls/metrics.h"
#include "acls/pipeline.h"
#include "acls/synth.h"
#include "acls/training.h"

namespace acls {

namespace {

struct Options {
  std::string data;
  std::string labels;
  std::string config;
  std::string out;
  std::string log;
  std::string model;
  std::string input;
  std::string corrupt;
  std::string labels_out;
  std::optional<uint64_t> seed;
  size_t top_k = 1;
  double tol = 1e-4;
  double step = 1e-3;
  size_t classes = 14;
  size_t per_class = 200;
  uint64_t synth_seed = 7;
  bool json = false;
};

TrainConfig resolve_config(const Options& opt, TrainConfig base = {}) {
  TrainConfig config = opt.config.empty() ? base : load_config(opt.config, base);
  if (const char* env = std::getenv("ACLS_SEED"); env && *env) {
    try {
      size_t used = 0;
      config.seed = std::stoull(env, &used);
      if (env[used] != '\0') throw std::invalid_argument(env);
    } catch (const std::exception&) {
      throw ConfigError(std::string("ACLS_SEED is not an unsigned integer: ") + env);
    }
  }
  if (opt.seed) config.seed = *opt.seed;
  config.validate();
  return config;
}

LabelMap resolve_labels(const Options& opt) {
  return opt.labels.empty() ? default_label_map() : load_label_map(opt.labels);
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path);
  out << text;
}

int cmd_train(const Options& opt, std::ostream& out) {
  const TrainConfig config = resolve_config(opt);
  const LabelMap labels = resolve_labels(opt);
  const Dataset data = load_dataset(opt.data, labels);
  auto result = run_pipeline(data, config, [&](const EpochRecord& rec) {
    char buf[160];
    std::snprintf(buf, sizeof(buf), "epoch %zu  train_loss %.6f", rec.epoch, rec.train_loss);
    out << buf;
    if (rec.val) {
      std::snprintf(buf, sizeof(buf), "  val_acc %.4f  val_loss %.6f", rec.val->accuracy,
                    rec.val->average_loss);
      out << buf;
    }
    out << '\n';
  });
  save_checkpoint(result.model, config, result.vocab, labels, opt.out);

  nlohmann::json log = train_log_to_json(result.log, &labels);
  log["config"] = format_config(config);
  log["split"] = {{"train", result.split.train.size()},
                  {"val", result.split.val.size()},
                  {"test", result.split.test.size()}};
  log["vocab_size"] = result.vocab.size();
  if (result.test) log["test"] = report_to_json(*result.test, &labels);
  write_text(opt.log.empty() ? opt.out + ".log.json" : opt.log, log.dump(2) + "\n");

  if (result.test) {
    out << "test\n" << format_report(*result.test, &labels);
  }
  out << "checkpoint written to " << opt.out << '\n';
  return kExitOk;
}

int cmd_eval(const Options& opt, std::ostream& out) {
  const Checkpoint ck = load_checkpoint(opt.model);
  const Model model = model_from_checkpoint(ck);
  const Dataset data = load_dataset(opt.data, ck.labels);
  if (data.empty()) throw DataError("eval: dataset is empty");
  const MetricsReport report = evaluate(model, encode(data, ck.vocab));
  if (opt.json) {
    out << report_to_json(report, &ck.labels).dump(2) << '\n';
  } else {
    out << format_report(report, &ck.labels);
  }
  return kExitOk;
}

std::vector<std::string> read_predict_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open input " + path);
  std::vector<std::string> texts;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
    if (line.front() == '{') {
      auto rec = nlohmann::json::parse(line, nullptr, false);
      if (!rec.is_discarded() && rec.is_object() && rec.contains("text") && rec["text"].is_string()) {
        texts.push_back(rec["text"].get<std::string>());
        continue;
      }
    }
    texts.push_back(line);
  }
  return texts;
}

int cmd_predict(const Options& opt, std::ostream& out) {
  if (opt.top_k < 1) throw ConfigError("--top-k must be >= 1");
  const Checkpoint ck = load_checkpoint(opt.model);
  const Model model = model_from_checkpoint(ck);
  const auto texts = read_predict_input(opt.input);
  const auto probs = predict_probs(model, ck.vocab, texts);
  char buf[64];
  for (const auto& p : probs) {
    std::vector<size_t> order(p.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) { return p[a] > p[b]; });
    const size_t k = std::min(opt.top_k, order.size());
    if (opt.json) {
      nlohmann::json rec = {{"label", ck.labels.name(static_cast<ClassId>(order[0]))},
                            {"probability", p[order[0]]}};
      if (opt.top_k > 1) {
        auto top = nlohmann::json::array();
        for (size_t i = 0; i < k; ++i) {
          top.push_back({{"label", ck.labels.name(static_cast<ClassId>(order[i]))},
                         {"probability", p[order[i]]}});
        }
        rec["top_k"] = std::move(top);
      }
      out << rec.dump() << '\n';
      continue;
    }
    std::snprintf(buf, sizeof(buf), "%.6f", p[order[0]]);
    out << ck.labels.name(static_cast<ClassId>(order[0])) << '\t' << buf;
    if (opt.top_k > 1) {
      for (size_t i = 0; i < k; ++i) {
        std::snprintf(buf, sizeof(buf), "%.6f", p[order[i]]);
        out << '\t' << ck.labels.name(static_cast<ClassId>(order[i])) << ':' << buf;
      }
    }
    out << '\n';
  }
  return kExitOk;
}

struct AblationRow {
  std::string name;
  MetricsReport report;
};

int cmd_ablate(const Options& opt, std::ostream& out) {
  const TrainConfig base = resolve_config(opt);
  const LabelMap labels = resolve_labels(opt);
  const Dataset data = load_dataset(opt.data, labels);
  struct Variant {
    const char* name;
    bool cnn, bilstm, fgm;
  };
  constexpr Variant kVariants[] = {
      {"CNN-BiLSTM (+FGM)", true, true, true},
      {"CNN-BiLSTM", true, true, false},
      {"CNN", true, false, false},
      {"BiLSTM", false, true, false},
  };
  std::vector<AblationRow> rows;
  for (const auto& v : kVariants) {
    TrainConfig config = base;
    config.use_cnn = v.cnn;
    config.use_bilstm = v.bilstm;
    config.fgm.enabled = v.fgm;
    auto result = run_pipeline(data, config);
    if (!result.test) throw DataError("ablate: test split is empty");
    rows.push_back({v.name, *result.test});
  }
  if (opt.json) {
    auto arr = nlohmann::json::array();
    for (const auto& r : rows) {
      arr.push_back({{"model", r.name},
                     {"accuracy", r.report.accuracy},
                     {"precision", r.report.precision},
                     {"recall", r.report.recall},
                     {"f1", r.report.f1},
                     {"average_loss", r.report.average_loss}});
    }
    out << nlohmann::json{{"rows", arr}}.dump(2) << '\n';
    return kExitOk;
  }
  char buf[256];
  std::snprintf(buf, sizeof(buf), "%-20s %-8s %-8s %-8s %-8s %-8s\n", "Model", "Acc", "P", "R",
                "F1", "Loss");
  out << buf;
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof(buf), "%-20s %-8.4f %-8.4f %-8.4f %-8.4f %-8.4f\n", r.name.c_str(),
                  r.report.accuracy, r.report.precision, r.report.recall, r.report.f1,
                  r.report.average_loss);
    out << buf;
  }
  return kExitOk;
}

int cmd_gradcheck(const Options& opt, std::ostream& out) {
  const TrainConfig config = resolve_config(opt, gradcheck_config());
  GradCheckOptions gc;
  gc.tol = opt.tol;
  gc.step = opt.step;
  const auto report = check_model_gradients(config, gc, opt.corrupt);
  char buf[160];
  for (const auto& e : report.entries) {
    std::snprintf(buf, sizeof(buf), "%-16s max_rel_error %.3e  %s\n", e.name.c_str(),
                  e.max_rel_error, e.max_rel_error <= gc.tol ? "ok" : "FAIL");
    out << buf;
  }
  std::snprintf(buf, sizeof(buf), "gradcheck %s: max_rel_error %.3e (tol %.1e)\n",
                report.passed ? "PASS" : "FAIL", report.max_rel_error, gc.tol);
  out << buf;
  return report.passed ? kExitOk : kExitNumeric;
}

int cmd_synth(const Options& opt, std::ostream& out) {
  SynthOptions so;
  so.classes = opt.classes;
  so.per_class = opt.per_class;
  so.seed = opt.synth_seed;
  const auto corpus = make_synthetic_corpus(so);
  std::ofstream file(opt.out);
  if (!file) throw DataError("cannot write " + opt.out);
  const auto& labels = corpus.dataset.label_map;
  for (const auto& ex : corpus.dataset.examples) {
    file << nlohmann::json{{"text", ex.text}, {"label", labels.name(ex.label)}}.dump() << '\n';
  }
  const std::string labels_path = opt.labels_out.empty() ? opt.out + ".labels" : opt.labels_out;
  save_label_map(labels, labels_path);
  out << "wrote " << corpus.dataset.size() << " examples to " << opt.out << ", labels to "
      << labels_path << '\n';
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Text classification with CNN/BiLSTM heads and FGM adversarial training", "acls"};
  app.option_defaults()->always_capture_default();
  app.require_subcommand(1, 1);
  Options opt;

  auto add_seed = [&](CLI::App* sub) {
    sub->add_option_function<uint64_t>(
        "--seed", [&](const uint64_t& s) { opt.seed = s; },
        "Seed for splitting, shuffling and init (overrides config and ACLS_SEED)");
  };

  auto* train = app.add_subcommand("train", "Train a model and write a checkpoint");
  train->add_option("--data", opt.data, "Dataset JSONL file")->required()->check(CLI::ExistingFile);
  train->add_option("--labels", opt.labels, "Label map file (default: built-in fraud taxonomy)")
      ->check(CLI::ExistingFile);
  train->add_option("--config", opt.config, "key=value config file")->check(CLI::ExistingFile);
  train->add_option("--out", opt.out, "Checkpoint output path")->required();
  train->add_option("--log", opt.log, "JSON epoch log path (default: <out>.log.json)");
  add_seed(train);

  auto* eval = app.add_subcommand("eval", "Evaluate a checkpoint on a dataset");
  eval->add_option("--model", opt.model, "Checkpoint file")->required()->check(CLI::ExistingFile);
  eval->add_option("--data", opt.data, "Dataset JSONL file")->required()->check(CLI::ExistingFile);
  eval->add_flag("--json", opt.json, "Print the report as JSON");

  auto* predict = app.add_subcommand("predict", "Classify texts, one per line or JSONL");
  predict->add_option("--model", opt.model, "Checkpoint file")->required()->check(CLI::ExistingFile);
  predict->add_option("--input", opt.input, "Input file")->required()->check(CLI::ExistingFile);
  predict->add_option("--top-k", opt.top_k, "Also list the k most likely classes");
  predict->add_flag("--json", opt.json, "Emit one JSON object per line");

  auto* ablate = app.add_subcommand("ablate", "Train and compare the four architecture/FGM variants");
  ablate->add_option("--data", opt.data, "Dataset JSONL file")->required()->check(CLI::ExistingFile);
  ablate->add_option("--labels", opt.labels, "Label map file (default: built-in fraud taxonomy)")
      ->check(CLI::ExistingFile);
  ablate->add_option("--config", opt.config, "key=value config file")->check(CLI::ExistingFile);
  ablate->add_flag("--json", opt.json, "Print the table as JSON");
  add_seed(ablate);

  auto* gradcheck = app.add_subcommand("gradcheck", "Check analytic gradients against finite differences");
  gradcheck->add_option("--config", opt.config, "key=value config file (model sizes, seed)")
      ->check(CLI::ExistingFile);
  gradcheck->add_option("--tol", opt.tol, "Maximum relative error");
  gradcheck->add_option("--step", opt.step, "Central-difference step");
  gradcheck->add_option("--corrupt", opt.corrupt, "Skew one tensor's analytic gradient (test hook)");
  add_seed(gradcheck);

  auto* synth = app.add_subcommand("synth", "Generate a keyword-separable synthetic corpus");
  synth->add_option("--out", opt.out, "Dataset JSONL output path")->required();
  synth->add_option("--classes", opt.classes, "Number of classes")->check(CLI::Range(2, 1000));
  synth->add_option("--per-class", opt.per_class, "Examples per class")->check(CLI::PositiveNumber);
  synth->add_option("--seed", opt.synth_seed, "Generator seed");
  synth->add_option("--labels-out", opt.labels_out, "Label map output (default: <out>.labels)");

  std::vector<std::string> rev(args.rbegin(), args.rend());
  if (!rev.empty()) rev.pop_back();  // program name
  try {
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*train) return cmd_train(opt, out);
    if (*eval) return cmd_eval(opt, out);
    if (*predict) return cmd_predict(opt, out);
    if (*ablate) return cmd_ablate(opt, out);
    if (*gradcheck) return cmd_gradcheck(opt, out);
    if (*synth) return cmd_synth(opt, out);
  } catch (const ConfigError& e) {
    err << "acls: config error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const NumericError& e) {
    err << "acls: numeric failure: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const DataError& e) {
    err << "acls: data error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::exception& e) {
    err << "acls: I/O error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitUsage;
}

}  // namespace acls
