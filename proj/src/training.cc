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

#include "acls/training.h"

#include <cassert>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "acls/embedding.h"
#include "acls/errors.h"
#include "acls/prng.h"

namespace acls {

void TrainConfig::validate() const {
  if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
  if (epochs < 1) throw ConfigError("epochs must be >= 1");
  if (!(learning_rate > 0) || !(scratch_lr > 0)) throw ConfigError("learning rates must be > 0");
  if (!(fgm.epsilon >= 0) || !std::isfinite(fgm.epsilon)) {
    throw ConfigError("fgm.epsilon must be a finite non-negative number");
  }
  if (embed_dim == 0 || kernels == 0 || hidden == 0) throw ConfigError("model sizes must be positive");
  if (!use_cnn && !use_bilstm) throw ConfigError("model.use_cnn and model.use_bilstm cannot both be false");
  if (split.train < 0 || split.val < 0 || split.test < 0 ||
      std::abs(split.train + split.val + split.test - 1.0) > 1e-9) {
    throw ConfigError("split ratios must be non-negative and sum to 1");
  }
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

template <typename T>
T parse_number(std::string_view key, std::string_view value) {
  T out{};
  const char* end = value.data() + value.size();
  auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc() || ptr != end) {
    throw ConfigError("config: bad value '" + std::string(value) + "' for " + std::string(key));
  }
  return out;
}

bool parse_bool(std::string_view key, std::string_view value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw ConfigError("config: bad boolean '" + std::string(value) + "' for " + std::string(key));
}

std::string fmt_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

}  // namespace

TrainConfig parse_config(std::string_view text, TrainConfig c) {
  size_t line_no = 0;
  while (!text.empty()) {
    const size_t nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (const size_t hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const size_t eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("config line " + std::to_string(line_no) + ": expected key=value");
    }
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    if (key == "batch_size") c.batch_size = parse_number<size_t>(key, value);
    else if (key == "learning_rate") c.learning_rate = parse_number<double>(key, value);
    else if (key == "scratch_lr") c.scratch_lr = parse_number<double>(key, value);
    else if (key == "epochs") c.epochs = parse_number<size_t>(key, value);
    else if (key == "seed") c.seed = parse_number<uint64_t>(key, value);
    else if (key == "min_count") c.min_count = parse_number<size_t>(key, value);
    else if (key == "fgm.enabled") c.fgm.enabled = parse_bool(key, value);
    else if (key == "fgm.epsilon") c.fgm.epsilon = parse_number<double>(key, value);
    else if (key == "model.embed_dim") c.embed_dim = parse_number<size_t>(key, value);
    else if (key == "model.kernels") c.kernels = parse_number<size_t>(key, value);
    else if (key == "model.hidden") c.hidden = parse_number<size_t>(key, value);
    else if (key == "model.use_cnn") c.use_cnn = parse_bool(key, value);
    else if (key == "model.use_bilstm") c.use_bilstm = parse_bool(key, value);
    else if (key == "embeddings") c.embeddings = std::string(value);
    else if (key == "split.train") c.split.train = parse_number<double>(key, value);
    else if (key == "split.val") c.split.val = parse_number<double>(key, value);
    else if (key == "split.test") c.split.test = parse_number<double>(key, value);
    else throw ConfigError("config line " + std::to_string(line_no) + ": unknown key '" + std::string(key) + "'");
  }
  return c;
}

TrainConfig load_config(const std::filesystem::path& path, TrainConfig base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), std::move(base));
}

std::string format_config(const TrainConfig& c) {
  std::ostringstream os;
  os << "batch_size=" << c.batch_size << '\n'
     << "learning_rate=" << fmt_double(c.learning_rate) << '\n'
     << "scratch_lr=" << fmt_double(c.scratch_lr) << '\n'
     << "epochs=" << c.epochs << '\n'
     << "seed=" << c.seed << '\n'
     << "min_count=" << c.min_count << '\n'
     << "fgm.enabled=" << (c.fgm.enabled ? "true" : "false") << '\n'
     << "fgm.epsilon=" << fmt_double(c.fgm.epsilon) << '\n'
     << "model.embed_dim=" << c.embed_dim << '\n'
     << "model.kernels=" << c.kernels << '\n'
     << "model.hidden=" << c.hidden << '\n'
     << "model.use_cnn=" << (c.use_cnn ? "true" : "false") << '\n'
     << "model.use_bilstm=" << (c.use_bilstm ? "true" : "false") << '\n';
  if (!c.embeddings.empty()) os << "embeddings=" << c.embeddings << '\n';
  os << "split.train=" << fmt_double(c.split.train) << '\n'
     << "split.val=" << fmt_double(c.split.val) << '\n'
     << "split.test=" << fmt_double(c.split.test) << '\n';
  return os.str();
}

ModelDims model_dims(const TrainConfig& config, size_t vocab_size, size_t classes) {
  ModelDims dims;
  dims.vocab_size = vocab_size;
  dims.embed_dim = config.embed_dim;
  dims.kernels = config.kernels;
  dims.hidden = config.hidden;
  dims.classes = classes;
  dims.use_cnn = config.use_cnn;
  dims.use_bilstm = config.use_bilstm;
  return dims;
}

Model make_model(const TrainConfig& config, size_t vocab_size, size_t classes) {
  const ModelDims dims = model_dims(config, vocab_size, classes);
  if (config.embeddings.empty()) return Model(dims, config.seed);
  return Model(dims,
               load_frozen_embeddings(config.embeddings, vocab_size, config.embed_dim, config.seed),
               config.seed);
}

AdamState make_adam_state(std::span<ParamTensor* const> params) {
  AdamState s;
  for (const auto* p : params) {
    s.m.emplace_back(p->value.rows(), p->value.cols());
    s.v.emplace_back(p->value.rows(), p->value.cols());
  }
  return s;
}

void adam_step(std::span<ParamTensor* const> params, AdamState& state, double lr) {
  if (state.m.size() != params.size()) throw ShapeError("adam_step: state/parameter count mismatch");
  for (size_t k = 0; k < params.size(); ++k) {
    if (!state.m[k].same_shape(params[k]->value)) {
      throw ShapeError("adam_step: moment shape mismatch for " + params[k]->name);
    }
    if (!params[k]->grad.all_finite()) {
      throw NumericError("adam_step: non-finite gradient in " + params[k]->name);
    }
  }
  ++state.t;
  const double b1 = state.beta1;
  const double b2 = state.beta2;
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(state.t));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(state.t));
  for (size_t k = 0; k < params.size(); ++k) {
    auto& theta = params[k]->value.data();
    const auto& g = params[k]->grad.data();
    auto& m = state.m[k].data();
    auto& v = state.v[k].data();
    for (size_t i = 0; i < theta.size(); ++i) {
      m[i] = b1 * m[i] + (1.0 - b1) * g[i];
      v[i] = b2 * v[i] + (1.0 - b2) * g[i] * g[i];
      const double m_hat = m[i] / c1;
      const double v_hat = v[i] / c2;
      theta[i] -= lr * m_hat / (std::sqrt(v_hat) + state.eps_hat);
    }
  }
}

uint64_t epoch_shuffle_seed(uint64_t seed, size_t epoch) {
  SplitMix64 sm(seed ^ 0xa0761d6478bd642fULL);
  uint64_t s = 0;
  for (size_t e = 0; e < epoch; ++e) s = sm.next();
  return s;
}

TrainLog train(Model& model, const std::vector<EncodedExample>& train_set,
               const std::vector<EncodedExample>& val_set, const TrainConfig& config,
               const EpochCallback& on_epoch) {
  config.validate();
  if (train_set.empty()) throw DataError("train: empty training set");
  const auto params = model.trainable_parameters();
  AdamState adam = make_adam_state(params);
  const double lr = config.effective_lr(model.embedding.trainable);

  TrainLog log;
  double best_acc = -1.0;
  model.zero_grads();
  for (size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    EpochRecord rec;
    rec.epoch = epoch;
    double loss_sum = 0.0;
    double adv_sum = 0.0;
    size_t batch_no = 0;
    const auto epoch_batches =
        batches(train_set, config.batch_size, epoch_shuffle_seed(config.seed, epoch));
    for (const auto& batch : epoch_batches) {
      ++batch_no;
      assert(model.grads_are_zero());
      try {
        const StepLosses step = fgm_train_step(model, batch, config.fgm);
        if (!std::isfinite(step.clean) || (step.adversarial && !std::isfinite(*step.adversarial))) {
          throw NumericError("non-finite loss");
        }
        adam_step(params, adam, lr);
        loss_sum += step.clean;
        if (step.adversarial) adv_sum += *step.adversarial;
      } catch (const NumericError& e) {
        throw NumericError("training diverged at epoch " + std::to_string(epoch) + ", batch " +
                           std::to_string(batch_no) + ": " + e.what());
      }
      model.zero_grads();
    }
    rec.train_loss = loss_sum / static_cast<double>(epoch_batches.size());
    if (config.fgm.enabled) rec.adversarial_loss = adv_sum / static_cast<double>(epoch_batches.size());
    if (!val_set.empty()) {
      rec.val = evaluate(model, val_set);
      if (rec.val->accuracy > best_acc) {
        best_acc = rec.val->accuracy;
        log.best_epoch = epoch;
      }
    }
    log.epochs.push_back(rec);
    if (on_epoch) on_epoch(log.epochs.back());
  }
  return log;
}

nlohmann::json train_log_to_json(const TrainLog& log, const LabelMap* labels) {
  nlohmann::json j;
  auto epochs = nlohmann::json::array();
  for (const auto& rec : log.epochs) {
    nlohmann::json e;
    e["epoch"] = rec.epoch;
    e["train_loss"] = rec.train_loss;
    if (rec.adversarial_loss) e["adversarial_loss"] = *rec.adversarial_loss;
    if (rec.val) e["val"] = report_to_json(*rec.val, labels);
    epochs.push_back(std::move(e));
  }
  j["epochs"] = std::move(epochs);
  if (log.best_epoch) j["best_epoch"] = *log.best_epoch;
  return j;
}

}  // namespace acls
