#include "slrkit/train.hpp"

#include <cmath>
#include <fstream>
#include <numeric>

#include <nlohmann/json.hpp>

#include "slrkit/batch.hpp"
#include "slrkit/checkpoint.hpp"
#include "slrkit/errors.hpp"
#include "slrkit/sequence_io.hpp"

namespace slrkit {

void TrainRunConfig::validate() const {
  if (batch_size < 1) throw ContractError("batch_size must be >= 1");
  if (max_epochs < 1) throw ContractError("max_epochs must be >= 1");
  if (patience < 1) throw ContractError("patience must be >= 1");
  if (optimizer.lr <= 0.0) throw ContractError("learning rate must be positive");
}

TrainRunConfig load_train_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open train config: " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path.string(), 0, e.what());
  }
  TrainRunConfig c;
  try {
    c.seed = j.at("seed").get<uint64_t>();  // mandatory: no implicit entropy
    if (j.contains("lr")) c.optimizer.lr = j["lr"].get<double>();
    if (j.contains("beta1")) c.optimizer.beta1 = j["beta1"].get<double>();
    if (j.contains("beta2")) c.optimizer.beta2 = j["beta2"].get<double>();
    if (j.contains("eps")) c.optimizer.eps = j["eps"].get<double>();
    if (j.contains("batch_size")) c.batch_size = j["batch_size"].get<size_t>();
    if (j.contains("max_epochs")) c.max_epochs = j["max_epochs"].get<size_t>();
    if (j.contains("patience")) c.patience = j["patience"].get<size_t>();
    if (j.contains("l1_lambda")) c.l1_lambda = j["l1_lambda"].get<double>();
    if (j.contains("checkpoint_path"))
      c.checkpoint_path = j["checkpoint_path"].get<std::string>();
    if (j.contains("trace_path")) c.trace_path = j["trace_path"].get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path.string(), 0, e.what());
  }
  c.validate();
  return c;
}

void save_train_config(const TrainRunConfig& config, const std::filesystem::path& path) {
  nlohmann::json j;
  j["seed"] = config.seed;
  j["lr"] = config.optimizer.lr;
  j["beta1"] = config.optimizer.beta1;
  j["beta2"] = config.optimizer.beta2;
  j["eps"] = config.optimizer.eps;
  j["batch_size"] = config.batch_size;
  j["max_epochs"] = config.max_epochs;
  j["patience"] = config.patience;
  j["l1_lambda"] = config.l1_lambda;
  if (!config.checkpoint_path.empty()) j["checkpoint_path"] = config.checkpoint_path.string();
  if (!config.trace_path.empty()) j["trace_path"] = config.trace_path.string();
  std::ofstream out(path);
  if (!out) throw IoError("cannot write train config: " + path.string());
  out << j.dump(2) << '\n';
}

void write_trace(const std::vector<EpochMetrics>& trace, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write metric trace: " + path.string());
  out << "epoch\ttrain_loss\ttrain_acc\tval_acc\n";
  for (const auto& m : trace) {
    out << m.epoch << '\t' << format_double(m.train_loss) << '\t'
        << format_double(m.train_accuracy) << '\t' << format_double(m.val_accuracy) << '\n';
  }
}

EvalResult tabulate_predictions(std::span<const size_t> predictions,
                                std::span<const size_t> labels, size_t classes) {
  if (predictions.size() != labels.size())
    throw ContractError("predictions/labels size mismatch");
  EvalResult r;
  r.total = labels.size();
  r.per_class.resize(classes);
  for (size_t c = 0; c < classes; ++c) r.per_class[c].class_id = c;
  for (size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] >= classes) throw ContractError("label out of range");
    auto& row = r.per_class[labels[i]];
    ++row.support;
    if (predictions[i] == labels[i]) {
      ++row.correct;
      ++r.correct;
    }
  }
  for (auto& row : r.per_class)
    row.accuracy = row.support == 0 ? 0.0
                                    : static_cast<double>(row.correct) /
                                          static_cast<double>(row.support);
  r.accuracy = r.total == 0 ? 0.0 : static_cast<double>(r.correct) / static_cast<double>(r.total);
  return r;
}

EvalResult evaluate(const PtnModel& model, std::span<const Example> examples) {
  std::vector<size_t> predictions, labels;
  predictions.reserve(examples.size());
  labels.reserve(examples.size());
  for (const Example& e : examples) {
    const nn::Tensor logits =
        model.forward_sequence(e.seq, nn::Mode::eval, nullptr, nullptr, /*allow_partial=*/true);
    size_t argmax = 0;
    for (size_t c = 1; c < logits.size(); ++c)
      if (logits[c] > logits[argmax]) argmax = c;
    predictions.push_back(argmax);
    labels.push_back(e.label);
  }
  return tabulate_predictions(predictions, labels, model.config().classes);
}

TrainResult train(PtnModel& model, const ExampleSet& data, const TrainRunConfig& config) {
  config.validate();
  if (data.train.empty() || data.validation.empty())
    throw ContractError("train and validation subsets must be non-empty");
  if (model.config().classes != data.class_count)
    throw ContractError("model classes (" + std::to_string(model.config().classes) +
                        ") != dataset classes (" + std::to_string(data.class_count) + ")");
  const double lambda =
      config.l1_lambda >= 0.0 ? config.l1_lambda : model.config().l1_lambda;

  Rng rng(Rng::derive(config.seed, 0x747261696eULL));  // "train" stream
  std::vector<nn::Param*> params = model.params();
  nn::AdamState adam;

  std::vector<size_t> order(data.train.size());
  std::iota(order.begin(), order.end(), 0);

  TrainResult result;
  double best = -1.0;
  size_t since_best = 0;
  std::vector<nn::Tensor> best_values;

  for (size_t epoch = 1; epoch <= config.max_epochs; ++epoch) {
    rng.shuffle(order);
    double loss_sum = 0.0;
    size_t train_correct = 0;

    for (size_t start = 0; start < order.size(); start += config.batch_size) {
      const size_t end = std::min(order.size(), start + config.batch_size);
      std::vector<const Example*> members;
      members.reserve(end - start);
      for (size_t i = start; i < end; ++i) members.push_back(&data.train[order[i]]);
      const PaddedBatch batch = pad_and_mask(std::span<const Example* const>(members));
      const double inv_b = 1.0 / static_cast<double>(members.size());

      model.zero_grads();
      double ce_sum = 0.0;
      for (size_t i = 0; i < members.size(); ++i) {
        PtnCache cache;
        const nn::Tensor logits =
            model.forward(batch.frames[i], batch.masks[i], nn::Mode::train, &rng, &cache);
        auto ce = nn::softmax_cross_entropy(logits, batch.labels[i]);
        if (!std::isfinite(ce.loss))
          throw DivergenceError("non-finite loss at epoch " + std::to_string(epoch));
        ce_sum += ce.loss;
        if (ce.argmax == batch.labels[i]) ++train_correct;
        for (double& g : ce.grad_logits.values()) g *= inv_b;
        model.backward(cache, ce.grad_logits);
      }
      nn::Param& reg_target = model.input_layer_weights();
      const auto l1 = nn::l1_penalty(reg_target.value, lambda);
      for (size_t k = 0; k < reg_target.grad.size(); ++k)
        reg_target.grad[k] += l1.subgradient[k];
      loss_sum += ce_sum + l1.penalty * static_cast<double>(members.size());

      nn::optimizer_step(params, adam, config.optimizer);
    }

    EpochMetrics m;
    m.epoch = epoch;
    m.train_loss = loss_sum / static_cast<double>(order.size());
    m.train_accuracy = static_cast<double>(train_correct) / static_cast<double>(order.size());
    m.val_accuracy = evaluate(model, data.validation).accuracy;
    result.trace.push_back(m);
    result.epochs_run = epoch;

    if (m.val_accuracy > best) {
      best = m.val_accuracy;
      result.best_val_accuracy = best;
      result.best_epoch = epoch;
      since_best = 0;
      best_values.clear();
      for (const nn::Param* p : params) best_values.push_back(p->value);
    } else if (++since_best >= config.patience) {
      break;
    }
  }

  // the caller gets the best-epoch model, never a later/worse one
  for (size_t i = 0; i < params.size(); ++i) params[i]->value = best_values[i];
  if (!config.checkpoint_path.empty()) save_checkpoint(model, config.checkpoint_path);
  if (!config.trace_path.empty()) write_trace(result.trace, config.trace_path);
  return result;
}

}  // namespace slrkit
