#include "har/nn/train.hpp"

#include "har/metrics.hpp"

#include <numeric>
#include <stdexcept>

namespace har::nn {

void TrainConfig::validate() const {
  if (epochs == 0) throw std::invalid_argument("train: epochs must be positive");
  if (batch_size == 0) throw std::invalid_argument("train: batch_size must be positive");
  adam.validate();
}

SplitMetrics split_metrics(const Predictions& pred, const SampleMatrix<float>& data, std::size_t classes) {
  std::vector<std::size_t> truth(data.labels.begin(), data.labels.end());
  const auto cm = metrics::confusion(pred.predicted, truth, classes);
  const auto prf = metrics::macro_prf(cm);
  SplitMetrics m;
  m.loss = pred.mean_loss;
  m.accuracy = metrics::accuracy(cm);
  m.precision = prf.precision;
  m.recall = prf.recall;
  m.f1 = prf.f1;
  return m;
}

TrainResult train(const Network<float>& net, const SampleMatrix<float>& train_set,
                  const SampleMatrix<float>& test_set, const TrainConfig& cfg, const EpochCallback& on_epoch) {
  cfg.validate();
  if (train_set.count == 0) throw std::invalid_argument("train: training split is empty");
  if (test_set.count == 0) throw std::invalid_argument("train: test split is empty");
  if (train_set.freq_dim != net.freq_dim() || train_set.power_dim != net.power_dim() ||
      test_set.freq_dim != net.freq_dim() || test_set.power_dim != net.power_dim()) {
    throw ShapeError("train: sample dimensions do not match the model");
  }

  TrainResult result;
  auto params = init_params<float>(net.layout(), mix_seed(cfg.seed, 0));
  result.params = params;
  Rng shuffler(mix_seed(cfg.seed, 1));
  Adam<float> adam(params.size(), cfg.adam);
  BatchGradient<float> grads(net);
  std::vector<float> grad(params.size());
  std::vector<std::size_t> order(train_set.count);
  std::iota(order.begin(), order.end(), std::size_t{0});
  const std::size_t classes = net.spec().classes;
  double best_acc = -1.0;

  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    shuffler.shuffle(std::span<std::size_t>(order));
    for (std::size_t lo = 0; lo < order.size(); lo += cfg.batch_size) {
      const std::size_t n = std::min(cfg.batch_size, order.size() - lo);
      grads.compute(params, train_set, std::span<const std::size_t>(order).subspan(lo, n), grad);
      adam.step(params, grad);
    }
    EpochRecord rec;
    rec.epoch = epoch;
    rec.train = split_metrics(predict(net, params, train_set), train_set, classes);
    rec.test = split_metrics(predict(net, params, test_set), test_set, classes);
    if (rec.test.accuracy > best_acc) {
      best_acc = rec.test.accuracy;
      result.run.best_epoch = epoch;
      result.params = params;
    }
    result.run.epochs.push_back(rec);
    if (on_epoch) on_epoch(rec);
  }
  return result;
}

}  // namespace har::nn
