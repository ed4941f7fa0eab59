#include "har/metrics.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <string>

namespace har::metrics {

std::size_t ConfusionMatrix::total() const {
  return std::accumulate(counts_.begin(), counts_.end(), std::size_t{0});
}

std::size_t ConfusionMatrix::trace() const {
  std::size_t t = 0;
  for (std::size_t c = 0; c < k_; ++c) t += (*this)(c, c);
  return t;
}

std::size_t ConfusionMatrix::row_sum(std::size_t truth) const {
  std::size_t s = 0;
  for (std::size_t p = 0; p < k_; ++p) s += (*this)(truth, p);
  return s;
}

std::size_t ConfusionMatrix::col_sum(std::size_t pred) const {
  std::size_t s = 0;
  for (std::size_t t = 0; t < k_; ++t) s += (*this)(t, pred);
  return s;
}

ConfusionMatrix confusion(std::span<const std::size_t> predicted, std::span<const std::size_t> truth,
                          std::size_t classes) {
  if (predicted.size() != truth.size()) {
    throw std::invalid_argument("confusion: " + std::to_string(predicted.size()) + " predictions for " +
                                std::to_string(truth.size()) + " labels");
  }
  if (truth.empty()) throw std::invalid_argument("confusion: no samples");
  ConfusionMatrix cm(classes);
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (truth[i] >= classes || predicted[i] >= classes) {
      throw std::invalid_argument("confusion: class index out of range at sample " + std::to_string(i));
    }
    ++cm(truth[i], predicted[i]);
  }
  return cm;
}

double accuracy(const ConfusionMatrix& cm) {
  const std::size_t n = cm.total();
  if (n == 0) throw std::invalid_argument("accuracy: empty confusion matrix");
  return static_cast<double>(cm.trace()) / static_cast<double>(n);
}

std::vector<double> per_class_accuracy(const ConfusionMatrix& cm) {
  std::vector<double> out(cm.classes(), 0.0);
  for (std::size_t c = 0; c < cm.classes(); ++c) {
    const std::size_t row = cm.row_sum(c);
    out[c] = row ? static_cast<double>(cm(c, c)) / static_cast<double>(row) : 0.0;
  }
  return out;
}

MacroPrf macro_prf(const ConfusionMatrix& cm) {
  if (cm.total() == 0) throw std::invalid_argument("macro_prf: empty confusion matrix");
  const std::size_t k = cm.classes();
  MacroPrf r;
  r.class_precision.resize(k);
  r.class_recall.resize(k);
  r.class_f1.resize(k);
  for (std::size_t c = 0; c < k; ++c) {
    const std::size_t row = cm.row_sum(c);
    if (row == 0) {
      throw std::invalid_argument("macro_prf: class " + std::to_string(c) + " has no true instances");
    }
    const std::size_t col = cm.col_sum(c);
    const double tp = static_cast<double>(cm(c, c));
    if (col == 0) r.empty_prediction_column = true;
    const double p = col ? tp / static_cast<double>(col) : 0.0;
    const double rec = tp / static_cast<double>(row);
    r.class_precision[c] = p;
    r.class_recall[c] = rec;
    r.class_f1[c] = (p + rec) > 0.0 ? 2.0 * p * rec / (p + rec) : 0.0;
    r.precision += p;
    r.recall += rec;
    r.mean_class_f1 += r.class_f1[c];
  }
  const double kd = static_cast<double>(k);
  r.precision /= kd;
  r.recall /= kd;
  r.mean_class_f1 /= kd;
  r.f1 = (r.precision + r.recall) > 0.0 ? 2.0 * r.precision * r.recall / (r.precision + r.recall) : 0.0;
  return r;
}

RocCurve roc_curve(std::span<const double> scores, std::span<const std::size_t> truth, std::size_t cls,
                   std::size_t classes) {
  const std::size_t n = truth.size();
  if (scores.size() != n * classes) throw std::invalid_argument("roc_curve: score matrix shape mismatch");
  if (cls >= classes) throw std::invalid_argument("roc_curve: class index out of range");
  std::size_t pos = 0;
  for (auto t : truth) pos += (t == cls);
  const std::size_t neg = n - pos;
  if (pos == 0 || neg == 0) {
    throw std::invalid_argument("roc_curve: class " + std::to_string(cls) + " has " + std::to_string(pos) +
                                " positive and " + std::to_string(neg) +
                                " negative samples; both must be non-zero");
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return scores[a * classes + cls] > scores[b * classes + cls];
  });

  RocCurve r;
  r.points.emplace_back(0.0, 0.0);
  std::size_t tp = 0;
  std::size_t fp = 0;
  const double pd = static_cast<double>(pos);
  const double nd = static_cast<double>(neg);
  for (std::size_t i = 0; i < n;) {
    const double s = scores[order[i] * classes + cls];
    while (i < n && scores[order[i] * classes + cls] == s) {
      if (truth[order[i]] == cls) {
        ++tp;
      } else {
        ++fp;
      }
      ++i;
    }
    const auto prev = r.points.back();
    const std::pair<double, double> cur{static_cast<double>(fp) / nd, static_cast<double>(tp) / pd};
    r.auc += (cur.first - prev.first) * (cur.second + prev.second) / 2.0;
    r.points.push_back(cur);
  }
  return r;
}

EvalReport evaluate_predictions(std::span<const double> scores, std::span<const std::size_t> predicted,
                                std::span<const std::size_t> truth, std::size_t classes) {
  EvalReport r;
  r.samples = truth.size();
  r.cm = confusion(predicted, truth, classes);
  r.accuracy = accuracy(r.cm);
  r.per_class_accuracy = per_class_accuracy(r.cm);
  r.prf = macro_prf(r.cm);
  for (std::size_t c = 0; c < classes; ++c) r.roc.push_back(roc_curve(scores, truth, c, classes));
  return r;
}

}  // namespace har::metrics
