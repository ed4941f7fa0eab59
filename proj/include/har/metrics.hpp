#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace har::metrics {

/// counts(t, p): samples of true class t predicted as class p.
class ConfusionMatrix {
 public:
  explicit ConfusionMatrix(std::size_t classes = 6) : k_(classes), counts_(classes * classes, 0) {}

  std::size_t classes() const { return k_; }
  std::size_t& operator()(std::size_t truth, std::size_t pred) { return counts_[truth * k_ + pred]; }
  std::size_t operator()(std::size_t truth, std::size_t pred) const { return counts_[truth * k_ + pred]; }

  std::size_t total() const;
  std::size_t trace() const;
  std::size_t row_sum(std::size_t truth) const;
  std::size_t col_sum(std::size_t pred) const;

  bool operator==(const ConfusionMatrix&) const = default;

 private:
  std::size_t k_;
  std::vector<std::size_t> counts_;
};

/// Throws std::invalid_argument on length mismatch, empty input or a class
/// index >= classes.
ConfusionMatrix confusion(std::span<const std::size_t> predicted, std::span<const std::size_t> truth,
                          std::size_t classes = 6);

struct MacroPrf {
  double precision = 0.0;  // unweighted mean of per-class precision
  double recall = 0.0;     // unweighted mean of per-class recall
  double f1 = 0.0;         // harmonic mean of the two macro values above
  double mean_class_f1 = 0.0;  // unweighted mean of per-class F1 (secondary reading)
  std::vector<double> class_precision;
  std::vector<double> class_recall;
  std::vector<double> class_f1;
  /// Set when some class was never predicted; its precision counts as 0.
  bool empty_prediction_column = false;
};

/// Throws std::invalid_argument when the matrix is empty or a class has no
/// true instances.
MacroPrf macro_prf(const ConfusionMatrix& cm);

struct RocCurve {
  std::vector<std::pair<double, double>> points;  // (fpr, tpr), (0,0) .. (1,1)
  double auc = 0.0;
};

/// One-vs-rest ROC for class `cls`. `scores` is row-major count x classes.
/// Thresholds sweep the distinct scores in descending order; tied scores form
/// one step. AUC by the trapezoid rule. Throws std::invalid_argument when the
/// class has no positive or no negative instance.
RocCurve roc_curve(std::span<const double> scores, std::span<const std::size_t> truth, std::size_t cls,
                   std::size_t classes = 6);

struct EvalReport {
  std::size_t samples = 0;
  double accuracy = 0.0;
  std::vector<double> per_class_accuracy;
  ConfusionMatrix cm;
  MacroPrf prf;
  std::vector<RocCurve> roc;
};

/// accuracy = trace(cm) / total; per-class accuracy = diagonal / row sum.
double accuracy(const ConfusionMatrix& cm);
std::vector<double> per_class_accuracy(const ConfusionMatrix& cm);

/// Assembles every metric from class scores and hard predictions.
EvalReport evaluate_predictions(std::span<const double> scores, std::span<const std::size_t> predicted,
                                std::span<const std::size_t> truth, std::size_t classes = 6);

}  // namespace har::metrics
