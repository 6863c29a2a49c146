#ifndef HDSEG_CLASS_MODEL_HPP
#define HDSEG_CLASS_MODEL_HPP

#include <Eigen/Core>

#include "hdseg/types.hpp"

namespace hdseg {

/// Result of classifying one hypervector: cosine score per class and the
/// winning label (smallest index attaining the maximum score).
struct Prediction {
  Index label = 0;
  Eigen::VectorXd similarities;
};

/// The learned model: one integer accumulator hypervector per class.
///
/// Accumulators stay signed 32-bit and are never re-binarized; cosine
/// similarity absorbs their magnitude through the cached L2 norms. A double
/// mirror of the accumulators backs the similarity kernel; entries are small
/// integers, so the mirror is exact.
class ClassModel {
 public:
  ClassModel(Index num_classes, Index hd_dim);

  /// Adopts existing accumulators (one class per row), e.g. from a checkpoint.
  static ClassModel fromAccumulators(RowMatrixXi accumulators);

  Index numClasses() const { return accumulators_.rows(); }
  Index hdDim() const { return accumulators_.cols(); }
  const RowMatrixXi& accumulators() const { return accumulators_; }
  const Eigen::VectorXd& cachedNorms() const { return norms_; }

  /// False until any accumulator is nonzero.
  bool trained() const;

  /// accumulators[label] += hv, norm refreshed.
  void bundle(const Eigen::Ref<const Hypervector>& hv, Index label);

  /// Cosine against every class; zero-norm classes score 0. Throws StateError
  /// on an untrained model.
  Prediction classify(const Eigen::Ref<const Hypervector>& hv) const;

  /// classify() without allocating: reuses out's similarity buffer.
  void classifyInto(const Eigen::Ref<const Hypervector>& hv,
                    Prediction& out) const;

  /// Perceptron-style loss: 0 when the prediction is correct, otherwise
  /// cos(hv, c_pred) - cos(hv, c_true). Always in [0, 2].
  double pointLoss(const Eigen::Ref<const Hypervector>& hv,
                   Index true_label) const;

  static double lossFrom(const Prediction& pred, Index true_label);

  /// On misclassification adds hv to the true class, subtracts it from the
  /// predicted class, refreshes both norms and returns true; otherwise leaves
  /// the model untouched and returns false.
  bool adaptUpdate(const Eigen::Ref<const Hypervector>& hv, Index true_label);

  /// The unconditional two-sided update, for callers that already classified.
  void applyMisclassification(const Eigen::Ref<const Hypervector>& hv,
                              Index true_label, Index predicted_label);

 private:
  void checkLabel(Index label, const char* op) const;
  void checkHv(const Eigen::Ref<const Hypervector>& hv, const char* op) const;
  void refreshNorm(Index label);

  RowMatrixXi accumulators_;  // num_classes x hd_dim
  RowMatrixXd mirror_;        // exact double copy, drives the GEMV kernel
  Eigen::VectorXd norms_;     // L2 norm per class, kept consistent
};

}  // namespace hdseg

#endif  // HDSEG_CLASS_MODEL_HPP
