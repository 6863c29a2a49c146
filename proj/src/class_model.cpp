#include "hdseg/class_model.hpp"

#include <cmath>
#include <string>
#include <utility>

#include "hdseg/errors.hpp"

namespace hdseg {

ClassModel::ClassModel(Index num_classes, Index hd_dim) {
  if (num_classes < 1 || hd_dim < 1) {
    throw ConfigError("class model dimensions must be positive, got classes=" +
                      std::to_string(num_classes) +
                      " hd_dim=" + std::to_string(hd_dim));
  }
  accumulators_ = RowMatrixXi::Zero(num_classes, hd_dim);
  mirror_ = RowMatrixXd::Zero(num_classes, hd_dim);
  norms_ = Eigen::VectorXd::Zero(num_classes);
}

ClassModel ClassModel::fromAccumulators(RowMatrixXi accumulators) {
  if (accumulators.rows() < 1 || accumulators.cols() < 1) {
    throw ConfigError("fromAccumulators: empty accumulator matrix");
  }
  ClassModel m(accumulators.rows(), accumulators.cols());
  m.accumulators_ = std::move(accumulators);
  m.mirror_ = m.accumulators_.cast<double>();
  m.norms_ = m.mirror_.rowwise().norm();
  return m;
}

bool ClassModel::trained() const { return norms_.maxCoeff() > 0.0; }

void ClassModel::checkLabel(Index label, const char* op) const {
  if (label < 0 || label >= numClasses()) {
    throw ContractError(std::string(op) + ": label " + std::to_string(label) +
                        " out of range [0, " + std::to_string(numClasses()) +
                        ")");
  }
}

void ClassModel::checkHv(const Eigen::Ref<const Hypervector>& hv,
                         const char* op) const {
  if (hv.size() != hdDim()) {
    throw ContractError(std::string(op) + ": hypervector has length " +
                        std::to_string(hv.size()) + ", expected " +
                        std::to_string(hdDim()));
  }
}

void ClassModel::refreshNorm(Index label) {
  norms_[label] = mirror_.row(label).norm();
}

void ClassModel::bundle(const Eigen::Ref<const Hypervector>& hv, Index label) {
  checkLabel(label, "bundle");
  checkHv(hv, "bundle");
  accumulators_.row(label) += hv.transpose().cast<std::int32_t>();
  mirror_.row(label) += hv.transpose().cast<double>();
  refreshNorm(label);
}

void ClassModel::classifyInto(const Eigen::Ref<const Hypervector>& hv,
                              Prediction& out) const {
  checkHv(hv, "classify");
  if (!trained()) {
    throw StateError("classify: untrained model (all accumulators zero)");
  }
  static thread_local Eigen::VectorXd hv_d;
  hv_d = hv.cast<double>();
  out.similarities.resize(numClasses());
  out.similarities.noalias() = mirror_ * hv_d;
  const double hv_norm = std::sqrt(static_cast<double>(hdDim()));
  Index best = 0;
  double best_sim = -2.0;
  for (Index j = 0; j < numClasses(); ++j) {
    const double sim =
        norms_[j] > 0.0 ? out.similarities[j] / (hv_norm * norms_[j]) : 0.0;
    out.similarities[j] = sim;
    if (sim > best_sim) {
      best_sim = sim;
      best = j;
    }
  }
  out.label = best;
}

Prediction ClassModel::classify(const Eigen::Ref<const Hypervector>& hv) const {
  Prediction p;
  classifyInto(hv, p);
  return p;
}

double ClassModel::lossFrom(const Prediction& pred, Index true_label) {
  if (pred.label == true_label) return 0.0;
  return pred.similarities[pred.label] - pred.similarities[true_label];
}

double ClassModel::pointLoss(const Eigen::Ref<const Hypervector>& hv,
                             Index true_label) const {
  checkLabel(true_label, "point_loss");
  Prediction p;
  classifyInto(hv, p);
  return lossFrom(p, true_label);
}

void ClassModel::applyMisclassification(const Eigen::Ref<const Hypervector>& hv,
                                        Index true_label,
                                        Index predicted_label) {
  checkLabel(true_label, "adapt_update");
  checkLabel(predicted_label, "adapt_update");
  checkHv(hv, "adapt_update");
  if (true_label == predicted_label) {
    throw ContractError("adapt_update: true and predicted labels coincide");
  }
  accumulators_.row(true_label) += hv.transpose().cast<std::int32_t>();
  accumulators_.row(predicted_label) -= hv.transpose().cast<std::int32_t>();
  mirror_.row(true_label) += hv.transpose().cast<double>();
  mirror_.row(predicted_label) -= hv.transpose().cast<double>();
  refreshNorm(true_label);
  refreshNorm(predicted_label);
}

bool ClassModel::adaptUpdate(const Eigen::Ref<const Hypervector>& hv,
                             Index true_label) {
  checkLabel(true_label, "adapt_update");
  Prediction p;
  classifyInto(hv, p);
  if (p.label == true_label) return false;
  applyMisclassification(hv, true_label, p.label);
  return true;
}

}  // namespace hdseg
