#ifndef HDSEG_ENCODER_HPP
#define HDSEG_ENCODER_HPP

#include <cstdint>

#include <Eigen/Core>

#include "hdseg/types.hpp"

namespace hdseg {

/// Random-projection encoder lifting p-dimensional features into bipolar
/// hypervectors of dimension d.
///
/// The projection matrix has i.i.d. standard-normal entries drawn row-major
/// from a single Box-Muller stream over mt19937_64 (see random.hpp), so equal
/// (feature_dim, hd_dim, seed) always reproduce the same matrix. It is
/// immutable after construction.
class Encoder {
 public:
  Encoder(Index feature_dim, Index hd_dim, std::uint64_t seed,
          double epsilon = 1e-12);

  /// Wraps a caller-supplied projection (externally generated or hand-built
  /// for tests). Such an encoder cannot be checkpointed by parameters alone.
  static Encoder fromProjection(Eigen::MatrixXd projection, double epsilon = 1e-12);

  Index featureDim() const { return projection_.rows(); }
  Index hdDim() const { return projection_.cols(); }
  std::uint64_t seed() const { return seed_; }
  double epsilon() const { return epsilon_; }
  bool seeded() const { return seeded_; }
  const Eigen::MatrixXd& projection() const { return projection_; }

  /// sign(normalize(z * M)) with normalize(v) = v / max(|v|_2, epsilon) and
  /// sign(v) = +1 for v >= 0, -1 otherwise. The positive divisor never flips
  /// a sign, so the signs are taken from z * M directly.
  Hypervector encode(const Eigen::Ref<const Eigen::VectorXf>& z) const;

  /// Encodes a block of feature rows; out is resized to feats.rows() x hdDim().
  /// Rows are independent, so the block may be split across `threads` workers.
  void encodeBatchInto(const Eigen::Ref<const RowMatrixXf>& feats,
                       SignMatrix& out, int threads = 1) const;

  SignMatrix encodeBatch(const Eigen::Ref<const RowMatrixXf>& feats,
                         int threads = 1) const;

 private:
  Encoder(Eigen::MatrixXd projection, std::uint64_t seed, double epsilon,
          bool seeded);

  Eigen::MatrixXd projection_;  // feature_dim x hd_dim
  std::uint64_t seed_;
  double epsilon_;
  bool seeded_;
};

}  // namespace hdseg

#endif  // HDSEG_ENCODER_HPP
