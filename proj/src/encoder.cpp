#include "hdseg/encoder.hpp"

#include <string>
#include <utility>

#include "hdseg/errors.hpp"
#include "hdseg/parallel.hpp"
#include "hdseg/random.hpp"

namespace hdseg {

namespace {

Eigen::MatrixXd drawProjection(Index feature_dim, Index hd_dim,
                               std::uint64_t seed) {
  Eigen::MatrixXd m(feature_dim, hd_dim);
  NormalSampler sampler(seed);
  for (Index r = 0; r < feature_dim; ++r) {
    for (Index c = 0; c < hd_dim; ++c) {
      m(r, c) = sampler.next();
    }
  }
  return m;
}

inline std::int8_t signOf(double v) { return v >= 0.0 ? 1 : -1; }

}  // namespace

Encoder::Encoder(Index feature_dim, Index hd_dim, std::uint64_t seed,
                 double epsilon)
    : Encoder(Eigen::MatrixXd(), seed, epsilon, true) {
  if (feature_dim < 1 || hd_dim < 1) {
    throw ConfigError("encoder dimensions must be positive, got feature_dim=" +
                      std::to_string(feature_dim) +
                      " hd_dim=" + std::to_string(hd_dim));
  }
  projection_ = drawProjection(feature_dim, hd_dim, seed);
}

Encoder Encoder::fromProjection(Eigen::MatrixXd projection, double epsilon) {
  if (projection.rows() < 1 || projection.cols() < 1) {
    throw ConfigError("projection matrix must be non-empty");
  }
  return Encoder(std::move(projection), 0, epsilon, false);
}

Encoder::Encoder(Eigen::MatrixXd projection, std::uint64_t seed, double epsilon,
                 bool seeded)
    : projection_(std::move(projection)),
      seed_(seed),
      epsilon_(epsilon),
      seeded_(seeded) {
  if (!(epsilon > 0.0)) {
    throw ConfigError("encoder epsilon must be > 0");
  }
}

Hypervector Encoder::encode(const Eigen::Ref<const Eigen::VectorXf>& z) const {
  if (z.size() != featureDim()) {
    throw ContractError("encode: feature vector has length " +
                        std::to_string(z.size()) + ", expected " +
                        std::to_string(featureDim()));
  }
  if (!z.allFinite()) {
    throw ContractError("encode: feature vector contains non-finite entries");
  }
  const Eigen::VectorXd hv = projection_.transpose() * z.cast<double>();
  Hypervector out(hdDim());
  for (Index i = 0; i < hdDim(); ++i) out[i] = signOf(hv[i]);
  return out;
}

void Encoder::encodeBatchInto(const Eigen::Ref<const RowMatrixXf>& feats,
                              SignMatrix& out, int threads) const {
  if (feats.cols() != featureDim()) {
    throw ContractError("encodeBatch: feature rows have width " +
                        std::to_string(feats.cols()) + ", expected " +
                        std::to_string(featureDim()));
  }
  if (!feats.allFinite()) {
    throw ContractError("encodeBatch: features contain non-finite entries");
  }
  const Index n = feats.rows();
  const Index d = hdDim();
  out.resize(n, d);
  // Keep the per-worker double intermediate bounded.
  constexpr Index kSlab = 128;
  parallelFor(n, threads, [&](Index begin, Index end) {
    RowMatrixXd hv(std::min(kSlab, end - begin), d);
    for (Index b = begin; b < end; b += kSlab) {
      const Index rows = std::min(kSlab, end - b);
      hv.topRows(rows).noalias() =
          feats.middleRows(b, rows).cast<double>() * projection_;
      for (Index r = 0; r < rows; ++r) {
        std::int8_t* dst = out.data() + (b + r) * d;
        const double* src = hv.data() + r * d;
        for (Index c = 0; c < d; ++c) dst[c] = signOf(src[c]);
      }
    }
  });
}

SignMatrix Encoder::encodeBatch(const Eigen::Ref<const RowMatrixXf>& feats,
                                int threads) const {
  SignMatrix out;
  encodeBatchInto(feats, out, threads);
  return out;
}

}  // namespace hdseg
