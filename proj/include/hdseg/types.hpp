#ifndef HDSEG_TYPES_HPP
#define HDSEG_TYPES_HPP

#include <Eigen/Core>

#include <cstdint>

namespace hdseg {

using Index = Eigen::Index;

// Per-point rows, so row-major keeps each point contiguous.
using RowMatrixXf =
    Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using RowMatrixXd =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using RowMatrixXi =
    Eigen::Matrix<std::int32_t, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Block of encoded points, one bipolar hypervector per row.
using SignMatrix =
    Eigen::Matrix<std::int8_t, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// A single encoded point: entries are exactly -1 or +1.
using Hypervector = Eigen::Matrix<std::int8_t, Eigen::Dynamic, 1>;

/// Extracted per-point features (z), length = Encoder::featureDim().
using FeatureVector = Eigen::VectorXf;

/// Label value marking points excluded from training updates and metrics.
inline constexpr std::int32_t kIgnoreLabel = -1;

}  // namespace hdseg

#endif  // HDSEG_TYPES_HPP
