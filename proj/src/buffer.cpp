#include "hdseg/buffer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <ostream>
#include <string>

#include "hdseg/class_model.hpp"
#include "hdseg/data.hpp"
#include "hdseg/encoder.hpp"
#include "hdseg/errors.hpp"
#include "hdseg/parallel.hpp"
#include "hdseg/random.hpp"

namespace hdseg {

bool BufferSelection::contains(Index i) const {
  return std::binary_search(hard_indices.begin(), hard_indices.end(), i) ||
         std::binary_search(random_indices.begin(), random_indices.end(), i);
}

std::vector<Index> BufferSelection::unionAscending() const {
  std::vector<Index> merged(totalSize());
  std::merge(hard_indices.begin(), hard_indices.end(), random_indices.begin(),
             random_indices.end(), merged.begin());
  return merged;
}

LossStore::LossStore(Index num_points) {
  if (num_points < 0) throw ConfigError("loss store size must be >= 0");
  losses_ = Eigen::VectorXd::Zero(num_points);
}

void LossStore::initialize(const ClassModel& model, const LabeledFeatureSet& data,
                           const Encoder& encoder, int threads) {
  const Index n = data.numPoints();
  if (n != losses_.size()) {
    throw ContractError("init_losses: store holds " +
                        std::to_string(losses_.size()) + " entries, dataset has " +
                        std::to_string(n) + " points");
  }
  Eigen::VectorXd out = Eigen::VectorXd::Zero(n);
  parallelFor(n, threads, [&](Index begin, Index end) {
    constexpr Index kBlock = 256;
    SignMatrix block;
    Prediction pred;
    for (Index b = begin; b < end; b += kBlock) {
      const Index rows = std::min(kBlock, end - b);
      encoder.encodeBatchInto(data.features.middleRows(b, rows), block, 1);
      for (Index r = 0; r < rows; ++r) {
        const Index i = b + r;
        const std::int32_t y = data.labels[static_cast<std::size_t>(i)];
        if (y == kIgnoreLabel) continue;
        model.classifyInto(block.row(r).transpose(), pred);
        out[i] = ClassModel::lossFrom(pred, y);
      }
    }
  });
  losses_ = std::move(out);
  initialized_ = true;
}

void LossStore::assignAll(Eigen::VectorXd losses) {
  if (losses.size() != losses_.size()) {
    throw ContractError("loss store: assignAll size mismatch");
  }
  for (Index i = 0; i < losses.size(); ++i) {
    if (!(losses[i] >= 0.0) || !std::isfinite(losses[i])) {
      throw ContractError("loss store: losses must be finite and >= 0");
    }
  }
  losses_ = std::move(losses);
  initialized_ = true;
}

void LossStore::recordLosses(
    const BufferSelection& selection,
    const std::vector<std::pair<Index, double>>& new_losses) {
  // Validate everything before touching the store, so entries outside the
  // selection stay bit-identical even on a rejected update.
  for (const auto& [i, v] : new_losses) {
    if (i < 0 || i >= losses_.size() || !selection.contains(i)) {
      throw ContractError("record_losses: index " + std::to_string(i) +
                          " is outside the current buffer");
    }
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw ContractError("record_losses: loss for index " + std::to_string(i) +
                          " must be finite and >= 0");
    }
  }
  for (const auto& [i, v] : new_losses) losses_[i] = v;
}

BufferSelection selectRange(const LossStore& store, const BufferConfig& cfg,
                            int epoch, Index begin, Index end) {
  if (!store.initialized()) {
    throw StateError("select: loss store not initialized");
  }
  if (!(cfg.ratio_percent > 0.0) || cfg.ratio_percent > 100.0) {
    throw ConfigError("select: buffer ratio must lie in (0, 100], got " +
                      std::to_string(cfg.ratio_percent));
  }
  if (begin < 0 || end > store.size() || begin >= end) {
    throw ContractError("select: bad candidate range");
  }
  const Index n = end - begin;
  const Index half =
      static_cast<Index>(std::floor(static_cast<double>(n) *
                                    cfg.ratio_percent / 200.0));

  BufferSelection sel;
  std::vector<char> is_hard(static_cast<std::size_t>(n), 0);
  if (half > 0) {
    std::vector<Index> idx(static_cast<std::size_t>(n));
    std::iota(idx.begin(), idx.end(), begin);
    const auto harder = [&](Index a, Index b) {
      const double la = store.loss(a);
      const double lb = store.loss(b);
      if (la != lb) return la > lb;
      return a < b;
    };
    std::nth_element(idx.begin(), idx.begin() + (half - 1), idx.end(), harder);
    sel.hard_indices.assign(idx.begin(), idx.begin() + half);
    std::sort(sel.hard_indices.begin(), sel.hard_indices.end());
    for (Index i : sel.hard_indices) is_hard[static_cast<std::size_t>(i - begin)] = 1;
  }

  // k = 100 is the full-data degenerate case: the random half takes the whole
  // complement so the union covers every candidate even for odd N.
  const Index random_count = cfg.ratio_percent == 100.0 ? n - half : half;
  if (random_count > 0) {
    std::vector<Index> complement;
    complement.reserve(static_cast<std::size_t>(n - half));
    for (Index i = begin; i < end; ++i) {
      if (!is_hard[static_cast<std::size_t>(i - begin)]) complement.push_back(i);
    }
    std::mt19937_64 rng(mixSeed(cfg.seed, static_cast<std::uint64_t>(epoch),
                                static_cast<std::uint64_t>(begin)));
    for (Index i = 0; i < random_count; ++i) {
      const auto remaining = static_cast<std::uint64_t>(
          static_cast<Index>(complement.size()) - i);
      const Index j = i + static_cast<Index>(uniformBelow(rng, remaining));
      std::swap(complement[static_cast<std::size_t>(i)],
                complement[static_cast<std::size_t>(j)]);
    }
    sel.random_indices.assign(complement.begin(),
                              complement.begin() + random_count);
    std::sort(sel.random_indices.begin(), sel.random_indices.end());
  }
  return sel;
}

BufferSelection select(const LossStore& store, const BufferConfig& cfg,
                       int epoch) {
  return selectRange(store, cfg, epoch, 0, store.size());
}

void dumpLossesCsv(const LossStore& store, std::ostream& os) {
  os << "point_index,loss\n";
  char buf[64];
  for (Index i = 0; i < store.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%lld,%.9g\n", static_cast<long long>(i),
                  store.loss(i));
    os << buf;
  }
}

}  // namespace hdseg
