#pragma once

#include <vector>

#include <Eigen/Core>

#include "pdc/kmeans.hpp"
#include "pdc/tensor.hpp"

namespace pdc {

/// One bottom-up merge. `a` < `b` are entry ids in the palette the merge is
/// applied to. The merged entry takes id `a`; ids above `b` shift down by one.
struct MergeStep {
  Index a = 0;
  Index b = 0;
  Eigen::RowVectorXd centroid;  // size-weighted mean of the two entries
  Index size = 0;
  double delta_sse = 0.0;       // Ward cost n_a n_b / (n_a + n_b) |c_a - c_b|^2
};

/// Ward cost of merging two clusters.
template <typename A, typename B>
double ward_delta(const Eigen::MatrixBase<A>& ca, Index na, const Eigen::MatrixBase<B>& cb, Index nb) {
  const double wa = static_cast<double>(na);
  const double wb = static_cast<double>(nb);
  return wa * wb / (wa + wb) * (ca - cb).squaredNorm();
}

/// Markov chain of palettes K0, K0-1, ..., 1 obtained by Ward merges of a
/// base palette. Immutable once built.
class PaletteChain {
 public:
  PaletteChain(const Palette& base, const IndexMap& base_assignment);

  Index base_k() const noexcept { return base_.k(); }
  Index channels() const noexcept { return base_.channels(); }
  Index max_severity() const noexcept { return base_k() - 1; }
  Index width() const noexcept { return base_assignment_.width; }
  Index height() const noexcept { return base_assignment_.height; }

  const IndexMap& base_assignment() const noexcept { return base_assignment_; }
  const std::vector<MergeStep>& steps() const noexcept { return steps_; }

  /// Palette at severity t (K0 - t entries).
  const Palette& palette(Index t) const;
  /// Relabeling applied by merge step t (1-based): ids at t-1 -> ids at t.
  IndexVector relabel(Index t) const;
  /// Base entry id -> entry id at severity t.
  const IndexVector& base_to_level(Index t) const;
  /// Index map at severity t.
  IndexMap assignment(Index t) const;

 private:
  void check_severity(Index t) const;

  Palette base_;
  IndexMap base_assignment_;
  std::vector<MergeStep> steps_;
  std::vector<Palette> levels_;
  std::vector<IndexVector> base_to_level_;
};

PaletteChain build_merge_chain(const Palette& palette, const IndexMap& assignment);

}  // namespace pdc
