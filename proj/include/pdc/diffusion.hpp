#pragma once

#include <compare>
#include <memory>
#include <string>
#include <vector>

#include "pdc/merge_chain.hpp"
#include "pdc/tensor.hpp"

namespace pdc {

/// Number of merges applied; the palette at severity t has K0 - t entries.
class Severity {
 public:
  constexpr Severity() = default;
  constexpr explicit Severity(Index t) : t_(t) {}
  constexpr Index value() const noexcept { return t_; }
  friend constexpr auto operator<=>(Severity, Severity) = default;

 private:
  Index t_ = 0;
};

/// Compressed representation at severity t: an index map into the chain's
/// severity-t palette.
struct DegradedState {
  Severity severity;
  IndexMap indices;
  std::shared_ptr<const PaletteChain> chain;

  const Palette& palette() const { return chain->palette(severity.value()); }
};

/// Forward operator C(z0, t).
DegradedState degrade(std::shared_ptr<const PaletteChain> chain, Severity t);
/// One forward step C_t applied to a state at severity t - 1.
DegradedState degrade_step(const DegradedState& state);

/// Per-cell centroid lookup.
FeatureTensor render_values(const DegradedState& state);
FeatureTensor render_values(const Palette& palette, const IndexMap& indices);

enum class ProjectionMode {
  /// Input must be a rendering of some chain state; stored assignments are reused.
  HierarchyConsistent,
  /// Each cell snaps to its nearest severity-t centroid (ties to the lower id).
  NearestCentroid,
};

/// C(z, t) for an arbitrary tensor. In hierarchy-consistent mode a rendering
/// at severity s maps to the rendering at max(s, t).
FeatureTensor project(const PaletteChain& chain, const FeatureTensor& z, Severity t, ProjectionMode mode);

/// Restoration operator R(z_t, t) ~ z0.
class Restorer {
 public:
  virtual ~Restorer() = default;
  virtual std::string name() const = 0;
  virtual FeatureTensor restore(const FeatureTensor& z_t, Severity t) const = 0;
};

class IdentityRestorer final : public Restorer {
 public:
  std::string name() const override { return "identity"; }
  FeatureTensor restore(const FeatureTensor& z_t, Severity) const override { return z_t; }
};

/// Snaps every cell to the nearest base (severity-0) centroid.
class NearestCentroidRestorer final : public Restorer {
 public:
  explicit NearestCentroidRestorer(std::shared_ptr<const PaletteChain> chain) : chain_(std::move(chain)) {}
  std::string name() const override { return "nearest"; }
  FeatureTensor restore(const FeatureTensor& z_t, Severity) const override;

 private:
  std::shared_ptr<const PaletteChain> chain_;
};

/// Always predicts the same tensor, typically the true z0.
class OracleRestorer final : public Restorer {
 public:
  explicit OracleRestorer(FeatureTensor z0) : z0_(std::move(z0)) {}
  /// Oracle for the chain's own base rendering.
  static OracleRestorer for_chain(const std::shared_ptr<const PaletteChain>& chain);
  std::string name() const override { return "oracle"; }
  FeatureTensor restore(const FeatureTensor& z_t, Severity t) const override;

 private:
  FeatureTensor z0_;
};

/// Externally produced predictions, one tensor per step t = 1..T.
class SequenceRestorer final : public Restorer {
 public:
  explicit SequenceRestorer(std::vector<FeatureTensor> per_step) : per_step_(std::move(per_step)) {}
  std::string name() const override { return "sequence"; }
  FeatureTensor restore(const FeatureTensor& z_t, Severity t) const override;

 private:
  std::vector<FeatureTensor> per_step_;
};

/// z_{t-1} = z_t - C(R(z_t, t), t) + C(R(z_t, t), t - 1).
FeatureTensor reverse_step(const PaletteChain& chain, const FeatureTensor& z_t, Severity t,
                           const Restorer& restorer, ProjectionMode mode);

/// Runs reverse_step from the state's severity down to 1.
FeatureTensor reverse_run(const DegradedState& state, const Restorer& restorer, ProjectionMode mode);

}  // namespace pdc
