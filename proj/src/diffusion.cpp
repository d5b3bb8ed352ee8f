#include "pdc/diffusion.hpp"

#include <algorithm>

namespace pdc {

DegradedState degrade(std::shared_ptr<const PaletteChain> chain, Severity t) {
  require(chain != nullptr, ErrorCode::InvalidInput, "null chain");
  DegradedState s;
  s.severity = t;
  s.indices = chain->assignment(t.value());
  s.chain = std::move(chain);
  return s;
}

DegradedState degrade_step(const DegradedState& state) {
  require(state.chain != nullptr, ErrorCode::InvalidInput, "state has no chain");
  const Index next = state.severity.value() + 1;
  require(next <= state.chain->max_severity(), ErrorCode::Range,
          "state is already at the maximum severity " + std::to_string(state.chain->max_severity()));
  const IndexVector map = state.chain->relabel(next);
  DegradedState out{Severity(next), state.indices, state.chain};
  for (Index i = 0; i < out.indices.indices.size(); ++i) out.indices.indices(i) = map(out.indices.indices(i));
  return out;
}

FeatureTensor render_values(const Palette& palette, const IndexMap& indices) {
  FeatureTensor out(indices.width, indices.height, palette.channels());
  for (Index i = 0; i < indices.cells(); ++i) {
    const auto id = static_cast<Index>(indices.indices(i));
    require(id < palette.k(), ErrorCode::InvalidInput, "index outside palette");
    out.matrix().row(i) = palette.centroids.row(id);
  }
  return out;
}

FeatureTensor render_values(const DegradedState& state) { return render_values(state.palette(), state.indices); }

namespace {

void check_dims(const PaletteChain& chain, const FeatureTensor& z) {
  require(z.width() == chain.width() && z.height() == chain.height() && z.channels() == chain.channels(),
          ErrorCode::DimensionMismatch, "tensor shape does not match the chain's source");
}

bool is_rendering_at(const PaletteChain& chain, const FeatureTensor& z, Index s) {
  const Palette& p = chain.palette(s);
  const IndexVector& map = chain.base_to_level(s);
  const IndexVector& base = chain.base_assignment().indices;
  for (Index i = 0; i < z.cells(); ++i) {
    if (z.matrix().row(i) != p.centroids.row(map(base(i)))) return false;
  }
  return true;
}

}  // namespace

FeatureTensor project(const PaletteChain& chain, const FeatureTensor& z, Severity t, ProjectionMode mode) {
  check_dims(chain, z);
  const Palette& target = chain.palette(t.value());
  if (mode == ProjectionMode::NearestCentroid) {
    FeatureTensor out(z.width(), z.height(), z.channels());
    for (Index i = 0; i < z.cells(); ++i) {
      out.matrix().row(i) = target.centroids.row(nearest_centroid(z.matrix().row(i), target.centroids));
    }
    return out;
  }
  for (Index s = 0; s <= chain.max_severity(); ++s) {
    if (is_rendering_at(chain, z, s)) {
      const Index level = std::max(s, t.value());
      return render_values(chain.palette(level), chain.assignment(level));
    }
  }
  fail(ErrorCode::Consistency, "tensor is not a rendering of any chain state");
}

FeatureTensor NearestCentroidRestorer::restore(const FeatureTensor& z_t, Severity) const {
  return project(*chain_, z_t, Severity(0), ProjectionMode::NearestCentroid);
}

OracleRestorer OracleRestorer::for_chain(const std::shared_ptr<const PaletteChain>& chain) {
  return OracleRestorer(render_values(degrade(chain, Severity(0))));
}

FeatureTensor OracleRestorer::restore(const FeatureTensor& z_t, Severity) const {
  require(z_t.same_shape(z0_), ErrorCode::DimensionMismatch, "oracle tensor shape differs from the state");
  return z0_;
}

FeatureTensor SequenceRestorer::restore(const FeatureTensor& z_t, Severity t) const {
  require(t.value() >= 1 && t.value() <= static_cast<Index>(per_step_.size()), ErrorCode::Range,
          "no prediction supplied for step " + std::to_string(t.value()));
  const FeatureTensor& p = per_step_[static_cast<std::size_t>(t.value() - 1)];
  require(z_t.same_shape(p), ErrorCode::DimensionMismatch, "prediction shape differs from the state");
  return p;
}

FeatureTensor reverse_step(const PaletteChain& chain, const FeatureTensor& z_t, Severity t,
                           const Restorer& restorer, ProjectionMode mode) {
  require(t.value() >= 1, ErrorCode::Range, "reverse step needs severity >= 1");
  require(t.value() <= chain.max_severity(), ErrorCode::Range, "severity beyond the chain");
  check_dims(chain, z_t);
  const FeatureTensor z0_hat = restorer.restore(z_t, t);
  require(z0_hat.same_shape(z_t), ErrorCode::DimensionMismatch,
          "restorer '" + restorer.name() + "' changed the tensor shape");
  const FeatureTensor at_t = project(chain, z0_hat, t, mode);
  const FeatureTensor at_prev = project(chain, z0_hat, Severity(t.value() - 1), mode);
  FeatureTensor out(z_t.width(), z_t.height(), z_t.channels());
  out.matrix() = (z_t.matrix() - at_t.matrix()) + at_prev.matrix();
  return out;
}

FeatureTensor reverse_run(const DegradedState& state, const Restorer& restorer, ProjectionMode mode) {
  require(state.chain != nullptr, ErrorCode::InvalidInput, "state has no chain");
  FeatureTensor z = render_values(state);
  for (Index t = state.severity.value(); t >= 1; --t) {
    z = reverse_step(*state.chain, z, Severity(t), restorer, mode);
  }
  return z;
}

}  // namespace pdc
