#include "pdc/merge_chain.hpp"

#include <limits>
#include <string>

namespace pdc {

PaletteChain::PaletteChain(const Palette& base, const IndexMap& base_assignment)
    : base_(base), base_assignment_(base_assignment) {
  const Index k0 = base.k();
  require(k0 >= 1 && base.channels() >= 1, ErrorCode::InvalidInput, "palette must be non-empty");
  require(base.sizes.size() == k0, ErrorCode::InvalidInput, "one size per palette entry required");
  require(base_assignment.indices.size() == base_assignment.cells(), ErrorCode::InvalidInput,
          "index map size does not match its dimensions");
  Eigen::Matrix<Index, Eigen::Dynamic, 1> counts = Eigen::Matrix<Index, Eigen::Dynamic, 1>::Zero(k0);
  for (Index i = 0; i < base_assignment.indices.size(); ++i) {
    const auto id = static_cast<Index>(base_assignment.indices(i));
    require(id < k0, ErrorCode::InvalidInput, "index " + std::to_string(id) + " outside palette");
    ++counts(id);
  }
  require(counts == base.sizes, ErrorCode::InvalidInput, "palette sizes disagree with the index map");
  require((counts.array() > 0).all(), ErrorCode::InvalidInput, "every palette entry needs a member");

  // Slots keep their base id; the live slots in ascending order are the
  // palette at the current severity, so slot order equals id order.
  Eigen::MatrixXd cent = base.centroids;
  Eigen::Matrix<Index, Eigen::Dynamic, 1> size = base.sizes;
  std::vector<bool> live(static_cast<std::size_t>(k0), true);
  std::vector<Index> root(static_cast<std::size_t>(k0));
  for (Index i = 0; i < k0; ++i) root[static_cast<std::size_t>(i)] = i;
  Eigen::MatrixXd cost = Eigen::MatrixXd::Constant(k0, k0, std::numeric_limits<double>::infinity());
  for (Index i = 0; i < k0; ++i) {
    for (Index j = i + 1; j < k0; ++j) cost(i, j) = ward_delta(cent.row(i), size(i), cent.row(j), size(j));
  }

  auto snapshot = [&] {
    Palette p;
    const Index live_count = static_cast<Index>(std::count(live.begin(), live.end(), true));
    p.centroids.resize(live_count, cent.cols());
    p.sizes.resize(live_count);
    IndexVector position(k0);
    Index pos = 0;
    for (Index s = 0; s < k0; ++s) {
      if (!live[static_cast<std::size_t>(s)]) continue;
      p.centroids.row(pos) = cent.row(s);
      p.sizes(pos) = size(s);
      position(s) = static_cast<std::uint32_t>(pos++);
    }
    IndexVector map(k0);
    for (Index i = 0; i < k0; ++i) map(i) = position(root[static_cast<std::size_t>(i)]);
    levels_.push_back(std::move(p));
    base_to_level_.push_back(std::move(map));
    return position;
  };

  IndexVector position = snapshot();
  steps_.reserve(static_cast<std::size_t>(k0 - 1));
  for (Index step = 1; step < k0; ++step) {
    Index a = -1;
    Index b = -1;
    double best = std::numeric_limits<double>::infinity();
    for (Index i = 0; i < k0; ++i) {
      if (!live[static_cast<std::size_t>(i)]) continue;
      for (Index j = i + 1; j < k0; ++j) {
        if (!live[static_cast<std::size_t>(j)]) continue;
        if (a < 0 || cost(i, j) < best) {
          best = cost(i, j);
          a = i;
          b = j;
        }
      }
    }

    MergeStep m;
    m.a = position(a);
    m.b = position(b);
    m.size = size(a) + size(b);
    m.centroid = (static_cast<double>(size(a)) * cent.row(a) + static_cast<double>(size(b)) * cent.row(b)) /
                 static_cast<double>(m.size);
    m.delta_sse = best;
    steps_.push_back(m);

    cent.row(a) = m.centroid;
    size(a) = m.size;
    live[static_cast<std::size_t>(b)] = false;
    for (auto& r : root) {
      if (r == b) r = a;
    }
    for (Index i = 0; i < k0; ++i) {
      if (i == a || !live[static_cast<std::size_t>(i)]) continue;
      const double d = ward_delta(cent.row(a), size(a), cent.row(i), size(i));
      if (i < a) cost(i, a) = d;
      else cost(a, i) = d;
    }
    position = snapshot();
  }
}

void PaletteChain::check_severity(Index t) const {
  require(t >= 0 && t <= max_severity(), ErrorCode::Range,
          "severity " + std::to_string(t) + " outside [0, " + std::to_string(max_severity()) + "]");
}

const Palette& PaletteChain::palette(Index t) const {
  check_severity(t);
  return levels_[static_cast<std::size_t>(t)];
}

IndexVector PaletteChain::relabel(Index t) const {
  require(t >= 1 && t <= max_severity(), ErrorCode::Range, "merge step " + std::to_string(t) + " does not exist");
  const MergeStep& m = steps_[static_cast<std::size_t>(t - 1)];
  const Index k_prev = base_k() - (t - 1);
  IndexVector map(k_prev);
  for (Index i = 0; i < k_prev; ++i) {
    map(i) = static_cast<std::uint32_t>(i == m.b ? m.a : (i > m.b ? i - 1 : i));
  }
  return map;
}

const IndexVector& PaletteChain::base_to_level(Index t) const {
  check_severity(t);
  return base_to_level_[static_cast<std::size_t>(t)];
}

IndexMap PaletteChain::assignment(Index t) const {
  const IndexVector& map = base_to_level(t);
  IndexMap out{base_assignment_.width, base_assignment_.height, IndexVector(base_assignment_.indices.size())};
  for (Index i = 0; i < out.indices.size(); ++i) out.indices(i) = map(base_assignment_.indices(i));
  return out;
}

PaletteChain build_merge_chain(const Palette& palette, const IndexMap& assignment) {
  return PaletteChain(palette, assignment);
}

}  // namespace pdc
