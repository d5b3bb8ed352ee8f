#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pdc/bitstream.hpp"
#include "pdc/diffusion.hpp"
#include "pdc/error.hpp"

namespace pdc {

struct RDPoint {
  Index t = 0;
  Index k = 0;  // K_t = K0 - t
  std::uint64_t bytes = 0;
  double bpp = 0.0;
  double psnr_db = 0.0;
  bool identical = false;
  double ssim = 0.0;
  double sse = 0.0;

  bool operator==(const RDPoint&) const = default;
};

enum class RestorerKind { None, Identity, NearestCentroid, Oracle };

struct SweepConfig {
  std::vector<std::filesystem::path> inputs;
  Index k0 = 64;
  std::vector<Index> severities;  // empty selects 0 .. K0-1
  QuantizerMode quantizer = QuantizerMode::FixedUnitRange;
  RestorerKind restorer = RestorerKind::None;
  ProjectionMode mode = ProjectionMode::HierarchyConsistent;
  std::uint64_t seed = 0;
  int threads = 1;
  int max_iters = 100;
  bool single_pass_kmeans = false;
  // Source pixels per latent cell along each axis; 1 for images coded directly.
  Index downsample = 1;
  std::filesystem::path output;

  /// Sorted, deduplicated severities; the full range when none were listed.
  std::vector<Index> resolved_severities() const;
  void validate() const;
};

/// Parses `key = value` lines; `#` starts a comment. Keys: input (repeatable or
/// comma separated), k0, severities (comma list or `all`), quantizer
/// (fixed|minmax), restorer (none|identity|nearest|oracle), mode (hc|nc), seed,
/// threads, max_iters, single_pass, downsample, output.
SweepConfig parse_sweep_config(std::string_view text);
SweepConfig load_sweep_config(const std::filesystem::path& path);

/// Metrics of one severity. The reconstruction is the decoded container,
/// optionally run through the reverse process, rounded to 8 bits. SSE is the
/// squared error of the exact chain rendering against the quantized input.
RDPoint measure_point(const ChainBuild& build, Severity t, RestorerKind restorer, ProjectionMode mode,
                      Index downsample = 1);

std::vector<RDPoint> sweep_chain(const ChainBuild& build, const std::vector<Index>& severities,
                                 RestorerKind restorer, ProjectionMode mode, Index downsample = 1);

struct SweepRow {
  std::string input;
  std::optional<RDPoint> point;  // empty for an error row
  ErrorCode error = ErrorCode::InvalidInput;
  std::string message;
};

/// Runs every input; a failing input yields one error row and the sweep goes on.
/// Rows are ordered by (input position, t). Writes the CSV when output is set.
std::vector<SweepRow> run_sweep(const SweepConfig& cfg);

std::string format_sweep_csv(const std::vector<SweepRow>& rows);

/// Loads a PNG as-is or an FTEN tensor through the configured quantizer.
ChainBuild build_chain_from_file(const std::filesystem::path& input, const EncoderOptions& opts);

}  // namespace pdc
