#include "pdc/sweep.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <sstream>

#include "pdc/file_io.hpp"
#include "pdc/metrics.hpp"
#include "pdc/parallel.hpp"

namespace pdc {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_list(std::string_view s) {
  std::vector<std::string_view> out;
  while (true) {
    const auto comma = s.find(',');
    const std::string_view item = trim(s.substr(0, comma));
    if (!item.empty()) out.push_back(item);
    if (comma == std::string_view::npos) break;
    s.remove_prefix(comma + 1);
  }
  return out;
}

template <typename T>
T parse_number(std::string_view key, std::string_view v) {
  T out{};
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  require(ec == std::errc{} && ptr == v.data() + v.size(), ErrorCode::Config,
          "invalid number for " + std::string(key) + ": " + std::string(v));
  return out;
}

bool parse_bool(std::string_view key, std::string_view v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  fail(ErrorCode::Config, "invalid boolean for " + std::string(key) + ": " + std::string(v));
}

}  // namespace

std::vector<Index> SweepConfig::resolved_severities() const {
  std::vector<Index> out = severities;
  if (out.empty()) {
    out.resize(static_cast<std::size_t>(std::max<Index>(k0, 0)));
    for (Index t = 0; t < k0; ++t) out[static_cast<std::size_t>(t)] = t;
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

void SweepConfig::validate() const {
  require(!inputs.empty(), ErrorCode::Config, "sweep needs at least one input");
  require(k0 >= 1, ErrorCode::Config, "k0 must be >= 1");
  require(threads >= 1, ErrorCode::Config, "threads must be >= 1");
  require(max_iters >= 1, ErrorCode::Config, "max_iters must be >= 1");
  require(downsample >= 1, ErrorCode::Config, "downsample must be >= 1");
  for (Index t : severities) {
    require(t >= 0 && t < k0, ErrorCode::Config,
            "severity " + std::to_string(t) + " outside 0.." + std::to_string(k0 - 1));
  }
}

SweepConfig parse_sweep_config(std::string_view text) {
  SweepConfig cfg;
  bool all_severities = false;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    require(eq != std::string_view::npos, ErrorCode::Config,
            "line " + std::to_string(line_no) + ": expected key = value");
    const std::string_view key = trim(line.substr(0, eq));
    std::string_view value = trim(line.substr(eq + 1));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);

    if (key == "input") {
      for (auto item : split_list(value)) cfg.inputs.emplace_back(std::string(item));
    } else if (key == "k0") {
      cfg.k0 = parse_number<Index>(key, value);
    } else if (key == "severities") {
      if (value == "all") {
        all_severities = true;
      } else {
        for (auto item : split_list(value)) cfg.severities.push_back(parse_number<Index>(key, item));
      }
    } else if (key == "quantizer") {
      if (value == "fixed") cfg.quantizer = QuantizerMode::FixedUnitRange;
      else if (value == "minmax") cfg.quantizer = QuantizerMode::PerChannelMinMax;
      else fail(ErrorCode::Config, "unknown quantizer: " + std::string(value));
    } else if (key == "restorer") {
      if (value == "none") cfg.restorer = RestorerKind::None;
      else if (value == "identity") cfg.restorer = RestorerKind::Identity;
      else if (value == "nearest") cfg.restorer = RestorerKind::NearestCentroid;
      else if (value == "oracle") cfg.restorer = RestorerKind::Oracle;
      else fail(ErrorCode::Config, "unknown restorer: " + std::string(value));
    } else if (key == "mode") {
      if (value == "hc") cfg.mode = ProjectionMode::HierarchyConsistent;
      else if (value == "nc") cfg.mode = ProjectionMode::NearestCentroid;
      else fail(ErrorCode::Config, "unknown mode: " + std::string(value));
    } else if (key == "seed") {
      cfg.seed = parse_number<std::uint64_t>(key, value);
    } else if (key == "threads") {
      cfg.threads = parse_number<int>(key, value);
    } else if (key == "max_iters") {
      cfg.max_iters = parse_number<int>(key, value);
    } else if (key == "single_pass") {
      cfg.single_pass_kmeans = parse_bool(key, value);
    } else if (key == "downsample") {
      cfg.downsample = parse_number<Index>(key, value);
    } else if (key == "output") {
      cfg.output = std::string(value);
    } else {
      fail(ErrorCode::Config, "unknown key: " + std::string(key));
    }
  }
  if (all_severities) cfg.severities.clear();
  cfg.validate();
  return cfg;
}

SweepConfig load_sweep_config(const std::filesystem::path& path) {
  const std::vector<std::uint8_t> bytes = read_file(path);
  return parse_sweep_config(std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
}

RDPoint measure_point(const ChainBuild& build, Severity t, RestorerKind restorer, ProjectionMode mode,
                      Index downsample) {
  const PaletteChain& chain = *build.chain;
  const EncodedImage enc = encode_container(chain, t, build.quantizer);
  const DecodedImage dec = decode_container(enc.bytes);

  FeatureTensor recon;
  switch (restorer) {
    case RestorerKind::None:
      recon = dec.values;
      break;
    case RestorerKind::Identity:
      recon = reverse_run(attach_chain(dec, build.chain), IdentityRestorer{}, mode);
      break;
    case RestorerKind::NearestCentroid:
      recon = reverse_run(attach_chain(dec, build.chain), NearestCentroidRestorer(build.chain), mode);
      break;
    case RestorerKind::Oracle:
      recon = reverse_run(attach_chain(dec, build.chain), OracleRestorer::for_chain(build.chain), mode);
      break;
  }

  const QuantizedTensor recon_u8 = round_to_u8(recon);
  RDPoint p;
  p.t = t.value();
  p.k = chain.base_k() - t.value();
  p.bytes = enc.bytes.size();
  p.bpp = compute_bpp(p.bytes, chain.width() * downsample, chain.height() * downsample);
  const PsnrResult psnr = compute_psnr(build.quantized, recon_u8);
  p.psnr_db = psnr.db;
  p.identical = psnr.identical;
  p.ssim = compute_ssim(build.quantized, recon_u8);
  p.sse = sum_squared_error(to_values(build.quantized), render_values(degrade(build.chain, t)));
  return p;
}

std::vector<RDPoint> sweep_chain(const ChainBuild& build, const std::vector<Index>& severities,
                                 RestorerKind restorer, ProjectionMode mode, Index downsample) {
  std::vector<Index> ts = severities;
  std::sort(ts.begin(), ts.end());
  ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
  std::vector<RDPoint> out;
  out.reserve(ts.size());
  for (Index t : ts) out.push_back(measure_point(build, Severity(t), restorer, mode, downsample));
  return out;
}

ChainBuild build_chain_from_file(const std::filesystem::path& input, const EncoderOptions& opts) {
  if (has_extension(input, ".png")) {
    require(opts.quantizer == QuantizerMode::FixedUnitRange, ErrorCode::Config,
            "PNG input is already 8-bit; use the fixed quantizer");
    return build_chain(read_image(input).image, opts);
  }
  if (has_extension(input, ".ften")) return build_chain(read_ften(input), opts);
  fail(ErrorCode::InvalidInput, "unsupported input type: " + input.string());
}

std::vector<SweepRow> run_sweep(const SweepConfig& cfg) {
  cfg.validate();
  const std::vector<Index> ts = cfg.resolved_severities();
  EncoderOptions opts;
  opts.k0 = cfg.k0;
  opts.seed = cfg.seed;
  opts.quantizer = cfg.quantizer;
  opts.single_pass_kmeans = cfg.single_pass_kmeans;
  opts.max_iters = cfg.max_iters;

  const Index n = static_cast<Index>(cfg.inputs.size());
  std::vector<std::vector<SweepRow>> per_input(static_cast<std::size_t>(n));
  parallel_for(n, cfg.threads, [&](Index begin, Index end) {
    for (Index i = begin; i < end; ++i) {
      const std::string name = cfg.inputs[static_cast<std::size_t>(i)].string();
      auto& rows = per_input[static_cast<std::size_t>(i)];
      try {
        const ChainBuild build = build_chain_from_file(cfg.inputs[static_cast<std::size_t>(i)], opts);
        for (const RDPoint& p : sweep_chain(build, ts, cfg.restorer, cfg.mode, cfg.downsample)) {
          rows.push_back({name, p, {}, {}});
        }
      } catch (const Error& e) {
        rows.assign(1, {name, std::nullopt, e.code(), e.what()});
      } catch (const std::exception& e) {
        rows.assign(1, {name, std::nullopt, ErrorCode::Io, e.what()});
      }
    }
  });

  std::vector<SweepRow> out;
  for (auto& rows : per_input) std::move(rows.begin(), rows.end(), std::back_inserter(out));
  if (!cfg.output.empty()) {
    const std::string csv = format_sweep_csv(out);
    write_file(cfg.output, std::span(reinterpret_cast<const std::uint8_t*>(csv.data()), csv.size()));
  }
  return out;
}

std::string format_sweep_csv(const std::vector<SweepRow>& rows) {
  std::ostringstream os;
  os << "input,t,K,bpp,psnr_db,ssim,sse\n";
  char buf[256];
  for (const SweepRow& r : rows) {
    if (r.point) {
      const RDPoint& p = *r.point;
      std::snprintf(buf, sizeof buf, ",%td,%td,%.17g,%.17g,%.17g,%.17g\n", p.t, p.k, p.bpp, p.psnr_db, p.ssim,
                    p.sse);
      os << r.input << buf;
    } else {
      os << r.input << ",error," << to_string(r.error) << ",,,,\n";
    }
  }
  return os.str();
}

}  // namespace pdc
