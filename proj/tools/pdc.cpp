// Command-line front end for the palette diffusion codec.

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pdc/pdc.hpp"

namespace {

using namespace pdc;

struct LoadedInput {
  // Either an 8-bit image or a real-valued feature tensor.
  std::optional<QuantizedTensor> image;
  std::optional<FeatureTensor> features;
};

LoadedInput load_input(const std::string& path) {
  LoadedInput in;
  if (has_extension(path, ".png")) {
    ImageReadResult r = read_image(path);
    for (const auto& w : r.warnings) std::cerr << "warning: " << w << "\n";
    in.image = std::move(r.image);
  } else if (has_extension(path, ".ften")) {
    in.features = read_ften(path);
  } else {
    fail(ErrorCode::InvalidInput, "unsupported input type: " + path);
  }
  return in;
}

ChainBuild build_from(const LoadedInput& in, const EncoderOptions& opts) {
  if (in.image) {
    require(opts.quantizer == QuantizerMode::FixedUnitRange, ErrorCode::Config,
            "PNG input is already 8-bit; use the fixed quantizer");
    return build_chain(*in.image, opts);
  }
  return build_chain(*in.features, opts);
}

QuantizedTensor load_quantized(const std::string& path) {
  const LoadedInput in = load_input(path);
  if (in.image) return *in.image;
  return quantize(*in.features, QuantizerConfig::fixed_unit_range());
}

ProjectionMode parse_mode(const std::string& s) {
  if (s == "hc") return ProjectionMode::HierarchyConsistent;
  if (s == "nc") return ProjectionMode::NearestCentroid;
  fail(ErrorCode::Config, "unknown mode: " + s);
}

void write_output(const std::string& path, const FeatureTensor& values, const QuantizerConfig& quantizer) {
  const QuantizedTensor q = round_to_u8(values);
  if (has_extension(path, ".png")) {
    write_image(path, q);
  } else if (has_extension(path, ".ften")) {
    write_ften(path, dequantize(q, quantizer));
  } else {
    fail(ErrorCode::InvalidInput, "unsupported output type: " + path);
  }
}

int run_encode(const std::string& input, Index k0, Index t, const std::string& out, const EncoderOptions& base,
               Index downsample) {
  EncoderOptions opts = base;
  opts.k0 = k0;
  const LoadedInput in = load_input(input);
  const ChainBuild b = build_from(in, opts);
  require(t >= 0 && t < b.chain->base_k(), ErrorCode::Range,
          "severity must lie in 0.." + std::to_string(b.chain->base_k() - 1));
  const EncodedImage enc = encode_container(*b.chain, Severity(t), b.quantizer);
  write_file(out, enc.bytes);
  const double bpp = compute_bpp(enc.bytes.size(), b.chain->width() * downsample, b.chain->height() * downsample);
  std::printf("bytes=%zu K=%td bpp=%.6f\n", enc.bytes.size(), b.chain->base_k() - t, bpp);
  return 0;
}

int run_decode(const std::string& in_path, const std::string& out, const std::string& restorer,
               const std::string& mode_name, const EncoderOptions& base) {
  const ProjectionMode mode = parse_mode(mode_name);
  const DecodedImage dec = decode_container(read_file(in_path));
  const BitstreamHeader& h = dec.payload.header;
  FeatureTensor values = dec.values;
  if (restorer.rfind("oracle:", 0) == 0) {
    EncoderOptions opts = base;
    opts.k0 = h.k0;
    opts.quantizer = h.quantizer.mode;
    const LoadedInput ref = load_input(restorer.substr(7));
    ChainBuild b;
    if (ref.image) {
      b = build_chain(*ref.image, opts, h.quantizer);
    } else {
      b = build_chain(quantize(*ref.features, h.quantizer), opts, h.quantizer);
    }
    const DegradedState state = attach_chain(dec, b.chain);
    values = reverse_run(state, OracleRestorer::for_chain(b.chain), mode);
  } else if (restorer != "identity" && restorer != "nearest" && restorer != "none") {
    fail(ErrorCode::Config, "unknown restorer: " + restorer);
  }
  // Identity and nearest-centroid restorers have only the received palette to
  // work with, so the reverse process leaves the decoded rendering unchanged.
  write_output(out, values, h.quantizer);
  std::printf("severity=%u K=%td\n", unsigned{h.severity}, h.k_t());
  return 0;
}

int run_sweep_cmd(const std::string& config, const std::string& out) {
  SweepConfig cfg = load_sweep_config(config);
  if (!out.empty()) cfg.output = out;
  const std::vector<SweepRow> rows = run_sweep(cfg);
  int failed = 0;
  for (const auto& r : rows) {
    if (!r.point) {
      std::cerr << "error: " << r.input << ": " << r.message << "\n";
      ++failed;
    }
  }
  if (cfg.output.empty()) std::cout << format_sweep_csv(rows);
  std::fprintf(stderr, "%zu rows, %d failed inputs\n", rows.size(), failed);
  return 0;
}

int run_metrics(const std::string& ref, const std::string& test) {
  const QuantizedTensor a = load_quantized(ref);
  const QuantizedTensor b = load_quantized(test);
  const PsnrResult psnr = compute_psnr(a, b);
  std::printf("psnr_db=%.6f identical=%s mse=%.6f\n", psnr.db, psnr.identical ? "true" : "false", psnr.mse);
  if (a.width() >= kSsimWindow && a.height() >= kSsimWindow) {
    std::printf("ssim=%.9f\n", compute_ssim(a, b));
  } else {
    std::printf("ssim=n/a (smaller than the 8x8 window)\n");
  }
  return 0;
}

int run_distance(const std::vector<std::string>& as, const std::vector<std::string>& bs) {
  require(as.size() == bs.size(), ErrorCode::DimensionMismatch, "--a and --b need the same number of layers");
  std::vector<Spectrum> sa, sb;
  for (std::size_t i = 0; i < as.size(); ++i) {
    const FeatureTensor a = read_ften(as[i]);
    const FeatureTensor b = read_ften(bs[i]);
    require(a.same_shape(b), ErrorCode::DimensionMismatch, "layer " + std::to_string(i) + " shapes differ");
    sa.push_back(dft2_magnitude(a));
    sb.push_back(dft2_magnitude(b));
  }
  std::printf("distance=%.12f similarity=%.12f\n", perceptual_distance(sa, sb), perceptual_similarity(sa, sb));
  return 0;
}

int run_labels(const std::string& input, Index patch, const std::string& k_arg, Index k_max, std::uint64_t seed) {
  const FeatureTensor x = to_values(load_quantized(input));
  const PatchGrid grid = extract_patches(x, patch);
  if (grid.empty_warning) std::cerr << "warning: image smaller than one patch\n";
  require(!grid.patches.empty(), ErrorCode::InsufficientSize, "no full patch fits the image");
  Index k = 0;
  if (k_arg == "elbow") {
    const auto curve = label_distortion_curve(grid.patches, std::min<Index>(k_max, grid.patches.size()), seed);
    const ElbowResult e = elbow_select_k(curve);
    k = e.k;
    std::fprintf(stderr, "elbow k=%td%s\n", k, e.knee_found ? "" : " (no knee, smallest K)");
  } else {
    try {
      k = std::stol(k_arg);
    } catch (const std::exception&) {
      fail(ErrorCode::Config, "--k must be an integer or 'elbow'");
    }
  }
  const PseudoLabelSet labels = generate_pseudo_labels(grid.patches, k, seed);
  std::printf("row,column,label\n");
  for (Index i = 0; i < labels.patch_count(); ++i) {
    std::printf("%td,%td,%u\n", i / grid.columns, i % grid.columns, labels.labels(i));
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Palette diffusion codec: encode, decode and evaluate scalable palette bitstreams"};
  app.require_subcommand(1);

  EncoderOptions enc_opts;
  std::string quantizer = "fixed";
  int threads = 1;

  auto* encode = app.add_subcommand("encode", "Encode a PNG or FTEN input into a .pdc container");
  std::string enc_input, enc_out;
  Index k0 = 64, t = 0, downsample = 1;
  encode->add_option("--input", enc_input, "PNG image or FTEN tensor")->required();
  encode->add_option("--k0", k0, "Base palette size")->required();
  encode->add_option("--t", t, "Severity (number of merges)")->required();
  encode->add_option("--out", enc_out, "Output container")->required();
  encode->add_option("--seed", enc_opts.seed, "Clustering seed");
  encode->add_option("--quantizer", quantizer, "fixed or minmax")->check(CLI::IsMember({"fixed", "minmax"}));
  encode->add_flag("--single-pass-kmeans", enc_opts.single_pass_kmeans, "One assignment and update step");
  encode->add_option("--threads", threads, "Worker threads for clustering")->check(CLI::PositiveNumber);
  encode->add_option("--downsample", downsample, "Source pixels per latent cell along each axis, for bpp")
      ->check(CLI::PositiveNumber);

  auto* decode = app.add_subcommand("decode", "Decode a .pdc container to PNG or FTEN");
  std::string dec_in, dec_out, restorer = "none", mode = "hc";
  decode->add_option("--in", dec_in, "Input container")->required();
  decode->add_option("--out", dec_out, "PNG or FTEN output")->required();
  decode->add_option("--restorer", restorer, "none, identity, nearest or oracle:<png|ften>");
  decode->add_option("--mode", mode, "hc or nc")->check(CLI::IsMember({"hc", "nc"}));
  decode->add_option("--seed", enc_opts.seed, "Clustering seed used at encode time (oracle restorer)");
  decode->add_flag("--single-pass-kmeans", enc_opts.single_pass_kmeans, "Encoder used single-pass clustering");

  auto* sweep = app.add_subcommand("sweep", "Rate-distortion sweep over severities");
  std::string sweep_cfg, sweep_out;
  sweep->add_option("--config", sweep_cfg, "key = value configuration file")->required();
  sweep->add_option("--out", sweep_out, "CSV output (overrides the config)");

  auto* metrics = app.add_subcommand("metrics", "PSNR and SSIM between two images");
  std::string ref, test;
  metrics->add_option("--ref", ref, "Reference PNG or FTEN")->required();
  metrics->add_option("--test", test, "Test PNG or FTEN")->required();

  auto* distance = app.add_subcommand("distance", "Spectral perceptual distance between feature tensors");
  std::vector<std::string> da, db;
  distance->add_option("--a", da, "FTEN file per layer")->required();
  distance->add_option("--b", db, "FTEN file per layer")->required();

  auto* labels = app.add_subcommand("labels", "Patch pseudo-labels from spectral descriptors");
  std::string lab_input, lab_k;
  Index patch = 0, k_max = 8;
  std::uint64_t lab_seed = 0;
  labels->add_option("--input", lab_input, "PNG image")->required();
  labels->add_option("--patch", patch, "Patch side length")->required();
  labels->add_option("--k", lab_k, "Cluster count or 'elbow'")->required();
  labels->add_option("--k-max", k_max, "Largest K tried by the elbow search")->check(CLI::Range(3, 64));
  labels->add_option("--seed", lab_seed, "Clustering seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  enc_opts.quantizer = quantizer == "minmax" ? QuantizerMode::PerChannelMinMax : QuantizerMode::FixedUnitRange;
  enc_opts.threads = threads;
  try {
    if (*encode) return run_encode(enc_input, k0, t, enc_out, enc_opts, downsample);
    if (*decode) return run_decode(dec_in, dec_out, restorer, mode, enc_opts);
    if (*sweep) return run_sweep_cmd(sweep_cfg, sweep_out);
    if (*metrics) return run_metrics(ref, test);
    if (*distance) return run_distance(da, db);
    if (*labels) return run_labels(lab_input, patch, lab_k, k_max, lab_seed);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return static_cast<int>(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return static_cast<int>(ErrorCode::Io);
  }
  return 1;
}
