// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "pdc/pdc.hpp"

using namespace pdc;

namespace {

struct Outcome {
  bool ok = true;
  std::string detail;
};

struct Criterion {
  int id;
  std::string name;
  double limit_s;  // 0 = no runtime limit
  std::function<Outcome()> run;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

FeatureTensor random_unit_tensor(std::mt19937_64& rng, Index w, Index h, Index c) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  FeatureTensor z(w, h, c);
  for (Index i = 0; i < z.size(); ++i) z.data()[i] = u(rng);
  return z;
}

Outcome telescoping() {
  std::mt19937_64 rng(101);
  long steps = 0, mismatches = 0, chains = 0;
  for (int n = 0; n < 100; ++n) {
    const FeatureTensor z = random_unit_tensor(rng, 16, 16, 3);
    for (Index k0 : {4, 8, 16}) {
      EncoderOptions o;
      o.k0 = k0;
      o.seed = static_cast<std::uint64_t>(n);
      const ChainBuild b = build_chain(z, o);
      const OracleRestorer r = OracleRestorer::for_chain(b.chain);
      ++chains;
      for (Index t = 1; t <= b.chain->max_severity(); ++t) {
        const FeatureTensor zt = render_values(degrade(b.chain, Severity(t)));
        const FeatureTensor out = reverse_step(*b.chain, zt, Severity(t), r, ProjectionMode::HierarchyConsistent);
        ++steps;
        if (!(out == render_values(degrade(b.chain, Severity(t - 1))))) ++mismatches;
      }
    }
  }
  return {mismatches == 0, fmt("%ld chains, %ld reverse steps, %ld not bit-exact", chains, steps, mismatches)};
}

Outcome monotonicity() {
  std::vector<std::pair<std::string, QuantizedTensor>> images;
  for (const auto& e : std::filesystem::directory_iterator(PDC_TEST_DATA)) {
    if (has_extension(e.path(), ".png")) images.emplace_back(e.path().filename().string(), read_image(e.path()).image);
  }
  const std::size_t natural = images.size();
  std::mt19937_64 rng(202);
  for (int v = 0; v < 6; ++v) images.emplace_back("gradient", oracle::gradient_image(48, 48, 3, v));
  for (int v = 0; v < 4; ++v) images.emplace_back("noise", oracle::random_image(rng, 40, 40, 3));
  for (int v = 0; v < 4; ++v) images.emplace_back("posterized", oracle::random_image(rng, 32, 32, 3, 5));
  long checks = 0, sse_bad = 0, bpp_bad = 0, decoded_bad = 0;
  for (const auto& [name, img] : images) {
    EncoderOptions o;
    o.k0 = std::min<Index>(64, count_distinct_cells(img));
    o.seed = 5;
    const ChainBuild b = build_chain(img, o);
    const FeatureTensor ref = to_values(img);
    double prev_sse = -1, prev_bpp = 1e300, prev_dec = -1;
    for (Index t = 0; t <= b.chain->max_severity(); ++t) {
      const double sse = sum_squared_error(ref, render_values(degrade(b.chain, Severity(t))));
      const EncodedImage enc = encode_container(*b.chain, Severity(t), b.quantizer);
      const double bpp = compute_bpp(enc.bytes.size(), img.width(), img.height());
      const double dec = sum_squared_error(ref, decode_container(enc.bytes).values);
      if (t > 0) {
        ++checks;
        if (sse < prev_sse) ++sse_bad;
        if (bpp > prev_bpp) ++bpp_bad;
        if (dec < prev_dec) ++decoded_bad;
      }
      prev_sse = sse;
      prev_bpp = bpp;
      prev_dec = dec;
    }
  }
  const bool ok = images.size() >= 20 && natural >= 8 && sse_bad == 0 && bpp_bad == 0 && decoded_bad == 0;
  return {ok, fmt("%zu images (%zu natural), %ld transitions; violations: sse %ld, bpp %ld, decoded sse %ld",
                  images.size(), natural, checks, sse_bad, bpp_bad, decoded_bad)};
}

Outcome clustering_oracle() {
  std::mt19937_64 rng(303);
  long instances = 0, exact_bad = 0, float_bad = 0;
  for (int n = 1; n <= 10; ++n) {
    for (int k = 1; k <= 3; ++k) {
      for (int trial = 0; trial < 60; ++trial) {
        // Cycle through wide, narrow and duplicate-heavy value ranges.
        const int range = trial % 3 == 0 ? 256 : (trial % 3 == 1 ? 20 : 4);
        QuantizedTensor q(n, 1, 1);
        std::vector<std::int64_t> x(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) x[static_cast<std::size_t>(i)] = q.data()[i] = static_cast<std::uint8_t>(rng() % range);
        if (count_distinct_cells(q) < k) continue;
        KMeansOptions o;
        o.k = k;
        o.init = InitMode::Exhaustive;
        const KMeansResult r = kmeans_palette(q, o);
        std::vector<int> labels(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) labels[static_cast<std::size_t>(i)] = static_cast<int>(r.assignment.indices(i));
        const std::int64_t got = oracle::scaled_partition_sse(x, labels, k);
        const std::int64_t best = oracle::brute_force_scaled_sse(x, k);
        ++instances;
        if (got != best) ++exact_bad;
        const double best_real = static_cast<double>(best) / static_cast<double>(oracle::kSseDenominator);
        if (std::abs(r.sse - best_real) > 1e-9 * std::max(1.0, best_real)) ++float_bad;
      }
    }
  }
  return {exact_bad == 0 && float_bad == 0,
          fmt("%ld instances (n<=10, K<=3): %ld exact-SSE mismatches, %ld reported-SSE mismatches", instances,
              exact_bad, float_bad)};
}

Outcome huffman_bounds() {
  std::mt19937_64 rng(404);
  long histos = 0, bound_bad = 0, trip_bad = 0;
  for (int trial = 0; trial < 1200; ++trial) {
    const std::size_t k = 1 + rng() % 64;
    std::vector<std::uint64_t> f(k);
    const int shape = trial % 3;
    for (std::size_t i = 0; i < k; ++i) {
      if (shape == 0) f[i] = rng() % 50;
      else if (shape == 1) f[i] = 1 + (rng() % 1000) / (1 + i * i);  // skewed
      else f[i] = rng() % 5 == 0 ? 1 + rng() % 2000 : rng() % 3;
    }
    f[rng() % k] += 1;
    const HuffmanTable t = huffman_build(f);
    std::vector<std::uint32_t> sym;
    for (std::uint32_t s = 0; s < k; ++s) sym.insert(sym.end(), f[s], s);
    std::shuffle(sym.begin(), sym.end(), rng);
    const BitBuffer bits = huffman_encode(sym, t);
    const double n = static_cast<double>(sym.size());
    const double h = oracle::entropy_bits(f);
    const double b = static_cast<double>(bits.bit_count);
    ++histos;
    if (b < n * h - 1e-9 * n || b > n * (h + 1.0) + 1e-9 * n) ++bound_bad;
    const IndexVector back = huffman_decode(bits.bytes, t, sym.size());
    bool same = back.size() == static_cast<Index>(sym.size());
    for (std::size_t i = 0; same && i < sym.size(); ++i) same = back(static_cast<Index>(i)) == sym[i];
    if (!same) ++trip_bad;
  }
  return {bound_bad == 0 && trip_bad == 0,
          fmt("%ld histograms: %ld outside [nH, n(H+1)], %ld round-trip failures", histos, bound_bad, trip_bad)};
}

Outcome fft_oracle() {
  std::mt19937_64 rng(505);
  std::normal_distribution<double> nd;
  double worst = 0, worst_shift = 0;
  int shapes = 0;
  for (Index h = 1; h <= 16; ++h) {
    for (Index w = 1; w <= 16; ++w) {
      FeatureTensor x(w, h, 1);
      for (Index i = 0; i < x.size(); ++i) x.data()[i] = nd(rng);
      const Eigen::MatrixXd ref = oracle::direct_dft2_magnitude(x, 0);
      const Spectrum s = dft2_magnitude(x);
      worst = std::max(worst, (s.channels[0] - ref).cwiseAbs().maxCoeff() / ref.maxCoeff());
      const Index dy = static_cast<Index>(rng() % 33) - 16, dx = static_cast<Index>(rng() % 33) - 16;
      worst_shift = std::max(worst_shift, perceptual_distance(x, circular_shift(x, dy, dx)));
      ++shapes;
    }
  }
  return {worst <= 1e-9 && worst_shift <= 1e-9,
          fmt("%d shapes up to 16x16: max error / max magnitude %.2e, max shift distance %.2e", shapes, worst,
              worst_shift)};
}

Outcome info_nce_forms() {
  std::mt19937_64 rng(606);
  std::normal_distribution<double> nd;
  double worst = 0;
  for (int k = 1; k <= 64; ++k) {
    ContrastiveBatch b;
    b.query = Eigen::VectorXd::NullaryExpr(8, [&] { return nd(rng); });
    b.positive = Eigen::VectorXd::NullaryExpr(8, [&] { return nd(rng); });
    b.negatives = b.positive.transpose().replicate(k, 1);
    b.temperature = 0.05 + 0.02 * k;
    worst = std::max(worst, std::abs(info_nce(b) - std::log(k + 1.0)));
  }
  ContrastiveBatch one;
  one.query = Eigen::VectorXd::Unit(2, 0);
  one.positive = Eigen::VectorXd::Unit(2, 0);
  one.negatives = Eigen::MatrixXd::Zero(1, 2);
  one.temperature = 1.0;
  const double single = std::abs(info_nce(one) - std::log(1.0 + std::exp(-1.0)));
  return {worst <= 1e-12 && single <= 1e-12,
          fmt("uniform K=1..64 max error %.2e; single negative error %.2e", worst, single)};
}

Outcome low_bitrate() {
  std::mt19937_64 rng(707);
  // Smooth 64x64x4 latent in [0, 1]: low-frequency sinusoids plus mild noise.
  FeatureTensor z(64, 64, 4);
  std::normal_distribution<double> nd(0.0, 0.02);
  for (Index y = 0; y < 64; ++y) {
    for (Index x = 0; x < 64; ++x) {
      for (Index c = 0; c < 4; ++c) {
        const double v = 0.5 + 0.3 * std::sin(0.07 * x * (c + 1) + 0.05 * y) + 0.15 * std::cos(0.11 * y - 0.3 * c) + nd(rng);
        z(y, x, c) = std::clamp(v, 0.0, 1.0);
      }
    }
  }
  const auto path = std::filesystem::temp_directory_path() / "pdc_acceptance_latent.ften";
  write_ften(path, z);
  EncoderOptions o;
  o.k0 = 64;
  o.seed = 1;
  const ChainBuild b = build_chain(read_ften(path), o);
  const Index t = b.chain->base_k() - 8;
  const EncodedImage enc = encode_container(*b.chain, Severity(t), b.quantizer);
  const double pixels = 512.0 * 512.0;
  const double bpp = compute_bpp(enc.bytes.size(), 512, 512);
  const double overhead_bits = 8.0 * static_cast<double>(enc.bytes.size() - enc.header.index_bytes) + 7.0;
  const double bound = (std::log2(8.0) + 1.0) / 64.0 + overhead_bits / pixels;
  return {bpp <= bound && bpp <= 0.20,
          fmt("K_t=8 on 64x64x4 latent: %zu bytes, %.5f bpp at 512x512 (bound %.5f, ceiling 0.20)", enc.bytes.size(),
              bpp, bound)};
}

Outcome determinism() {
  std::mt19937_64 rng(808);
  long inputs = 0, bad = 0;
  for (int n = 0; n < 50; ++n) {
    const Index w = 8 + static_cast<Index>(rng() % 40), h = 8 + static_cast<Index>(rng() % 40);
    const FeatureTensor z = random_unit_tensor(rng, w, h, 1 + static_cast<Index>(rng() % 4));
    EncoderOptions o;
    o.k0 = 4 + static_cast<Index>(rng() % 40);
    o.seed = rng();
    o.quantizer = n % 2 == 0 ? QuantizerMode::FixedUnitRange : QuantizerMode::PerChannelMinMax;
    const Index t = static_cast<Index>(rng() % static_cast<std::uint64_t>(o.k0));
    std::vector<std::uint8_t> first;
    bool same = true;
    for (int threads : {1, 1, 2, 4}) {
      o.threads = threads;
      const ChainBuild b = build_chain(z, o);
      const std::vector<std::uint8_t> bytes = encode_container(*b.chain, Severity(t), b.quantizer).bytes;
      const std::vector<std::uint8_t> again = serialize_container(decode_container(bytes).payload).bytes;
      if (first.empty()) first = bytes;
      same = same && bytes == first && again == first;
    }
    ++inputs;
    if (!same) ++bad;
  }
  return {bad == 0, fmt("%ld inputs x {1,1,2,4} threads: %ld non-identical re-encodes", inputs, bad)};
}

Outcome metrics_sanity() {
  QuantizedTensor zero(16, 16, 3), half(16, 16, 3), white(16, 16, 3);
  half.matrix().setConstant(128);
  white.matrix().setConstant(255);
  const double psnr = compute_psnr(zero, half).db;
  const double ssim = compute_ssim(zero, white);
  const double closed = (2.0 * 0.0 * 255.0 + kSsimC1) / (0.0 + 255.0 * 255.0 + kSsimC1);
  const double ssim_half = compute_ssim(half, white);
  const double closed_half = (2.0 * 128.0 * 255.0 + kSsimC1) / (128.0 * 128.0 + 255.0 * 255.0 + kSsimC1);
  return {std::abs(psnr - 5.987) <= 1e-3 && std::abs(ssim - closed) <= 1e-9 && std::abs(ssim_half - closed_half) <= 1e-9,
          fmt("PSNR(0,128) = %.6f dB; SSIM const error %.2e / %.2e", psnr, std::abs(ssim - closed),
              std::abs(ssim_half - closed_half))};
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "telescoping identity", 10, telescoping},
      {2, "severity monotonicity", 60, monotonicity},
      {3, "clustering oracle", 30, clustering_oracle},
      {4, "huffman bounds", 10, huffman_bounds},
      {5, "fft oracle", 10, fft_oracle},
      {6, "infonce closed forms", 0, info_nce_forms},
      {7, "low-bitrate feasibility", 0, low_bitrate},
      {8, "container determinism", 0, determinism},
      {9, "metrics sanity", 0, metrics_sanity},
  };
  int failed = 0;
  for (const Criterion& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = c.limit_s <= 0 || secs < c.limit_s;
    const bool ok = o.ok && in_time;
    if (!ok) ++failed;
    std::string timing = fmt("%.2fs", secs);
    if (c.limit_s > 0) timing += fmt(" < %.0fs", c.limit_s);
    std::printf("%s [%d] %s: %s (%s%s)\n", ok ? "PASS" : "FAIL", c.id, c.name.c_str(), o.detail.c_str(),
                timing.c_str(), in_time ? "" : ", over time limit");
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
