#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "oracles.hpp"
#include "pdc/file_io.hpp"
#include "pdc/metrics.hpp"
#include "pdc/sweep.hpp"

using namespace pdc;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an error";
  return ErrorCode::InvalidInput;
}

QuantizedTensor constant_image(Index w, Index h, Index c, std::uint8_t v) {
  QuantizedTensor q(w, h, c);
  q.matrix().setConstant(v);
  return q;
}

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "pdc_rd_test";
  std::filesystem::create_directories(dir);
  return dir / name;
}

// Reference SSIM with the window statistics written out in two passes.
double reference_ssim(const QuantizedTensor& a, const QuantizedTensor& b) {
  const double c1 = std::pow(0.01 * 255, 2), c2 = std::pow(0.03 * 255, 2);
  double total = 0;
  for (Index c = 0; c < a.channels(); ++c) {
    double acc = 0;
    Index count = 0;
    for (Index y0 = 0; y0 + 8 <= a.height(); ++y0) {
      for (Index x0 = 0; x0 + 8 <= a.width(); ++x0) {
        double ma = 0, mb = 0;
        for (Index y = 0; y < 8; ++y)
          for (Index x = 0; x < 8; ++x) {
            ma += a(y0 + y, x0 + x, c);
            mb += b(y0 + y, x0 + x, c);
          }
        ma /= 64;
        mb /= 64;
        double va = 0, vb = 0, cov = 0;
        for (Index y = 0; y < 8; ++y)
          for (Index x = 0; x < 8; ++x) {
            const double da = a(y0 + y, x0 + x, c) - ma, db = b(y0 + y, x0 + x, c) - mb;
            va += da * da;
            vb += db * db;
            cov += da * db;
          }
        va /= 64;
        vb /= 64;
        cov /= 64;
        acc += (2 * ma * mb + c1) * (2 * cov + c2) / ((ma * ma + mb * mb + c1) * (va + vb + c2));
        ++count;
      }
    }
    total += acc / static_cast<double>(count);
  }
  return total / static_cast<double>(a.channels());
}

}  // namespace

TEST(Psnr, ClosedFormsAndSentinel) {
  const QuantizedTensor zero = constant_image(4, 4, 3, 0), half = constant_image(4, 4, 3, 128);
  const PsnrResult r = compute_psnr(zero, half);
  EXPECT_EQ(r.mse, 16384.0);
  EXPECT_NEAR(r.db, 5.987, 1e-3);
  EXPECT_NEAR(r.db, 10.0 * std::log10(65025.0 / 16384.0), 1e-12);
  EXPECT_FALSE(r.identical);
  EXPECT_EQ(compute_psnr(half, zero).db, r.db);
  const PsnrResult same = compute_psnr(half, half);
  EXPECT_TRUE(same.identical);
  EXPECT_EQ(same.db, kPsnrIdenticalDb);
  EXPECT_EQ(code_of([&] { compute_psnr(zero, constant_image(4, 4, 1, 0)); }), ErrorCode::DimensionMismatch);
}

TEST(Ssim, ClosedFormsAndReference) {
  const QuantizedTensor black = constant_image(8, 8, 1, 0), white = constant_image(8, 8, 1, 255);
  const double expected = kSsimC1 / (255.0 * 255.0 + kSsimC1);
  EXPECT_NEAR(compute_ssim(black, white), expected, 1e-12);
  EXPECT_NEAR(compute_ssim(black, white), 1.0e-4, 1e-6);

  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 5; ++trial) {
    const QuantizedTensor a = oracle::random_image(rng, 12, 10, 3);
    const QuantizedTensor b = oracle::random_image(rng, 12, 10, 3);
    EXPECT_EQ(compute_ssim(a, a), 1.0);
    EXPECT_NEAR(compute_ssim(a, b), reference_ssim(a, b), 1e-9);
    EXPECT_EQ(compute_ssim(a, b), compute_ssim(b, a));
    EXPECT_GE(compute_ssim(a, b), -1.0);
    EXPECT_LE(compute_ssim(a, b), 1.0);
  }
  EXPECT_EQ(code_of([] { compute_ssim(QuantizedTensor(7, 20, 1), QuantizedTensor(7, 20, 1)); }),
            ErrorCode::InsufficientSize);
}

TEST(Bpp, Arithmetic) {
  EXPECT_EQ(compute_bpp(4800, 640, 480), 0.125);
  EXPECT_EQ(compute_bpp(9600, 640, 480), 0.25);
}

TEST(SweepConfig, ParsesKeysAndRejectsUnknown) {
  const SweepConfig c = parse_sweep_config(
      "# comment\n"
      "input = a.png, b.ften\n"
      "input = c.png\n"
      "k0 = 16\n"
      "severities = 9, 1, 4, 1   # trailing comment\n"
      "quantizer = minmax\n"
      "restorer = oracle\n"
      "mode = nc\n"
      "seed = 42\n"
      "threads = 2\n"
      "single_pass = true\n"
      "downsample = 8\n"
      "output = out.csv\n");
  EXPECT_EQ(c.inputs.size(), 3u);
  EXPECT_EQ(c.k0, 16);
  EXPECT_EQ(c.resolved_severities(), (std::vector<Index>{1, 4, 9}));
  EXPECT_EQ(c.quantizer, QuantizerMode::PerChannelMinMax);
  EXPECT_EQ(c.restorer, RestorerKind::Oracle);
  EXPECT_EQ(c.mode, ProjectionMode::NearestCentroid);
  EXPECT_EQ(c.seed, 42u);
  EXPECT_EQ(c.threads, 2);
  EXPECT_TRUE(c.single_pass_kmeans);
  EXPECT_EQ(c.downsample, 8);
  EXPECT_EQ(c.output, "out.csv");

  const SweepConfig all = parse_sweep_config("input = x.png\nk0 = 5\nseverities = all\n");
  EXPECT_EQ(all.resolved_severities(), (std::vector<Index>{0, 1, 2, 3, 4}));
  EXPECT_EQ(code_of([] { parse_sweep_config("input = x.png\ncolour = red\n"); }), ErrorCode::Config);
  EXPECT_EQ(code_of([] { parse_sweep_config("input = x.png\nk0 = 4\nseverities = 4\n"); }), ErrorCode::Config);
  EXPECT_EQ(code_of([] { parse_sweep_config("k0 = 4\n"); }), ErrorCode::Config);
  EXPECT_EQ(code_of([] { parse_sweep_config("input = x.png\nk0 = four\n"); }), ErrorCode::Config);
}

// A three-severity sweep agrees with calling encode, decode and the metrics
// one by one.
TEST(Sweep, MatchesIndividualOps) {
  const QuantizedTensor img = oracle::gradient_image(64, 64, 3);
  EncoderOptions o;
  o.k0 = 32;
  o.seed = 3;
  const ChainBuild b = build_chain(img, o);
  const std::vector<Index> ts{20, 2, 9};
  const std::vector<RDPoint> pts = sweep_chain(b, ts, RestorerKind::None, ProjectionMode::HierarchyConsistent);
  ASSERT_EQ(pts.size(), 3u);
  const Index sorted[] = {2, 9, 20};
  for (std::size_t i = 0; i < 3; ++i) {
    const Index t = sorted[i];
    const EncodedImage enc = encode_container(*b.chain, Severity(t), b.quantizer);
    const QuantizedTensor recon = round_to_u8(decode_container(enc.bytes).values);
    EXPECT_EQ(pts[i].t, t);
    EXPECT_EQ(pts[i].k, 32 - t);
    EXPECT_EQ(pts[i].bytes, enc.bytes.size());
    EXPECT_EQ(pts[i].bpp, 8.0 * static_cast<double>(enc.bytes.size()) / (64.0 * 64.0));
    EXPECT_EQ(pts[i].psnr_db, compute_psnr(img, recon).db);
    EXPECT_EQ(pts[i].ssim, compute_ssim(img, recon));
    const double sse = (to_values(img).matrix() - render_values(degrade(b.chain, Severity(t))).matrix()).squaredNorm();
    EXPECT_EQ(pts[i].sse, sse);
  }
}

TEST(Sweep, MonotoneOnNaturalAndSyntheticImages) {
  std::vector<QuantizedTensor> images;
  for (const auto& e : std::filesystem::directory_iterator(PDC_TEST_DATA)) {
    if (has_extension(e.path(), ".png")) images.push_back(read_image(e.path()).image);
  }
  ASSERT_GE(images.size(), 8u);
  images.push_back(oracle::gradient_image(40, 40, 3, 1));
  for (const QuantizedTensor& img : images) {
    EncoderOptions o;
    o.k0 = 24;
    const ChainBuild b = build_chain(img, o);
    std::vector<Index> ts(24);
    for (Index t = 0; t < 24; ++t) ts[static_cast<std::size_t>(t)] = t;
    const auto pts = sweep_chain(b, ts, RestorerKind::None, ProjectionMode::HierarchyConsistent);
    for (std::size_t i = 1; i < pts.size(); ++i) {
      EXPECT_LE(pts[i].bpp, pts[i - 1].bpp);
      EXPECT_LE(pts[i].psnr_db, pts[i - 1].psnr_db);
      EXPECT_GE(pts[i].sse, pts[i - 1].sse);
    }
    for (const auto& p : pts) {
      EXPECT_GT(p.bpp, 0.0);
      EXPECT_GE(p.ssim, 0.0);
      EXPECT_LE(p.ssim, 1.0);
    }
  }
}

TEST(Sweep, OracleRestorerRecoversBaseQuality) {
  const QuantizedTensor img = oracle::gradient_image(32, 32, 3, 2);
  EncoderOptions o;
  o.k0 = 16;
  const ChainBuild b = build_chain(img, o);
  const auto oracle_pts = sweep_chain(b, {0, 5, 15}, RestorerKind::Oracle, ProjectionMode::HierarchyConsistent);
  const auto base = sweep_chain(b, {0}, RestorerKind::None, ProjectionMode::HierarchyConsistent);
  for (const auto& p : oracle_pts) {
    // The oracle path runs on the exact chain; the base container rounds its palette.
    EXPECT_GE(p.psnr_db, base[0].psnr_db - 1e-9);
  }
  const auto identity = sweep_chain(b, {5}, RestorerKind::Identity, ProjectionMode::HierarchyConsistent);
  const auto none = sweep_chain(b, {5}, RestorerKind::None, ProjectionMode::HierarchyConsistent);
  EXPECT_NEAR(identity[0].psnr_db, none[0].psnr_db, 0.5);
}

TEST(Sweep, OrderAndThreadIndependenceWithErrorRows) {
  const auto a = scratch("grad_a.png");
  const auto b = scratch("grad_b.png");
  write_image(a, oracle::gradient_image(24, 24, 3, 0));
  write_image(b, oracle::gradient_image(24, 24, 3, 4));
  const auto bad = scratch("missing.png");
  std::filesystem::remove(bad);
  const auto flat = scratch("flat.png");
  write_image(flat, constant_image(16, 16, 3, 7));

  SweepConfig c;
  c.inputs = {a, bad, b, flat};
  c.k0 = 12;
  c.severities = {11, 0, 5, 3};
  c.seed = 7;
  c.output = scratch("out.csv");
  const auto rows = run_sweep(c);
  SweepConfig d = c;
  d.severities = {3, 5, 11, 0, 5};
  d.threads = 3;
  d.output = scratch("out2.csv");
  const auto rows2 = run_sweep(d);
  ASSERT_EQ(rows.size(), rows2.size());
  ASSERT_EQ(rows.size(), 4u + 1u + 4u + 1u);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    EXPECT_EQ(rows[i].input, rows2[i].input);
    EXPECT_EQ(rows[i].point, rows2[i].point);
  }
  EXPECT_FALSE(rows[4].point.has_value());
  EXPECT_EQ(rows[4].error, ErrorCode::Io);
  EXPECT_FALSE(rows[9].point.has_value());
  EXPECT_EQ(rows[9].error, ErrorCode::Infeasible);
  EXPECT_EQ(rows[0].point->t, 0);
  EXPECT_EQ(rows[3].point->t, 11);

  std::ifstream f1(c.output), f2(d.output);
  const std::string s1((std::istreambuf_iterator<char>(f1)), {}), s2((std::istreambuf_iterator<char>(f2)), {});
  EXPECT_EQ(s1, s2);
  EXPECT_EQ(s1.substr(0, s1.find('\n')), "input,t,K,bpp,psnr_db,ssim,sse");
  EXPECT_NE(s1.find(bad.string() + ",error,io,,,,"), std::string::npos);
}

TEST(Sweep, DownsampledLatentUsesSourceDenominator) {
  std::mt19937_64 rng(4);
  FeatureTensor z(16, 16, 4);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (Index i = 0; i < z.size(); ++i) z.data()[i] = u(rng);
  EncoderOptions o;
  o.k0 = 8;
  const ChainBuild b = build_chain(z, o);
  const RDPoint p1 = measure_point(b, Severity(2), RestorerKind::None, ProjectionMode::HierarchyConsistent, 1);
  const RDPoint p8 = measure_point(b, Severity(2), RestorerKind::None, ProjectionMode::HierarchyConsistent, 8);
  EXPECT_EQ(p1.bytes, p8.bytes);
  EXPECT_DOUBLE_EQ(p1.bpp, 64.0 * p8.bpp);
}
