#include <gtest/gtest.h>

#include <cstdio>
#include <cstring>
#include <filesystem>
#include <random>

#include "handwash/image_ops.hpp"
#include "handwash/kernels.hpp"
#include "handwash/motion_gate.hpp"
#include "support/test_support.hpp"

using namespace handwash;
using handwash::kernels::KernelTable;

namespace {

const std::vector<std::size_t> kLengths = {0, 1, 2, 3, 7, 8, 9, 15, 16, 17, 31, 32, 33, 63, 64, 65, 100, 257, 1023, 4099};

}  // namespace

TEST(Kernels, ScalarIsAlwaysAvailableAndFirst) {
  const auto all = kernels::available_kernels();
  ASSERT_FALSE(all.empty());
  EXPECT_EQ(all.front(), &kernels::scalar_kernels());
}

TEST(Kernels, LumaMatchesFormula) {
  const std::uint8_t rgb[] = {255, 255, 255, 0, 0, 0, 255, 0, 0, 0, 255, 0, 0, 0, 255, 10, 20, 30};
  std::uint8_t y[6];
  kernels::scalar_kernels().luma_rgb(rgb, y, 6);
  EXPECT_EQ(y[0], 255);
  EXPECT_EQ(y[1], 0);
  EXPECT_EQ(y[2], (77 * 255 + 128) >> 8);
  EXPECT_EQ(y[3], (150 * 255 + 128) >> 8);
  EXPECT_EQ(y[4], (29 * 255 + 128) >> 8);
  EXPECT_EQ(y[5], (77 * 10 + 150 * 20 + 29 * 30 + 128) >> 8);
}

TEST(Kernels, SimdMatchesScalarBitForBit) {
  const KernelTable* simd = kernels::avx2_kernels();
  if (!simd) GTEST_SKIP() << "no SIMD variant on this machine";
  const KernelTable& ref = kernels::scalar_kernels();
  std::mt19937_64 rng(5);
  for (std::size_t n : kLengths) {
    std::vector<std::uint8_t> rgb(3 * n + 1);
    for (auto& v : rgb) v = static_cast<std::uint8_t>(rng());
    std::vector<std::uint8_t> ya(n + 1, 0xAB), yb(n + 1, 0xAB);
    ref.luma_rgb(rgb.data(), ya.data(), n);
    simd->luma_rgb(rgb.data(), yb.data(), n);
    ASSERT_EQ(ya, yb) << "luma n=" << n;

    std::vector<std::uint32_t> sa(n / 8 + 2, 3), sb(n / 8 + 2, 3);
    ref.accumulate_block_sums(rgb.data(), sa.data(), n);
    simd->accumulate_block_sums(rgb.data(), sb.data(), n);
    ASSERT_EQ(sa, sb) << "block sums n=" << n;

    std::vector<float> fa(n + 1, -1.f), fb(n + 1, -1.f);
    ref.u8_to_f32(rgb.data(), fa.data(), n);
    simd->u8_to_f32(rgb.data(), fb.data(), n);
    ASSERT_EQ(0, std::memcmp(fa.data(), fb.data(), fa.size() * sizeof(float))) << "u8_to_f32 n=" << n;

    const std::size_t src_n = n + 5;
    std::vector<float> src(src_n);
    std::uniform_real_distribution<float> val(-10.f, 300.f);
    for (auto& v : src) v = val(rng);
    std::vector<std::int32_t> i0(n), i1(n);
    std::vector<float> w0(n), w1(n);
    std::uniform_real_distribution<float> w(0.f, 1.f);
    for (std::size_t j = 0; j < n; ++j) {
      i0[j] = static_cast<std::int32_t>(rng() % src_n);
      i1[j] = static_cast<std::int32_t>(rng() % src_n);
      w1[j] = w(rng);
      w0[j] = 1.f - w1[j];
    }
    std::vector<float> ga(n + 1, 0.f), gb(n + 1, 0.f);
    ref.gather_lerp(src.data(), i0.data(), i1.data(), w0.data(), w1.data(), ga.data(), n);
    simd->gather_lerp(src.data(), i0.data(), i1.data(), w0.data(), w1.data(), gb.data(), n);
    ASSERT_EQ(0, std::memcmp(ga.data(), gb.data(), ga.size() * sizeof(float))) << "gather_lerp n=" << n;

    std::vector<float> la(n + 1, 0.f), lb(n + 1, 0.f);
    ref.lerp_rows(src.data(), src.data() + 5, 0.3f, 0.7f, la.data(), n);
    simd->lerp_rows(src.data(), src.data() + 5, 0.3f, 0.7f, lb.data(), n);
    ASSERT_EQ(0, std::memcmp(la.data(), lb.data(), la.size() * sizeof(float))) << "lerp_rows n=" << n;

    std::vector<float> q(n);
    for (std::size_t j = 0; j < n; ++j) {
      // Include exact halves and out-of-range values.
      q[j] = (rng() % 4 == 0) ? static_cast<float>(static_cast<int>(rng() % 300) - 20) + 0.5f : val(rng);
    }
    std::vector<std::uint8_t> qa(n + 1, 7), qb(n + 1, 7);
    ref.quantize_u8(q.data(), qa.data(), n);
    simd->quantize_u8(q.data(), qb.data(), n);
    ASSERT_EQ(qa, qb) << "quantize n=" << n;
  }
}

TEST(Kernels, QuantizeRoundsHalfUpAndClamps) {
  const float in[] = {-3.f, 0.49f, 0.5f, 1.5f, 2.5f, 254.5f, 255.4f, 1000.f};
  std::uint8_t out[8];
  kernels::scalar_kernels().quantize_u8(in, out, 8);
  const std::uint8_t expected[] = {0, 0, 1, 2, 3, 255, 255, 255};
  for (int i = 0; i < 8; ++i) EXPECT_EQ(out[i], expected[i]) << i;
}

TEST(Kernels, FrameOperationsAgreeAcrossVariants) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 40; ++trial) {
    const int w = 1 + static_cast<int>(rng() % 200);
    const int h = 1 + static_cast<int>(rng() % 120);
    const int c = (trial % 3 == 0) ? 1 : 3;
    Frame a(w, h, c);
    Frame b(w, h, c);
    for (auto& v : a.data) v = static_cast<std::uint8_t>(rng());
    for (auto& v : b.data) v = static_cast<std::uint8_t>(rng());
    const int ow = 1 + static_cast<int>(rng() % 150);
    const int oh = 1 + static_cast<int>(rng() % 150);
    const double ref_score = motion_score(a, b, kernels::scalar_kernels());
    const Frame ref_resized = resize_bilinear(a, ow, oh, kernels::scalar_kernels());
    for (const KernelTable* k : kernels::available_kernels()) {
      EXPECT_EQ(motion_score(a, b, *k), ref_score) << k->name;
      EXPECT_EQ(resize_bilinear(a, ow, oh, *k), ref_resized) << k->name;
    }
  }
}

TEST(Kernels, ReportActive) { std::printf("active kernels: %s\n", kernels::active_kernels().name); }

TEST(Kernels, ForceScalarEnvironmentPinsReference) {
  const std::string self = std::filesystem::read_symlink("/proc/self/exe").string();
  const auto forced =
      testkit::run_command("HANDWASH_FORCE_SCALAR=1 '" + self + "' --gtest_filter=Kernels.ReportActive");
  EXPECT_NE(forced.out.find("active kernels: scalar"), std::string::npos) << forced.out;
  if (kernels::avx2_kernels() && !std::getenv("HANDWASH_FORCE_SCALAR")) {
    EXPECT_STREQ(kernels::active_kernels().name, kernels::avx2_kernels()->name);
  }
}
