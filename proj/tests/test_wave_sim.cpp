#include <numeric>

#include "corpus.hpp"
#include "doctest.h"
#include "mlt/wave_sim.hpp"

using namespace mlt;

namespace {

// flags[t] for t >= 1 packed as the codec does.
std::vector<std::uint32_t> pack(const std::vector<bool>& flags) {
  std::vector<std::uint32_t> words((flags.size() + 30) / 32, 0);
  for (std::size_t t = 1; t < flags.size(); ++t) {
    if (flags[t]) words[(t - 1) / 32] |= 1u << ((t - 1) % 32);
  }
  return words;
}

std::optional<std::uint32_t> linear_scan(const std::vector<bool>& flags, std::uint32_t t) {
  for (std::uint32_t j = t - 1; j >= 1; --j) {
    if (flags[j] != flags[t]) return j;
  }
  return std::nullopt;
}

// Length of the run of equal flags ending at t (t included).
std::uint32_t run_ending_at(const std::vector<bool>& flags, std::uint32_t t) {
  std::uint32_t n = 1;
  while (t - n >= 1 && flags[t - n] == flags[t]) ++n;
  return n;
}

GtsStream random_stream(corpus::Rng& rng, std::uint32_t triangles, double p_right, std::size_t vertex_count) {
  GtsStream s;
  s.triangle_count = triangles;
  s.flag_words.assign(flag_word_count(triangles), 0);
  std::bernoulli_distribution right(p_right);
  std::uniform_int_distribution<int> index(0, static_cast<int>(vertex_count) - 1);
  for (std::uint32_t t = 1; t < triangles; ++t) {
    if (right(rng)) s.flag_words[(t - 1) / 32] |= 1u << ((t - 1) % 32);
    s.indices.push_back(static_cast<std::uint8_t>(index(rng)));
  }
  return s;
}

}  // namespace

TEST_CASE("bit primitives") {
  CHECK(firstbithigh(0x80000000u) == 31);
  CHECK(firstbithigh(0x00000001u) == 0);
  CHECK_FALSE(firstbithigh(0u).has_value());
  CHECK(firstbithigh(0x00F0F000u) == 23);
  CHECK(countbits(0xFFFFFFFFu) == 32);
  CHECK(countbits(0u) == 0);
  CHECK(countbits(0x0000FF00u) == 8);
}

TEST_CASE("wave configuration") {
  CHECK_NOTHROW(WaveConfig{32}.validate());
  CHECK_NOTHROW(WaveConfig{64}.validate());
  CHECK_THROWS_AS(WaveConfig{48}.validate(), std::invalid_argument);
}

TEST_CASE("lookback examples") {
  // flags [., R, R, L, R, R]
  std::vector<bool> flags{false, true, true, false, true, true};
  auto words = pack(flags);
  auto r = parallel_index_lookback(words, 5);
  CHECK(r.source == 3u);
  CHECK(r.fallback_iterations == 0);

  std::vector<bool> uniform(20, false);
  for (std::uint32_t t = 1; t < 20; ++t) CHECK_FALSE(parallel_index_lookback(pack(uniform), t).source.has_value());

  // Triangle 8 depends on triangle 4.
  std::vector<bool> eight{false, false, false, false, true, false, false, false, false};
  auto l8 = parallel_index_lookback(pack(eight), 8);
  CHECK(l8.source == 4u);
}

TEST_CASE("lookback matches a linear scan on every 16-bit pattern") {
  for (std::uint32_t pattern = 0; pattern < (1u << 16); ++pattern) {
    std::vector<bool> flags(17, false);
    for (int k = 0; k < 16; ++k) flags[k + 1] = pattern >> k & 1;
    auto words = pack(flags);
    for (std::uint32_t t = 1; t <= 16; ++t) {
      auto got = parallel_index_lookback(words, t);
      if (got.source != linear_scan(flags, t)) {
        FAIL_CHECK("pattern " << pattern << " t " << t);
      }
      if (got.fallback_iterations != 0) FAIL_CHECK("unexpected fallback");
    }
  }
}

TEST_CASE("lookback across word boundaries") {
  corpus::Rng rng(12);
  for (double p : {0.5, 0.05, 0.01, 0.0}) {
    std::bernoulli_distribution bit(p);
    for (int rep = 0; rep < 20; ++rep) {
      std::vector<bool> flags(256);
      for (std::size_t t = 1; t < flags.size(); ++t) flags[t] = bit(rng);
      if (rep % 2) flags.flip();
      auto words = pack(flags);
      for (std::uint32_t t = 1; t < flags.size(); ++t) {
        auto got = parallel_index_lookback(words, t);
        CHECK(got.source == linear_scan(flags, t));
        bool long_run = t >= 33 && run_ending_at(flags, t) >= 32;
        CHECK((got.fallback_iterations > 0) == long_run);
      }
    }
  }
}

TEST_CASE("fan of 40 same-flag triangles needs a fallback") {
  std::vector<bool> flags(41, false);
  auto words = pack(flags);
  auto r = parallel_index_lookback(words, 40);
  CHECK_FALSE(r.source.has_value());
  CHECK(r.fallback_iterations >= 1);

  auto mesh = corpus::fan(40);
  std::vector<std::uint32_t> all(40);
  std::iota(all.begin(), all.end(), 0u);
  auto m = localize(mesh, all);
  auto sol = solve_eta(build_dual(m.triangles));
  REQUIRE(sol.restart_count() == 0);
  auto reordered = reorder_ascending(m, sol.paths);
  auto gts = encode_gts(reordered.meshlet, sol.paths);
  for (int wave : {32, 64}) {
    auto p = decode_parallel_gts(gts, m.vertex_count(), {wave});
    CHECK(p.triangles == decode_sequential(gts, m.vertex_count()));
    CHECK(p.trace.fallback_iterations >= 1);
    CHECK(p.trace.max_lookback < gts.triangle_count);
  }
}

TEST_CASE("fan of two left turns propagates vertex 0") {
  GtsStream fan{3, {0}, {3, 4}};
  auto p = decode_parallel_gts(fan, 5);
  CHECK(p.triangles[2].v == LocalTriangle{0, 3, 4});
  CHECK(p.trace.lookback[2] == 2);
}

TEST_CASE("lookback distance recorded for triangle 8") {
  GtsStream s;
  s.triangle_count = 9;
  s.flag_words = {1u << 3};  // triangle 4 turns right, the rest left
  for (int i = 1; i < 9; ++i) s.indices.push_back(static_cast<std::uint8_t>(i + 2));
  auto p = decode_parallel_gts(s, 11);
  CHECK(p.trace.lookback[8] == 4);
  CHECK(p.triangles == decode_sequential(s, 11));
}

TEST_CASE("reuse stream examples") {
  GtsReuseStream s{3, {0b01}, {0b01}, {0}};
  auto p = decode_parallel_reuse(s, 4);
  CHECK(p.triangles == decode_sequential(s, 4));
  CHECK(p.triangles[1].v[2] == 3);
  CHECK(p.triangles[2].v[2] == 0);

  GtsReuseStream fresh{4, {0}, {0b111}, {}};
  auto f = decode_parallel_reuse(fresh, 6);
  CHECK(f.triangles == decode_sequential(fresh, 6));
  CHECK(f.triangles[3].v[2] == 5);

  // 256 triangles: every lane counts over at most eight words.
  GtsReuseStream big;
  big.triangle_count = 256;
  big.flag_words.assign(8, 0);
  big.increment_words.assign(8, 0);
  big.increment_words[0] = 0b1;
  big.reuse.assign(254, 1);
  auto b = decode_parallel_reuse(big, 4);
  CHECK(b.triangles == decode_sequential(big, 4));
  CHECK(b.trace.max_countbits_words <= 8);
}

TEST_CASE("random streams decode identically in parallel") {
  corpus::Rng rng(5);
  for (int rep = 0; rep < 300; ++rep) {
    std::uniform_int_distribution<std::uint32_t> len(1, 256);
    double p = rep % 3 == 0 ? 0.02 : 0.5;
    auto s = random_stream(rng, len(rng), p, 40);
    auto seq = decode_sequential(s, 40);
    for (int wave : {32, 64}) CHECK(decode_parallel_gts(s, 40, {wave}).triangles == seq);
  }
}

TEST_CASE("malformed streams are rejected") {
  CHECK_THROWS_AS(decode_parallel_gts(GtsStream{3, {0}, {3}}, 5), DecodeError);
  CHECK_THROWS_AS(decode_parallel_gts(GtsStream{2, {0}, {9}}, 5), DecodeError);
  CHECK_THROWS_AS(decode_parallel_reuse(GtsReuseStream{3, {0}, {0}, {}}, 5), DecodeError);
}
