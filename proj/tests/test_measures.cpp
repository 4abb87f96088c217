#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <map>
#include <random>

#include "counterca/counter_automaton.hpp"
#include "counterca/measures.hpp"

using namespace counterca;

namespace {

MeasureParams narrow(std::uint64_t seed = 1) {
  MeasureParams p;
  p.half_width = 1;
  p.seed = seed;
  return p;
}

// Forward algorithm on the hidden (length, position) chain of the renewal process;
// position 0 is the emitter.  Returns the probability of every k-block with p > 0.
std::map<std::vector<Symbol>, double> exact_block_law(const MeasureParams& p, int k) {
  const int lmax = 70;
  std::vector<double> pmf(lmax + 1, 0.0);
  std::vector<int> base(lmax + 2, 0);
  double mean = 0;
  for (int l = 3; l <= lmax; ++l) {
    pmf[l] = (1 - p.nu) * std::pow(p.nu, l - 3);
    mean += l * pmf[l];
    base[l + 1] = base[l] + l + 1;
  }
  using Dist = std::vector<double>;  // index base[l] + j
  Dist start(static_cast<std::size_t>(base[lmax + 1]), 0.0);
  for (int l = 3; l <= lmax; ++l)
    for (int j = 0; j <= l; ++j) start[base[l] + j] = pmf[l] / (mean + 1);
  std::map<std::vector<Symbol>, double> law;
  std::vector<Symbol> word;
  std::function<void(const Dist&)> rec = [&](const Dist& alpha) {
    for (Symbol sym : {Symbol{0}, Symbol{1}, kE}) {
      Dist a(alpha.size(), 0.0);
      double tot = 0;
      for (int l = 3; l <= lmax; ++l)
        for (int j = 0; j <= l; ++j) {
          if ((j == 0) != (sym == kE)) continue;
          double v = alpha[base[l] + j] * (j == 0 ? 1.0 : 0.5);
          a[base[l] + j] = v;
          tot += v;
        }
      if (tot == 0) continue;
      word.push_back(sym);
      if (static_cast<int>(word.size()) == k) {
        law[word] = tot;
      } else {
        Dist b(alpha.size(), 0.0);
        double wrap = 0;
        for (int l = 3; l <= lmax; ++l) {
          for (int j = 0; j < l; ++j) b[base[l] + j + 1] += a[base[l] + j];
          wrap += a[base[l] + l];
        }
        for (int l = 3; l <= lmax; ++l) b[base[l]] += wrap * pmf[l];
        rec(b);
      }
      word.pop_back();
    }
  };
  rec(start);
  return law;
}

double entropy_of(const std::map<std::vector<Symbol>, double>& law) {
  double h = 0;
  for (const auto& [w, q] : law)
    if (q > 0) h -= q * std::log(q);
  return h;
}

WindowConfig bernoulli(std::mt19937_64& rng, Coord lo, Coord hi) {
  WindowConfig w;
  w.origin = lo;
  std::bernoulli_distribution b(0.5);
  for (Coord c = lo; c <= hi; ++c) w.cells.push_back(b(rng) ? 1 : 0);
  w.valid = w.extent();
  return w;
}

}  // namespace

TEST(Lengths, MomentsAndLaw) {
  MeasureParams p;
  p.seed = 7;
  auto ls = sample_lengths(p, 1000000);
  double sum = 0;
  std::map<int, std::size_t> hist;
  for (int l : ls) {
    ASSERT_GE(l, 3);
    sum += l;
    ++hist[l];
  }
  EXPECT_NEAR(sum / ls.size(), 5.0, 0.01);
  EXPECT_NEAR(hist[3] / 1e6, 1.0 / 3, 0.002);
  // Kolmogorov-Smirnov distance; 1.63/sqrt(n) is the 1% level.
  double cdf = 0, emp = 0, d = 0;
  for (int l = 3; l < 60; ++l) {
    cdf += length_pmf(p, l);
    emp += hist[l] / 1e6;
    d = std::max(d, std::abs(cdf - emp));
  }
  EXPECT_LT(d, 1.63 / 1000.0);
  EXPECT_EQ(ls, sample_lengths(p, 1000000));
  EXPECT_NEAR(mean_length(p), 5.0, 1e-12);
  EXPECT_NEAR(renewal_entropy_rate(p), 0.8958797346, 1e-9);
}

TEST(Params, Validation) {
  MeasureParams p;
  p.nu = 1.0;
  EXPECT_THROW(validate(p), Error);
  p = {};
  p.min_length = 2;
  EXPECT_THROW(validate(p), Error);
  p = {};
  p.half_width = 0;
  EXPECT_THROW(validate(p), Error);
}

TEST(OmegaStar, StructureAndDeterminism) {
  MeasureParams p;
  p.half_width = 12;
  for (std::uint64_t i = 0; i < 300; ++i) {
    auto x = sample_omega_star(p, i);
    EXPECT_EQ(x.at(0), kE);
    auto om = validate_omega(x);
    EXPECT_TRUE(om.in_omega);
    EXPECT_GE(om.min_gap, 3);
    EXPECT_EQ(om.emitters.size(), 2u * 12 + 2);
    for (Symbol s : x.cells) EXPECT_TRUE(s <= 1 || s == kE);
    auto line = phi(x);
    for (const auto& u : line.counters) EXPECT_EQ(u.r, 0);
    EXPECT_EQ(x.cells, sample_omega_star(p, i).cells);
  }
  // Growing the window only appends cells.
  auto a = sample_omega_star(p, 5);
  p.half_width = 20;
  auto b = sample_omega_star(p, 5);
  for (Coord c = a.lo(); c <= a.hi(); ++c) EXPECT_EQ(a.at(c), b.at(c));
}

TEST(OmegaStar, CounterStatesUniform) {
  MeasureParams p = narrow(3);
  std::vector<CounterLine> lines;
  for (std::uint64_t i = 0; i < 100000; ++i) lines.push_back(phi(sample_omega_star(p, i)));
  auto rep = uniformity_check(lines, 0);
  auto* c3 = rep.find({3});
  ASSERT_NE(c3, nullptr);
  EXPECT_GT(c3->count, 30000u);
  EXPECT_LE(c3->tv, 0.02);
  auto* c4 = rep.find({4});
  ASSERT_NE(c4, nullptr);
  EXPECT_LE(c4->tv, 0.03);
}

TEST(Stationary, TowerConvention) {
  MeasureParams p = narrow(11);
  p.convention = StationaryConvention::TowerShifts;
  const int n = 200000;
  int e0 = 0, e1 = 0, l3 = 0;
  for (int i = 0; i < n; ++i) {
    SampleInfo info;
    auto x = sample_stationary(p, static_cast<std::uint64_t>(i), &info);
    e0 += x.at(0) == kE;
    e1 += x.at(1) == kE;
    l3 += info.origin_length == 3;
    ASSERT_LT(info.offset, info.origin_length);
  }
  EXPECT_NEAR(e0 / double(n), 0.2, 0.005);
  EXPECT_NEAR(l3 / double(n), 0.2, 0.005);
  // Not shift-invariant: the cell right of the origin never holds an emitter.
  EXPECT_EQ(e1, 0);
}

TEST(Stationary, RenewalConventionIsShiftInvariant) {
  MeasureParams p = narrow(12);
  const int n = 200000;
  std::vector<int> ecount(7, 0);
  int l3 = 0;
  for (int i = 0; i < n; ++i) {
    SampleInfo info;
    auto x = sample_stationary(p, static_cast<std::uint64_t>(i), &info);
    for (int c = 0; c < 7; ++c) ecount[c] += x.at(c - 3) == kE;
    l3 += info.origin_length == 3;
    ASSERT_LE(info.offset, info.origin_length);
  }
  const double sd = std::sqrt((1.0 / 6) * (5.0 / 6) / n);
  for (int c = 0; c < 7; ++c) EXPECT_NEAR(ecount[c] / double(n), 1.0 / 6, 4 * sd) << "cell " << c - 3;
  // Two-sample check between x_0 and x_1.
  EXPECT_LT(std::abs(ecount[3] - ecount[4]) / double(n), 3 * std::sqrt(2.0) * sd);
  EXPECT_NEAR(l3 / double(n), 4.0 / 3 / 6, 0.005);
}

TEST(Stationary, MatchesExactBlockLaw) {
  MeasureParams p = narrow(13);
  const int n = 200000;
  for (int k : {1, 3, 6}) {
    auto law = exact_block_law(p, k);
    double total = 0;
    for (const auto& [w, q] : law) total += q;
    EXPECT_NEAR(total, 1.0, 1e-9);
    std::map<std::vector<Symbol>, double> emp;
    std::vector<WindowConfig> xs;
    for (int i = 0; i < n; ++i) {
      auto x = sample_stationary(p, static_cast<std::uint64_t>(i));
      std::vector<Symbol> w;
      for (int j = 0; j < k; ++j) w.push_back(x.at(j));
      emp[w] += 1.0 / n;
      if (k == 6) xs.push_back(std::move(x));
    }
    double tv = 0;
    for (const auto& [w, q] : law) tv += std::abs(q - emp[w]);
    for (const auto& [w, q] : emp)
      if (!law.count(w)) tv += q;
    EXPECT_LT(tv / 2, 0.02) << "k=" << k;
    if (k == 6) {
      auto est = block_entropy(xs, 6);
      auto law5 = exact_block_law(p, 5);
      EXPECT_NEAR(est.block * 6, entropy_of(law), 0.02);
      EXPECT_NEAR(est.difference, entropy_of(law) - entropy_of(law5), 4 * est.difference_stderr + 0.01);
      EXPECT_NEAR(entropy_of(law) - entropy_of(law5), renewal_entropy_rate(p), 1e-6);
    }
  }
}

TEST(BurnIn, ZeroStepsIsIdentity) {
  MeasureParams p = narrow(14);
  auto x = sample_stationary(p, 0);
  for (std::uint64_t s = 0; s < 20; ++s) {
    auto b = cesaro_burnin(x, 1, s);
    EXPECT_EQ(b.k, 0);
    EXPECT_EQ(b.cfg.cells, x.cells);
  }
}

TEST(BurnIn, EmittersStayAndHighDigitsAppear) {
  MeasureParams p;
  p.half_width = 4;
  p.burn_in_T = 64;
  const Interval keep{-30, 30};
  int e_before = 0, e_after = 0, high = 0;
  const int n = 3000;
  for (int i = 0; i < n; ++i) {
    SampleInfo info;
    auto y = sample_burned_in(p, static_cast<std::uint64_t>(i), keep, &info);
    MeasureParams q = p;
    q.min_cells_per_side = std::max(-keep.lo, keep.hi) + 2 * p.burn_in_T + 8;
    auto x = sample_stationary(q, static_cast<std::uint64_t>(i));
    ASSERT_EQ(y.valid, keep);
    ASSERT_LT(info.burn_in, p.burn_in_T);
    for (Coord c = keep.lo; c <= keep.hi; ++c) {
      ASSERT_EQ(x.at(c) == kE, y.at(c) == kE);
      high += is_high(y.at(c));
    }
    e_before += x.at(0) == kE;
    e_after += y.at(0) == kE;
  }
  EXPECT_EQ(e_before, e_after);
  EXPECT_GT(high, 0);
}

TEST(BurnIn, ConeTrimMatchesFullOrbit) {
  MeasureParams p;
  p.half_width = 40;
  auto x = sample_stationary(p, 3);
  auto full = orbit(x, counter_automaton(), 30);
  auto cut = cesaro_burnin_k(x, 30, Interval{-5, 5});
  for (Coord c = -5; c <= 5; ++c) EXPECT_EQ(cut.cfg.at(c), full[30].at(c));
  EXPECT_THROW(cesaro_burnin_k(x, 400, Interval{-5, 5}), WindowExhausted);
}

TEST(ConditionStar, SamplesAndAdversary) {
  MeasureParams p;
  p.half_width = 50;
  auto xs = sample_batch(SampleKind::OmegaStar, p, 10000);
  auto rep = check_condition_star(xs, p);
  EXPECT_EQ(rep.in_omega, rep.samples);
  EXPECT_EQ(rep.collisions, 0u);
  EXPECT_LT(rep.expected_collisions, 1e-50);
  EXPECT_FALSE(rep.violates());

  std::vector<WindowConfig> fixed;
  std::mt19937_64 rng(1);
  for (int i = 0; i < 50; ++i) {
    std::string s = "E";
    for (int j = 0; j < 20; ++j) s += std::string(1, "01"[rng() & 1]) + "01E";
    fixed.push_back(WindowConfig::from_string(counter_alphabet(), s, -40));
  }
  auto bad = check_condition_star(fixed, p);
  EXPECT_EQ(bad.collisions, 50u * 49 / 2);
  EXPECT_TRUE(bad.violates());

  fixed.push_back(WindowConfig::from_string(counter_alphabet(), "E0E000E", -3));
  EXPECT_LT(check_condition_star(fixed, p).in_omega, fixed.size());
}

TEST(Uniformity, BurnedInClasses) {
  MeasureParams p;
  p.half_width = 2;
  p.burn_in_T = 64;
  p.seed = 21;
  std::vector<CounterLine> lines;
  for (std::uint64_t i = 0; i < 20000; ++i) {
    MeasureParams q = p;
    q.min_cells_per_side = 2 * p.burn_in_T + 80;
    auto x = sample_stationary(q, i);
    auto a = counter_span(x, -1);
    auto b = counter_span(x, 0);
    ASSERT_TRUE(a && b);
    auto y = cesaro_burnin_k(x, draw_burnin(p, i), Interval{a->lo, b->hi}).cfg;
    lines.push_back(phi(y));
  }
  auto rep = uniformity_check(lines, -1, {}, 2000);
  auto* c3 = rep.find({3});
  auto* c4 = rep.find({4});
  ASSERT_TRUE(c3 && c4);
  EXPECT_FALSE(c3->starved);
  EXPECT_LE(c3->tv, 0.03);
  EXPECT_LE(c4->tv, 0.04);
  bool any_starved = false;
  for (const auto& c : rep.classes) any_starved = any_starved || c.starved;
  EXPECT_TRUE(any_starved);
  EXPECT_FALSE(rep.notes.empty());
}

TEST(Entropy, BernoulliAndConstant) {
  std::mt19937_64 rng(5);
  std::vector<WindowConfig> xs, zeros;
  for (int i = 0; i < 50000; ++i) {
    xs.push_back(bernoulli(rng, -2, 12));
    zeros.push_back(WindowConfig::from_string(binary_alphabet(), std::string(15, '0'), -2));
  }
  auto e = block_entropy(xs, 8);
  EXPECT_NEAR(e.block, std::log(2.0), 0.01);
  EXPECT_NEAR(e.difference, std::log(2.0), 0.02);
  EXPECT_FALSE(e.undersampled);
  auto z = block_entropy(zeros, 8);
  EXPECT_EQ(z.block, 0);
  EXPECT_EQ(z.difference, 0);
  auto u = block_entropy(std::vector<WindowConfig>(xs.begin(), xs.begin() + 200), 12);
  EXPECT_TRUE(u.undersampled);
  EXPECT_LE(u.block, std::log(2.0) + 1e-12);
}

TEST(Entropy, DifferenceNonIncreasing) {
  MeasureParams p = narrow(31);
  p.min_cells_per_side = 10;
  auto xs = sample_batch(SampleKind::Stationary, p, 100000);
  double prev = 10;
  for (int k = 1; k <= 8; ++k) {
    auto e = block_entropy(xs, k);
    EXPECT_GE(e.block, 0);
    EXPECT_LE(e.block, std::log(5.0));
    EXPECT_LE(e.difference, prev + 3 * e.difference_stderr);
    prev = e.difference;
    if (k == 8) {
      EXPECT_NEAR(e.difference, renewal_entropy_rate(p), 5 * e.difference_stderr + 0.02);
      EXPECT_GT(e.difference - 5 * e.difference_stderr, 0);
    }
  }
}

TEST(ColumnEntropy, ShiftIdentityAndF) {
  std::mt19937_64 rng(6);
  std::vector<WindowConfig> xs;
  for (int i = 0; i < 40000; ++i) xs.push_back(bernoulli(rng, -20, 20));
  auto sh = column_entropy(xs, *shift_rule(), 1, 8);
  EXPECT_NEAR(sh.block, std::log(2.0), 0.01);
  EXPECT_NEAR(sh.difference, std::log(2.0), 0.02);
  auto id = column_entropy(xs, *identity_rule(), 1, 8);
  EXPECT_NEAR(id.block, std::log(2.0) / 8, 0.01);
  EXPECT_EQ(id.difference, 0);
  auto words = column_words(xs, *identity_rule(), 2, 4);
  EXPECT_EQ(words.front().size(), 8u);
  EXPECT_THROW(column_words(xs, *shift_rule(), 1, 40), WindowExhausted);
}

TEST(Manifest, RoundTripReplays) {
  MeasureParams p;
  p.half_width = 3;
  p.burn_in_T = 16;
  p.seed = 99;
  SampleManifest m;
  auto xs = sample_batch(SampleKind::BurnedIn, p, 40, &m, Interval{-6, 6});
  auto back = SampleManifest::from_json(m.to_json());
  EXPECT_EQ(back.count(), 40u);
  auto ys = replay_manifest(back);
  for (std::size_t i = 0; i < xs.size(); ++i) EXPECT_EQ(xs[i].cells, ys[i].cells);
  EXPECT_THROW(SampleManifest::from_json("{\"kind\": 3}"), ParseError);
  back.entries[0].offset += 1;
  EXPECT_THROW(replay_manifest(back), Error);
}
