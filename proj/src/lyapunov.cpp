#include "counterca/lyapunov.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <random>
#include <sstream>

#include "counterca/channel.hpp"
#include "counterca/counter_automaton.hpp"

namespace counterca {

std::string to_string(Side side) { return side == Side::Plus ? "+" : "-"; }

Side parse_side(const std::string& text) {
  if (text == "+" || text == "plus" || text == "left") return Side::Plus;
  if (text == "-" || text == "minus" || text == "right") return Side::Minus;
  throw ParseError("unknown side '" + text + "'");
}

int reach_bound(const Dynamics& dyn, int n) {
  if (n <= 0) return 0;
  return dyn.radius() + dyn.effective_radius() * (n - 1);
}

Interval required_window(const Dynamics& dyn, int n) {
  const Coord b = reach_bound(dyn, n);
  return {-(3 * b + 24), 3 * b + 24};
}

namespace {

void require_cover(const WindowConfig& x, Interval need, const char* what) {
  Interval v = intersect(x.valid, x.extent());
  if (need.lo < v.lo || need.hi > v.hi)
    throw WindowExhausted(std::string(what) + ": window [" + std::to_string(v.lo) + "," + std::to_string(v.hi) +
                              "] does not cover [" + std::to_string(need.lo) + "," + std::to_string(need.hi) + "]",
                          0);
}

bool is_F(const Dynamics& dyn) { return dynamic_cast<const CounterAutomaton*>(&dyn) != nullptr; }

struct DigitOps {
  using State = std::uint64_t;
  std::vector<int> lengths;
  std::vector<std::uint64_t> masks;  // observed digits of the last counter

  bool supported(std::size_t k) const { return lengths[k] <= 32; }
  std::int64_t unsupported_arrival(std::size_t, std::int64_t u) const { return u + 1; }

  State advance(std::size_t k, State s, int a) const {
    const int l = lengths[k];
    Symbol prev2 = a == 2 ? 2 : 0;
    Symbol prev1 = kE;
    State out = 0;
    for (int j = 0; j < l; ++j) {
      auto old = static_cast<Symbol>((s >> (2 * j)) & 3);
      out |= static_cast<State>(fd_local(prev2, prev1, old)) << (2 * j);
      prev2 = prev1;
      prev1 = old;
    }
    return out;
  }
  bool emits(std::size_t k, State s) const { return ((s >> (2 * (lengths[k] - 1))) & 3) == 2; }
  State observe(std::size_t k, State s) const { return s & masks[k]; }
  static std::uint64_t value(State s, int l) {
    std::uint64_t d = 0;
    for (int j = l - 1; j >= 0; --j) d = 2 * d + ((s >> (2 * j)) & 3);
    return d;
  }
  std::int64_t earliest_emission(std::size_t k, State s, std::int64_t t) const {
    const int l = lengths[k];
    const std::uint64_t cap = std::uint64_t{1} << l;
    const std::uint64_t d = value(s, l);
    if (d >= cap) return t;
    return t + static_cast<std::int64_t>((cap - d + 1) / 2);
  }
  bool cannot_emit_before(std::size_t k, const std::vector<State>& set, std::int64_t t, std::int64_t limit) const {
    for (State s : set)
      if (earliest_emission(k, s, t) < limit) return false;
    return true;
  }
};

}  // namespace

std::int64_t cellwise_arrival(const WindowConfig& x, const Dynamics& dyn, std::int64_t s, Side side, int horizon) {
  if (horizon <= 0) return 1;
  const Coord far = 2 * static_cast<Coord>(reach_bound(dyn, horizon)) + 16;
  Interval span = side == Side::Plus ? Interval{-s, far} : Interval{-far, s};
  require_cover(x, span, "cellwise certificate");
  SetConfig cfg;
  cfg.origin = span.lo;
  cfg.valid = span;
  cfg.open_left = side == Side::Plus;
  cfg.open_right = side == Side::Minus;
  cfg.projected = false;
  cfg.time = x.time;
  cfg.cells.reserve(static_cast<std::size_t>(span.length()));
  for (Coord c = span.lo; c <= span.hi; ++c) cfg.cells.push_back(singleton(x.at(c)));
  for (int k = 1; k <= horizon; ++k) {
    cfg = dyn.step(cfg);
    if (side == Side::Plus) {
      if (cfg.valid.hi < 0) throw WindowExhausted("cellwise certificate lost the watched cells", k);
      for (Coord c = std::max<Coord>(0, cfg.valid.lo); c <= cfg.valid.hi; ++c)
        if (!is_singleton(cfg.at(c))) return k;
    } else {
      if (cfg.valid.lo > 0) throw WindowExhausted("cellwise certificate lost the watched cells", k);
      for (Coord c = cfg.valid.lo; c <= std::min<Coord>(0, cfg.valid.hi); ++c)
        if (!is_singleton(cfg.at(c))) return k;
    }
  }
  return horizon + 1;
}

std::optional<std::int64_t> channel_arrival(const WindowConfig& x, std::int64_t s, std::int64_t horizon,
                                            std::size_t cap) {
  auto omega = validate_omega(x);
  if (!omega.violations.empty()) return std::nullopt;
  const auto& es = omega.emitters;
  Interval v = intersect(x.valid, x.extent());
  auto p0 = std::lower_bound(es.begin(), es.end(), -s + 3);
  if (p0 == es.end() || *p0 > 0) return std::min<std::int64_t>(1, horizon + 1);
  auto right = std::upper_bound(es.begin(), es.end(), Coord{0});
  if (right == es.end()) throw WindowExhausted("counter channel: no emitter right of the origin", 0);
  if (*p0 - 2 < v.lo) throw WindowExhausted("counter channel: emitter too close to the window edge", 0);

  DigitOps ops;
  std::vector<std::uint64_t> init;
  for (auto it = p0; it != right; ++it) {
    const Coord a = *it;
    const int l = static_cast<int>(*(it + 1) - a - 1);
    ops.lengths.push_back(l);
    std::uint64_t packed = 0, mask = 0;
    if (l <= 32)
      for (int j = 0; j < l; ++j) {
        packed |= static_cast<std::uint64_t>(x.at(a + 1 + j)) << (2 * j);
        if (a + 1 + j >= 0) mask |= std::uint64_t{3} << (2 * j);
      }
    init.push_back(packed);
    ops.masks.push_back(mask);
  }
  std::vector<int> first{x.at(*p0 - 1) == 2 ? 2 : 1};
  auto res = run_channel(ops, init, first, 1, horizon, cap);
  return res.arrival;
}

std::int64_t certified_arrival(const WindowConfig& x, const Dynamics& dyn, std::int64_t s, Side side,
                               std::int64_t horizon, const BracketOptions& opt) {
  std::int64_t best = 1;
  bool channel = false;
  if (opt.use_channel && side == Side::Plus && is_F(dyn)) {
    if (auto c = channel_arrival(x, s, horizon, opt.channel_cap)) {
      best = *c;
      channel = true;
    }
  }
  if (best > horizon) return horizon + 1;
  const int h = static_cast<int>(channel ? std::min<std::int64_t>(horizon, opt.cellwise_horizon) : horizon);
  best = std::max(best, cellwise_arrival(x, dyn, s, side, h));
  return std::min(best, horizon + 1);
}

std::optional<int> replay_witness(const WindowConfig& x, const Dynamics& dyn, const Witness& w, int n, Side side) {
  WindowConfig y = x;
  for (const auto& ch : w.changes) y.at(ch.coord) = ch.value;
  y.projected = false;
  WindowConfig x0 = x;
  x0.projected = false;
  auto fronts = diff_front(x0, y, dyn, n);
  for (int k = 1; k <= n; ++k) {
    const auto& f = fronts[static_cast<std::size_t>(k)];
    if (!f) continue;
    if (side == Side::Plus ? f->hi >= 0 : f->lo <= 0) return k;
  }
  return std::nullopt;
}

namespace {

class WitnessSearch {
 public:
  WitnessSearch(const WindowConfig& x, const Dynamics& dyn, int n, Side side, const BracketOptions& opt)
      : x_(x), dyn_(dyn), n_(n), side_(side), opt_(opt), rng_(opt.seed * 0x9E3779B97F4A7C15ull + static_cast<std::uint64_t>(n)) {
    base_ = orbit(x, dyn, n);
  }

  std::optional<Witness> at(std::int64_t s) {
    const int k = dyn_.alphabet().size();
    std::size_t used = 0;
    for (int w = 1;; ++w) {
      std::size_t count = 1;
      for (int j = 0; j < w; ++j) count *= static_cast<std::size_t>(k);
      if (used + count > opt_.exhaustive_budget) break;
      used += count;
      std::vector<Symbol> vals(static_cast<std::size_t>(w), 0);
      for (std::size_t idx = 0; idx < count; ++idx) {
        std::size_t r = idx;
        for (int j = 0; j < w; ++j) {
          vals[static_cast<std::size_t>(j)] = static_cast<Symbol>(r % static_cast<std::size_t>(k));
          r /= static_cast<std::size_t>(k);
        }
        if (auto wit = attempt(s, 0, vals)) return wit;
      }
    }
    std::uniform_int_distribution<int> width(1, std::max(1, opt_.random_max_width));
    std::uniform_int_distribution<int> shift(0, 3);
    std::uniform_int_distribution<int> sym(0, k - 1);
    for (int t = 0; t < opt_.random_tries; ++t) {
      std::vector<Symbol> vals(static_cast<std::size_t>(width(rng_)));
      for (auto& v : vals) v = static_cast<Symbol>(sym(rng_));
      if (auto wit = attempt(s, shift(rng_), vals)) return wit;
    }
    return std::nullopt;
  }

 private:
  std::optional<Witness> attempt(std::int64_t s, int shift, const std::vector<Symbol>& vals) {
    std::vector<CellChange> changes;
    bool differs = false;
    const auto w = static_cast<Coord>(vals.size());
    for (Coord j = 0; j < w; ++j) {
      Coord c = side_ == Side::Plus ? -s - 1 - shift - (w - 1) + j : s + 1 + shift + j;
      Symbol v = vals[static_cast<std::size_t>(j)];
      differs = differs || x_.at(c) != v;
      changes.push_back({c, v});
    }
    if (!differs) return std::nullopt;
    auto hit = [&](const Interval& f) { return side_ == Side::Plus ? f.hi >= 0 : f.lo <= 0; };
    try {
      auto trace = track_perturbation(base_, changes, dyn_, n_, hit);
      if (trace.stopped_early) return Witness{changes, trace.steps};
    } catch (const WindowExhausted&) {
    }
    return std::nullopt;
  }

  const WindowConfig& x_;
  const Dynamics& dyn_;
  int n_;
  Side side_;
  const BracketOptions& opt_;
  std::mt19937_64 rng_;
  SpaceTimeDiagram base_;
};

}  // namespace

InBracket in_upper(const WindowConfig& x, const Dynamics& dyn, int n, Side side, const BracketOptions& opt) {
  require_cover(x, required_window(dyn, n), "bracket");
  InBracket b;
  b.n = n;
  b.side = side;
  const int bound = reach_bound(dyn, n);
  b.upper = bound;
  b.certificate = "radius";
  if (n == 0) {
    b.upper = 0;
    return b;
  }
  int lo = 0, hi = bound;
  bool found = false;
  while (lo <= hi) {
    int mid = lo + (hi - lo) / 2;
    if (certified_arrival(x, dyn, mid, side, n, opt) > n) {
      b.upper = mid;
      found = true;
      hi = mid - 1;
    } else {
      lo = mid + 1;
    }
  }
  if (found) {
    bool by_channel = false;
    if (opt.use_channel && side == Side::Plus && is_F(dyn))
      if (auto c = channel_arrival(x, b.upper, n, opt.channel_cap)) by_channel = *c > n;
    b.certificate = by_channel ? "channel" : "cellwise";
  } else {
    b.inconclusive = true;
  }
  return b;
}

InBracket in_lower(const WindowConfig& x, const Dynamics& dyn, int n, Side side, const BracketOptions& opt,
                   std::optional<int> search_below) {
  require_cover(x, required_window(dyn, n), "bracket");
  InBracket b;
  b.n = n;
  b.side = side;
  b.upper = reach_bound(dyn, n);
  if (n == 0) {
    b.upper = 0;
    return b;
  }
  WitnessSearch search(x, dyn, n, side, opt);
  int lo = 0, hi = (search_below ? *search_below : b.upper) - 1;
  while (lo <= hi) {
    int mid = lo + (hi - lo) / 2;
    if (auto w = search.at(mid)) {
      b.lower = mid + 1;
      b.witness = w;
      lo = mid + 1;
    } else {
      hi = mid - 1;
    }
  }
  return b;
}

InBracket in_bracket(const WindowConfig& x, const Dynamics& dyn, int n, Side side, const BracketOptions& opt) {
  InBracket up = in_upper(x, dyn, n, side, opt);
  InBracket low = in_lower(x, dyn, n, side, opt, up.upper);
  up.lower = low.lower;
  up.witness = low.witness;
  if (up.lower > up.upper) throw Error("bracket inverted: lower " + std::to_string(up.lower) + " > upper " +
                                       std::to_string(up.upper) + " at n=" + std::to_string(n));
  return up;
}

std::vector<InBracket> pointwise_exponents(const WindowConfig& x, const Dynamics& dyn, const std::vector<int>& n_grid,
                                           Side side, const BracketOptions& opt) {
  std::vector<int> grid = n_grid;
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  std::vector<InBracket> out;
  for (int n : grid) out.push_back(in_bracket(x, dyn, n, side, opt));
  for (std::size_t i = 1; i < out.size(); ++i)
    if (out[i - 1].lower > out[i].lower) {
      out[i].lower = out[i - 1].lower;
      out[i].witness = out[i - 1].witness;
    }
  for (std::size_t i = out.size(); i-- > 1;)
    if (out[i].upper < out[i - 1].upper) {
      out[i - 1].upper = out[i].upper;
      out[i - 1].certificate = out[i].certificate;
      out[i - 1].inconclusive = out[i].inconclusive;
    }
  return out;
}

CrossingResult crossing_time_F(const WindowConfig& x, const Dynamics& dyn, std::int64_t n, CrossingStrategy strategy,
                               int horizon, const BracketOptions& opt) {
  CrossingResult res;
  if (strategy == CrossingStrategy::AlphabetFront) {
    std::int64_t a = certified_arrival(x, dyn, n, Side::Plus, horizon, opt);
    res.certified = true;
    res.reached = a <= horizon;
    res.steps = a - 1;
    return res;
  }

  const Coord b = reach_bound(dyn, horizon);
  require_cover(x, {-n - 2 * b - 24, 2 * b + 24}, "crossing time");
  auto base = orbit(x, dyn, horizon);
  auto hit = [](const Interval& f) { return f.hi >= 0; };
  std::vector<std::vector<CellChange>> candidates;
  if (is_F(dyn)) {
    auto es = validate_omega(x).emitters;
    auto it = std::upper_bound(es.begin(), es.end(), -n - 1);
    if (it != es.begin()) {
      const Coord q = *(it - 1);
      candidates.push_back({{q, 0}, {q - 1, kE}});
      if (q + 1 <= -n - 1) candidates.push_back({{q, 0}, {q + 1, kE}});
      candidates.push_back({{q - 1, 2}});
      candidates.push_back({{q, 0}});
    }
  }
  const int k = dyn.alphabet().size();
  for (Symbol v = 0; v < k; ++v) candidates.push_back({{-n - 1, v}});
  std::mt19937_64 rng(opt.seed ^ static_cast<std::uint64_t>(n));
  std::uniform_int_distribution<int> sym(0, k - 1), width(1, std::max(1, opt.random_max_width));
  for (int t = 0; t < opt.random_tries; ++t) {
    std::vector<CellChange> ch;
    int w = width(rng);
    for (int j = 0; j < w; ++j) ch.push_back({-n - 1 - j, static_cast<Symbol>(sym(rng))});
    candidates.push_back(ch);
  }
  res.steps = horizon;
  for (const auto& ch : candidates) {
    try {
      auto trace = track_perturbation(base, ch, dyn, horizon, hit);
      if (trace.stopped_early && trace.steps - 1 < res.steps) {
        res.steps = trace.steps - 1;
        res.reached = true;
        res.witness = Witness{ch, trace.steps};
      }
    } catch (const WindowExhausted&) {
    }
  }
  return res;
}

}  // namespace counterca

namespace counterca {

namespace {

double stderr_of(const std::vector<double>& v, double mean) {
  if (v.size() < 2) return 0;
  double ss = 0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()));
}

}  // namespace

ExponentEstimate average_exponents(const std::vector<WindowConfig>& samples, const Dynamics& dyn,
                                   const std::vector<int>& n_grid, Side side, const BracketOptions& opt) {
  ExponentEstimate est;
  est.rule = dyn.name();
  est.side = side;
  est.n_grid = n_grid;
  std::sort(est.n_grid.begin(), est.n_grid.end());
  est.n_grid.erase(std::unique(est.n_grid.begin(), est.n_grid.end()), est.n_grid.end());
  est.sample_count = samples.size();
  est.seed = opt.seed;
  for (const auto& x : samples) est.brackets.push_back(pointwise_exponents(x, dyn, est.n_grid, side, opt));
  for (std::size_t g = 0; g < est.n_grid.size(); ++g) {
    ExponentPoint pt;
    pt.n = est.n_grid[g];
    std::vector<double> lo, up, mid;
    for (const auto& curve : est.brackets) {
      const auto& b = curve[g];
      lo.push_back(static_cast<double>(b.lower) / pt.n);
      up.push_back(static_cast<double>(b.upper) / pt.n);
      mid.push_back((b.lower + b.upper) / 2.0 / pt.n);
      pt.inconclusive += b.inconclusive;
    }
    auto mean = [](const std::vector<double>& v) {
      return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    };
    pt.lower_mean = mean(lo);
    pt.upper_mean = mean(up);
    pt.mid_mean = mean(mid);
    pt.lower_stderr = stderr_of(lo, pt.lower_mean);
    pt.upper_stderr = stderr_of(up, pt.upper_mean);
    pt.mid_stderr = stderr_of(mid, pt.mid_mean);
    est.points.push_back(pt);
  }
  return est;
}

ExponentEstimate average_exponents(const MeasureParams& params, const Dynamics& dyn, const std::vector<int>& n_grid,
                                   std::size_t samples, Side side, const BracketOptions& opt, bool keep_samples) {
  if (n_grid.empty()) throw Error("empty horizon grid");
  const int nmax = *std::max_element(n_grid.begin(), n_grid.end());
  const Interval need = required_window(dyn, nmax);
  std::vector<WindowConfig> xs;
  std::string source;
  if (is_F(dyn)) {
    xs = sample_batch(SampleKind::BurnedIn, params, samples, nullptr, need);
    source = "burned-in T=" + std::to_string(params.burn_in_T);
  } else {
    for (std::size_t i = 0; i < samples; ++i) xs.push_back(sample_bernoulli(dyn.alphabet().size(), params.seed, i, need));
    source = "bernoulli";
  }
  BracketOptions o = opt;
  o.seed = params.seed;
  auto est = average_exponents(xs, dyn, n_grid, side, o);
  est.source = source;
  if (keep_samples) est.samples = std::move(xs);
  return est;
}

std::string ExponentEstimate::to_csv(bool header) const {
  std::ostringstream out;
  out << std::setprecision(10);
  if (header) out << "n,side,lower_mean,upper_mean,stderr,samples,seed\n";
  for (const auto& p : points)
    out << p.n << ',' << to_string(side) << ',' << p.lower_mean << ',' << p.upper_mean << ',' << p.mid_stderr << ','
        << sample_count << ',' << seed << '\n';
  return out.str();
}

}  // namespace counterca
