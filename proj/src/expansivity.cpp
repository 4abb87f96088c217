#include "counterca/expansivity.hpp"

#include <algorithm>
#include <unordered_map>

#include "counterca/counter_automaton.hpp"

namespace counterca {

namespace {

constexpr std::uint64_t kMaxConfigurations = 1ull << 26;

std::uint64_t count_configs(int k, Coord w) {
  std::uint64_t n = 1;
  for (Coord i = 0; i < w; ++i) {
    if (n > kMaxConfigurations / static_cast<std::uint64_t>(k)) return kMaxConfigurations + 1;
    n *= static_cast<std::uint64_t>(k);
  }
  return n;
}

void decode(std::uint64_t code, int k, std::vector<Symbol>& cells) {
  for (auto it = cells.rbegin(); it != cells.rend(); ++it) {
    *it = static_cast<Symbol>(code % static_cast<std::uint64_t>(k));
    code /= static_cast<std::uint64_t>(k);
  }
}

Interval nplus_window(int r, int n) { return {-r - r * n, std::max(2 * r, r + r * n)}; }

// Rows 1..n of the central cells [-r, r], flattened.
std::string central_word(const WindowConfig& x, const RuleTable& rule, int n) {
  const int r = rule.radius();
  std::string out;
  WindowConfig cur = x;
  for (int m = 1; m <= n; ++m) {
    cur = step(cur, rule);
    for (Coord c = -r; c <= r; ++c) out.push_back(static_cast<char>(cur.at(c)));
  }
  return out;
}

WindowConfig make_window(std::vector<Symbol> cells, Coord lo) {
  WindowConfig w;
  w.origin = lo;
  w.cells = std::move(cells);
  w.valid = w.extent();
  return w;
}

std::vector<int> lengths_from(const CounterLine& line, int central) {
  std::vector<int> out;
  for (int i = central; i >= line.first_index; --i) out.push_back(line.at(i).l);
  return out;
}

}  // namespace

ExpansivityReport find_nplus(const RuleTable& rule, int cap) {
  ExpansivityReport rep;
  rep.cap = cap;
  rep.radius = rule.radius();
  const int r = rule.radius();
  const int k = rule.alphabet().size();
  for (int n = 1; n <= cap; ++n) {
    const Interval W = nplus_window(r, n);
    const std::uint64_t total = count_configs(k, W.length());
    if (total > kMaxConfigurations) throw Error("depth " + std::to_string(n) + " exceeds the enumeration limit");
    std::unordered_map<std::string, std::pair<std::string, std::uint64_t>> seen;
    std::vector<Symbol> cells(static_cast<std::size_t>(W.length()));
    bool clash = false;
    for (std::uint64_t code = 0; code < total && !clash; ++code) {
      decode(code, k, cells);
      WindowConfig x = make_window(cells, W.lo);
      std::string key;
      for (Coord c = W.lo; c <= -r - 1; ++c) key.push_back(static_cast<char>(x.at(c)));
      key += '|' + central_word(x, rule, n);
      std::string target;
      for (Coord c = r; c <= 2 * r; ++c) target.push_back(static_cast<char>(x.at(c)));
      auto [it, fresh] = seen.try_emplace(key, target, code);
      if (!fresh && it->second.first != target) {
        clash = true;
        std::vector<Symbol> other(cells.size());
        decode(it->second.second, k, other);
        rep.counterexample = std::make_pair(other, cells);
        rep.window_lo = W.lo;
      }
    }
    rep.configurations = total;
    if (!clash) {
      rep.n_plus = n;
      rep.lambda_bound = Rational(r) / n;
      rep.counterexample.reset();
      return rep;
    }
  }
  return rep;
}

bool verify_nplus(const RuleTable& rule, int n) {
  const int r = rule.radius();
  const int k = rule.alphabet().size();
  const Interval W = nplus_window(r, n);
  const Coord fixed = -r - W.lo;  // cells shared by x and y
  const Coord free = W.length() - fixed;
  const std::uint64_t nx = count_configs(k, W.length()), ny = count_configs(k, free);
  if (nx > kMaxConfigurations || ny > kMaxConfigurations || nx * ny > (1ull << 34))
    throw Error("verification window too large");
  std::vector<Symbol> xc(static_cast<std::size_t>(W.length())), tail(static_cast<std::size_t>(free));
  for (std::uint64_t a = 0; a < nx; ++a) {
    decode(a, k, xc);
    auto ox = orbit(make_window(xc, W.lo), rule, n);
    for (std::uint64_t b = 0; b < ny; ++b) {
      decode(b, k, tail);
      std::vector<Symbol> yc(xc.begin(), xc.begin() + fixed);
      yc.insert(yc.end(), tail.begin(), tail.end());
      bool differs = false;
      for (Coord c = r; c <= 2 * r; ++c) differs = differs || xc[static_cast<std::size_t>(c - W.lo)] != yc[static_cast<std::size_t>(c - W.lo)];
      if (!differs) continue;
      auto oy = orbit(make_window(yc, W.lo), rule, n);
      bool agree = true;
      for (int m = 1; m <= n && agree; ++m)
        for (Coord c = -r; c <= r && agree; ++c) agree = ox[static_cast<std::size_t>(m)].at(c) == oy[static_cast<std::size_t>(m)].at(c);
      if (agree) return false;
    }
  }
  return true;
}

std::string to_string(CheckStatus s) {
  switch (s) {
    case CheckStatus::Pass:
      return "pass";
    case CheckStatus::Fail:
      return "fail";
    case CheckStatus::Inconclusive:
      return "inconclusive";
  }
  return "?";
}

GrowthCheck expansive_growth_check(const Dynamics& dyn, const ExpansivityReport& report, const WindowConfig& x,
                                   int t_max, Side side, const BracketOptions& opt) {
  GrowthCheck out;
  if (!report.n_plus) {
    out.status = CheckStatus::Fail;
    out.note = "no N+ found up to depth " + std::to_string(report.cap);
    return out;
  }
  const int N = *report.n_plus;
  const int r = report.radius;
  out.status = CheckStatus::Pass;
  for (int t = 1; t <= t_max; ++t) {
    GrowthRow row;
    row.t = t;
    row.n = t * N;
    row.required = (t + 1) * r;
    auto b = in_bracket(x, dyn, row.n, side, opt);
    row.lower = b.lower;
    row.upper = b.upper;
    out.rows.push_back(row);
    if (b.upper < row.required) {
      out.status = CheckStatus::Fail;
      out.note = "upper bracket below the required growth at t=" + std::to_string(t);
    } else if (b.lower < row.required && out.status == CheckStatus::Pass) {
      out.status = CheckStatus::Inconclusive;
      out.note = "bracket straddles the required growth at t=" + std::to_string(t);
    }
  }
  return out;
}

std::optional<std::int64_t> central_divergence(const WindowConfig& x, const WindowConfig& y, std::int64_t horizon) {
  for (const auto* w : {&x, &y}) {
    if (!w->projected) throw Error("central divergence needs emitter-separated windows");
    if (!w->valid.contains(1) || !w->in_window(1)) throw WindowExhausted("window does not reach coordinate 1", 0);
  }
  auto reach = [](const WindowConfig& w) {
    Coord lo = std::max(w.valid.lo, w.lo());
    return (-1 - lo) / 2;
  };
  const std::int64_t supported = std::max<std::int64_t>(0, std::min(reach(x), reach(y)));
  const std::int64_t limit = std::min(horizon, supported);
  auto differs = [](const std::vector<Symbol>& a, const std::vector<Symbol>& b) {
    const std::size_t n = a.size();
    return a[n - 1] != b[n - 1] || a[n - 2] != b[n - 2] || a[n - 3] != b[n - 3];
  };
  std::int64_t H = std::min<std::int64_t>(limit, 256);
  while (true) {
    const Coord L = -1 - 2 * H;
    std::vector<Symbol> a, b;
    for (Coord c = L; c <= 1; ++c) {
      a.push_back(x.at(c));
      b.push_back(y.at(c));
    }
    if (differs(a, b)) return 0;
    std::size_t lo = 0;
    for (std::int64_t t = 1; t <= H; ++t) {
      for (auto* v : {&a, &b}) {
        auto& w = *v;
        for (std::size_t i = w.size() - 1; i >= lo + 2; --i) w[i] = fd_local(w[i - 2], w[i - 1], w[i]);
      }
      lo += 2;
      if (differs(a, b)) return t;
    }
    if (H >= limit) break;
    H = std::min(2 * H, limit);
  }
  if (limit < horizon) throw WindowExhausted("window supports only " + std::to_string(limit) + " steps", static_cast<int>(limit));
  return std::nullopt;
}

WindowConfig resize_counter(const WindowConfig& x, int index, int new_length) {
  if (new_length < 3) throw Error("counter length below 3");
  auto span = counter_span(x, index);
  if (!span) throw Error("counter " + std::to_string(index) + " not visible");
  const int old = static_cast<int>(span->length()) - 2;
  const Coord delta = new_length - old;
  WindowConfig y;
  y.origin = x.lo() - delta;
  y.time = x.time;
  y.projected = x.projected;
  for (Coord c = x.lo(); c <= span->lo; ++c) y.cells.push_back(x.at(c));
  for (int j = 0; j < new_length; ++j) y.cells.push_back(j < old ? x.at(span->lo + 1 + j) : Symbol{0});
  for (Coord c = span->hi; c <= x.hi(); ++c) y.cells.push_back(x.at(c));
  y.valid = {x.valid.lo - delta, x.valid.hi};
  return y;
}

DivergenceRecord sensitivity_divergence(const WindowConfig& x, int index, int new_length, std::int64_t t_max) {
  if (index >= 0) throw Error("only counters left of the origin can be resized");
  DivergenceRecord rec;
  rec.index = index;
  rec.new_length = new_length;
  rec.horizon = t_max;
  auto span = counter_span(x, index);
  if (!span) throw Error("counter " + std::to_string(index) + " not visible");
  rec.old_length = static_cast<int>(span->length()) - 2;
  WindowConfig y = resize_counter(x, index, new_length);
  rec.depth = 0;
  for (Coord c = std::min(x.hi(), y.hi()); c >= std::max(x.lo(), y.lo()); --c)
    if (x.at(c) != y.at(c)) {
      rec.depth = -c;
      break;
    }
  rec.time = central_divergence(x, y, t_max);

  rec.central = x.at(0) == kE ? -1 : 0;
  auto lx = lengths_from(phi(x), rec.central);
  auto ly = lengths_from(phi(y), rec.central);
  std::size_t j = 0;
  while (j < lx.size() && j < ly.size() && lx[j] == ly[j]) ++j;
  // Terms beyond 64 bits past the first difference only enter through gap_error.
  const std::size_t keep = lx == ly ? 0 : j;
  auto cut = [&](std::vector<int>& ls) {
    int s = 0;
    std::size_t n = 0;
    while (n < ls.size() && (n <= keep || s < 64)) {
      if (n > keep) s += ls[n];
      ++n;
    }
    ls.resize(n);
  };
  cut(lx);
  cut(ly);
  auto px = real_period_formula(lx);
  auto py = real_period_formula(ly);
  rec.gap = abs(px.value - py.value);
  rec.gap_error = px.truncation_error + py.truncation_error;
  if (j < lx.size() && j < ly.size()) {
    int s = 0;
    for (std::size_t i = 0; i < j; ++i) s += lx[i];
    s += std::min(lx[j], ly[j]);
    rec.margin = Rational(3, 7) / Rational(boost::multiprecision::cpp_int(1) << s);
  }
  return rec;
}

bool replay_divergence(const WindowConfig& x, const DivergenceRecord& rec) {
  auto again = sensitivity_divergence(x, rec.index, rec.new_length, rec.horizon);
  return again.time == rec.time && again.depth == rec.depth && again.gap == rec.gap;
}

ExpansivenessStat mu_expansiveness_stat(const MeasureParams& params, std::size_t pairs,
                                        const std::vector<std::int64_t>& horizons, const std::vector<int>& depths,
                                        bool identical) {
  if (horizons.empty() || depths.empty()) throw Error("need horizons and depths");
  const std::int64_t hmax = *std::max_element(horizons.begin(), horizons.end());
  MeasureParams q = params;
  q.min_cells_per_side = std::max<Coord>(params.min_cells_per_side, 2 * hmax + 16);
  ExpansivenessStat stat;
  stat.times.assign(depths.size(), {});
  for (std::size_t i = 0; i < pairs; ++i) {
    WindowConfig x = sample_stationary(q, i);
    for (std::size_t d = 0; d < depths.size(); ++d) {
      if (depths[d] < 1) throw Error("depth must be at least 1");
      WindowConfig y = x;
      if (!identical) {
        auto span = counter_span(x, -depths[d]);
        if (!span) throw Error("counter -" + std::to_string(depths[d]) + " not visible");
        MeasureParams fresh = q;
        fresh.seed = params.seed ^ (0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(depths[d] + 1));
        WindowConfig z = sample_omega_star(fresh, i);
        y.cells.clear();
        for (Coord c = z.lo(); c < 0; ++c) y.cells.push_back(z.at(c));
        for (Coord c = span->hi; c <= x.hi(); ++c) y.cells.push_back(x.at(c));
        y.origin = span->hi + z.lo();
        y.valid = y.extent();
      }
      stat.times[d].push_back(central_divergence(x, y, hmax));
    }
  }
  for (std::size_t d = 0; d < depths.size(); ++d)
    for (std::int64_t h : horizons) {
      ExpansivenessRow row;
      row.depth = depths[d];
      row.horizon = h;
      row.pairs = pairs;
      for (const auto& t : stat.times[d]) row.diverged += t && *t <= h;
      stat.rows.push_back(row);
    }
  return stat;
}

}  // namespace counterca
