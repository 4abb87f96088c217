#include "counterca/counter_model.hpp"

#include <algorithm>
#include <map>
#include <regex>
#include <sstream>

#include "counterca/channel.hpp"
#include "counterca/counter_automaton.hpp"
#include "counterca/engine.hpp"

namespace counterca {

void validate(const Counter& u) {
  if (u.l < 3 || u.l > kMaxCounterLength) throw Error("counter length " + std::to_string(u.l) + " out of range");
  if (u.c >= u.capacity()) throw Error("counter state " + to_string(u) + " exceeds capacity");
  if (u.r < 0 || u.r > u.l) throw Error("counter countdown " + to_string(u) + " out of range");
}

Counter increment_counter(const Counter& u, int a) {
  validate(u);
  if (a != 1 && a != 2) throw Error("increment must be 1 or 2");
  const std::uint64_t cap = u.capacity();
  const auto ua = static_cast<std::uint64_t>(a);
  Counter v = u;
  if (u.r > 0) {
    v.c = (u.c + ua) % cap;
    v.r = u.r - 1;
  } else if (u.c + ua < cap) {
    v.c = u.c + ua;
  } else {
    v.c = u.c + ua - cap;
    v.r = u.l;
  }
  return v;
}

std::string to_string(const Counter& u) {
  return "(" + std::to_string(u.l) + "," + std::to_string(u.c) + "," + std::to_string(u.r) + ")";
}

const Counter& CounterLine::at(int i) const {
  if (!has_index(i)) throw Error("counter index " + std::to_string(i) + " not in line");
  return counters[static_cast<std::size_t>(i - first_index)];
}

Counter& CounterLine::at(int i) {
  if (!has_index(i)) throw Error("counter index " + std::to_string(i) + " not in line");
  return counters[static_cast<std::size_t>(i - first_index)];
}

Coord CounterLine::left_e(int i) const {
  if (!has_positions()) throw Error("counter line has no emitter positions");
  if (!has_index(i)) throw Error("counter index " + std::to_string(i) + " not in line");
  return e_positions[static_cast<std::size_t>(i - first_index)];
}

std::optional<int> CounterLine::origin_index() const {
  if (!has_positions()) return std::nullopt;
  for (int i = first_index; i <= last_index(); ++i)
    if (left_e(i) <= 0 && e_positions[static_cast<std::size_t>(i - first_index) + 1] > 0) return i;
  return std::nullopt;
}

CounterLine make_line(std::vector<Counter> counters, Coord first_e, int first_index) {
  CounterLine line;
  line.first_index = first_index;
  Coord s = first_e;
  line.e_positions.push_back(s);
  for (const auto& u : counters) {
    validate(u);
    s += u.l + 1;
    line.e_positions.push_back(s);
  }
  line.counters = std::move(counters);
  return line;
}

std::string format_line(const CounterLine& line) {
  std::ostringstream os;
  os << "first_index=" << line.first_index;
  if (line.has_positions()) os << " first_e=" << line.e_positions.front();
  os << " time=" << line.time;
  if (line.cyclic) os << " cyclic=1";
  os << "\n";
  for (std::size_t i = 0; i < line.counters.size(); ++i) {
    const auto& u = line.counters[i];
    os << (i ? " " : "") << u.l << ":" << u.c << ":" << u.r;
  }
  os << "\n";
  return os.str();
}

CounterLine parse_line(const std::string& text) {
  std::istringstream is(text);
  std::string header;
  if (!std::getline(is, header)) throw ParseError("empty counter line");
  static const std::regex head(R"(^first_index=(-?\d+)(?: first_e=(-?\d+))? time=(-?\d+)( cyclic=1)?\s*$)");
  std::smatch m;
  if (!std::regex_match(header, m, head)) throw ParseError("bad counter line header: " + header);
  std::vector<Counter> counters;
  static const std::regex tok(R"(^(\d+):(\d+):(\d+)$)");
  std::string t;
  while (is >> t) {
    std::smatch tm;
    if (!std::regex_match(t, tm, tok)) throw ParseError("bad counter token: " + t);
    Counter u{std::stoi(tm[1]), std::stoull(tm[2]), std::stoi(tm[3])};
    try {
      validate(u);
    } catch (const Error& e) {
      throw ParseError(e.what());
    }
    counters.push_back(u);
  }
  CounterLine line;
  if (m[2].matched) {
    line = make_line(std::move(counters), std::stoll(m[2]), std::stoi(m[1]));
  } else {
    line.counters = std::move(counters);
    line.first_index = std::stoi(m[1]);
  }
  line.time = std::stoll(m[3]);
  line.cyclic = m[4].matched;
  return line;
}

CounterLine step_H(const CounterLine& line, LeftBoundary boundary) {
  if (line.counters.empty()) throw Error("empty counter line");
  CounterLine out = line;
  out.time = line.time + 1;
  const std::size_t n = line.counters.size();
  for (std::size_t i = 0; i < n; ++i) {
    bool left_emits;
    if (i > 0)
      left_emits = line.counters[i - 1].emits();
    else if (line.cyclic)
      left_emits = line.counters[n - 1].emits();
    else
      left_emits = boundary == LeftBoundary::Overflow;
    out.counters[i] = increment_counter(line.counters[i], left_emits ? 2 : 1);
  }
  if (!line.cyclic && boundary == LeftBoundary::Unknown) out.unreliable = std::min(line.unreliable + 1, line.size());
  return out;
}

namespace {

std::vector<Coord> visible_emitters(const WindowConfig& cfg) {
  Interval v = intersect(cfg.valid, cfg.extent());
  std::vector<Coord> es;
  for (Coord p = v.lo; p <= v.hi; ++p)
    if (cfg.at(p) == kE) es.push_back(p);
  return es;
}

CounterLine blocks(const WindowConfig& cfg, const std::vector<Coord>& es, int first_index) {
  CounterLine line;
  line.first_index = first_index;
  line.e_positions = es;
  line.time = cfg.time;
  for (std::size_t k = 0; k + 1 < es.size(); ++k) {
    const Coord s = es[k];
    const int l = static_cast<int>(es[k + 1] - s - 1);
    if (l < 3 || l > kMaxCounterLength)
      throw Error("block of length " + std::to_string(l) + " after emitter at " + std::to_string(s));
    unsigned __int128 d = 0;
    int top = 0;
    for (int j = l; j >= 1; --j) {
      Symbol x = cfg.at(s + j);
      d = 2 * d + x;
      if (x > 1 && top == 0) top = j;
    }
    const unsigned __int128 cap = static_cast<unsigned __int128>(1) << l;
    Counter u{l, static_cast<std::uint64_t>(d % cap), d >= cap ? l + 1 - top : 0};
    line.counters.push_back(u);
  }
  return line;
}

}  // namespace

CounterLine phi(const WindowConfig& cfg) {
  auto es = visible_emitters(cfg);
  if (es.size() < 2) throw Error("fewer than two emitters visible");
  auto zero = std::upper_bound(es.begin(), es.end(), Coord{0});
  if (zero == es.begin()) throw Error("no emitter at a coordinate <= 0");
  return blocks(cfg, es, -static_cast<int>((zero - es.begin()) - 1));
}

SemiconjugacyReport check_semiconjugacy(const WindowConfig& cfg, int t, LeftBoundary boundary) {
  SemiconjugacyReport rep;
  WindowConfig x = cfg;
  if (!validate_omega(x).violations.empty()) throw Error("configuration is not emitter-separated");
  x.projected = true;
  CounterLine model = phi(x);
  for (int k = 0;; ++k) {
    auto es = visible_emitters(x);
    if (es.empty()) es.push_back(0);
    CounterLine seen = blocks(x, es, 0);
    std::map<Coord, const Counter*> by_e;
    for (int i = seen.first_index; i <= seen.last_index(); ++i) by_e[seen.left_e(i)] = &seen.at(i);
    for (int i = model.first_index; i <= model.last_index(); ++i) {
      if (boundary == LeftBoundary::Unknown && !model.reliable(i)) continue;
      auto it = by_e.find(model.left_e(i));
      if (it == by_e.end()) continue;
      ++rep.compared;
      if (!(*it->second == model.at(i))) {
        rep.ok = false;
        rep.mismatch = SemiconjugacyMismatch{k, model.left_e(i), model.at(i), *it->second};
        return rep;
      }
    }
    if (k == t) break;
    try {
      x = step_F(x);
    } catch (const WindowExhausted& e) {
      throw WindowExhausted("semi-conjugacy check exhausted at step " + std::to_string(k) + ": " + e.what(), k);
    }
    model = step_H(model, boundary);
  }
  return rep;
}

PeriodEstimate real_period_formula(const std::vector<int>& lengths) {
  if (lengths.empty()) throw Error("no counter lengths");
  PeriodEstimate p;
  Rational term = 1;
  for (int l : lengths) {
    if (l < 3) throw Error("counter length below 3");
    term /= Rational(boost::multiprecision::cpp_int(1) << l);
    p.value += term;
  }
  p.terms = static_cast<int>(lengths.size());
  p.truncation_error = term / 7;
  return p;
}

PeriodEstimate real_period_periodic(const std::vector<int>& pattern) {
  if (pattern.empty()) throw Error("empty length pattern");
  PeriodEstimate block = real_period_formula(pattern);
  Rational ratio = block.truncation_error * 7;
  PeriodEstimate p;
  p.value = block.value / (1 - ratio);
  p.terms = block.terms;
  p.truncation_error = 0;
  return p;
}

OverflowFrequency real_period_empirical(const CounterLine& line, int index, std::int64_t t, LeftBoundary boundary) {
  if (!line.has_index(index)) throw Error("counter index " + std::to_string(index) + " not in line");
  if (t <= 0) throw Error("need a positive number of steps");
  if (!line.cyclic && boundary == LeftBoundary::Unknown && index - line.first_index - line.unreliable < t)
    throw Error("reliability horizon exceeded: counter " + std::to_string(index) + " has " +
                std::to_string(index - line.first_index - line.unreliable) + " reliable counters on its left, needs " +
                std::to_string(t));
  const bool has_left = line.cyclic || index > line.first_index;
  const int left = index > line.first_index ? index - 1 : line.last_index();
  OverflowFrequency f;
  f.index = index;
  f.steps = t;
  CounterLine cur = line;
  // Counters right of index never influence it.
  cur.counters.resize(static_cast<std::size_t>(line.cyclic ? line.size() : index - line.first_index + 1));
  if (!line.cyclic && cur.has_positions()) cur.e_positions.resize(cur.counters.size() + 1);
  for (std::int64_t k = 0; k < t; ++k) {
    if (cur.at(index).emits()) ++f.count;
    if (has_left && cur.at(left).emits()) ++f.left_count;
    cur = step_H(cur, boundary);
  }
  if (!has_left && boundary == LeftBoundary::Overflow) f.left_count = t;
  const Counter& u = line.at(index);
  const double cap = static_cast<double>(u.capacity());
  const double td = static_cast<double>(t);
  const double in = td + static_cast<double>(f.left_count);
  f.frequency = static_cast<double>(f.count) / td;
  f.bracket_lo = (in - u.l) / cap / td;
  f.bracket_hi = (cap + in) / cap / td;
  f.in_bracket = f.bracket_lo <= f.frequency && f.frequency <= f.bracket_hi;
  f.certified_lo = (in - 2 * u.l - cap) / cap / td;
  f.certified_hi = (in + 2 * cap) / cap / td;
  f.in_certified = f.certified_lo <= f.frequency && f.frequency <= f.certified_hi;
  return f;
}

FrequencyBand stationary_band(double target, int min_length, std::int64_t t) {
  const double cap = static_cast<double>(std::uint64_t{1} << min_length);
  const double w = 2.0 * cap / ((cap - 1.0) * static_cast<double>(t));
  return {target - w, target + w};
}

namespace {

struct ModelOps {
  using State = std::uint64_t;
  const std::vector<Counter>* chain;

  static State pack(const Counter& u) { return (u.c << 6) | static_cast<std::uint64_t>(u.r); }
  Counter unpack(std::size_t k, State s) const {
    return Counter{(*chain)[k].l, s >> 6, static_cast<int>(s & 63)};
  }
  bool supported(std::size_t k) const { return (*chain)[k].l <= 32; }
  std::int64_t unsupported_arrival(std::size_t, std::int64_t u) const { return u + 1; }
  State advance(std::size_t k, State s, int a) const { return pack(increment_counter(unpack(k, s), a)); }
  bool emits(std::size_t, State s) const { return (s & 63) == 1; }
  State observe(std::size_t, State s) const { return s; }
  std::int64_t earliest_emission(std::size_t k, State s, std::int64_t t) const {
    Counter u = unpack(k, s);
    if (u.r > 0) return t + u.r - 1;
    auto need = static_cast<std::int64_t>((u.capacity() - u.c + 1) / 2);
    return t + need + u.l - 1;
  }
  bool cannot_emit_before(std::size_t k, const std::vector<State>& set, std::int64_t t, std::int64_t limit) const {
    for (State s : set)
      if (earliest_emission(k, s, t) < limit) return false;
    return true;
  }
};

}  // namespace

ModelCrossing crossing_time_model_from(const CounterLine& line, int first_uncertain, int target, std::int64_t horizon,
                                       std::size_t cap) {
  if (!line.has_index(first_uncertain) || !line.has_index(target) || first_uncertain > target)
    throw Error("insufficient coverage for the model crossing time");
  std::vector<Counter> chain(line.counters.begin() + (first_uncertain - line.first_index),
                             line.counters.begin() + (target - line.first_index) + 1);
  ModelOps ops{&chain};
  std::vector<std::uint64_t> init;
  for (const auto& u : chain) init.push_back(ModelOps::pack(u));
  auto res = run_channel(ops, init, {}, 0, horizon, cap);

  ModelCrossing mc;
  mc.first_uncertain = first_uncertain;
  mc.arrivals = res.input_arrival;
  mc.fallback = res.fallback;
  mc.reached = res.arrival <= horizon;
  mc.steps = res.arrival - 1;

  CounterLine loud = make_line(chain, 0);
  CounterLine quiet = loud;
  for (std::int64_t s = 0; s <= horizon; ++s) {
    if (!(loud.counters.back() == quiet.counters.back())) {
      mc.boundary_split = s - 1;
      break;
    }
    if (s == horizon) break;
    loud = step_H(loud, LeftBoundary::Overflow);
    quiet = step_H(quiet, LeftBoundary::Silent);
  }
  return mc;
}

ModelCrossing crossing_time_model(const CounterLine& line, std::int64_t n, std::int64_t horizon, std::size_t cap) {
  auto origin = line.origin_index();
  if (!origin) throw Error("insufficient coverage: no counter contains coordinate 0");
  int first = *origin;
  for (int i = line.first_index; i <= *origin; ++i)
    if (line.left_e(i) >= -n + 3) {
      first = i;
      break;
    }
  return crossing_time_model_from(line, first, *origin, horizon, cap);
}

}  // namespace counterca
