#include "counterca/measures.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <nlohmann/json.hpp>
#include <random>
#include <unordered_map>

#include "counterca/counter_automaton.hpp"

namespace counterca {

namespace {

enum class Stream : std::uint64_t { Lengths = 1, Origin, Left, Right, BurnIn };

std::uint64_t splitmix(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::mt19937_64 stream(std::uint64_t seed, std::uint64_t index, Stream s) {
  std::uint64_t st = seed;
  std::uint64_t h = splitmix(st);
  st = h ^ (index * 0xd1342543de82ef95ULL);
  h = splitmix(st);
  st = h ^ (static_cast<std::uint64_t>(s) * 0x2545f4914f6cdd1dULL);
  return std::mt19937_64(splitmix(st));
}

int draw_length(const MeasureParams& p, std::mt19937_64& rng) {
  std::geometric_distribution<int> g(1.0 - p.nu);
  return p.min_length + g(rng);
}

void push_digits(std::vector<Symbol>& out, int l, std::mt19937_64& rng) {
  std::uint64_t bits = 0;
  int left = 0;
  for (int j = 0; j < l; ++j) {
    if (left == 0) {
      bits = rng();
      left = 64;
    }
    out.push_back(static_cast<Symbol>(bits & 1));
    bits >>= 1;
    --left;
  }
}

// Size-biased origin length with weight (l + a) nu_*(l).
int draw_biased_length(const MeasureParams& p, int a, std::mt19937_64& rng) {
  const double total = mean_length(p) + a;
  double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  double acc = 0;
  for (int l = p.min_length;; ++l) {
    double w = (l + a) * length_pmf(p, l) / total;
    acc += w;
    if (u < acc || w < 1e-17) return l;
  }
}

// Origin counter with left emitter at -offset, then counters outward on both sides.
WindowConfig build(const MeasureParams& p, std::uint64_t index, int l0, int offset, std::mt19937_64& origin_rng) {
  std::vector<Symbol> mid{kE};
  push_digits(mid, l0, origin_rng);
  mid.push_back(kE);
  const Coord left_e = -offset;
  Coord hi = left_e + l0 + 1;

  auto right_rng = stream(p.seed, index, Stream::Right);
  std::vector<Symbol> right;
  for (int n = 0; n < p.half_width || hi < p.min_cells_per_side; ++n) {
    int l = draw_length(p, right_rng);
    push_digits(right, l, right_rng);
    right.push_back(kE);
    hi += l + 1;
  }

  auto left_rng = stream(p.seed, index, Stream::Left);
  std::vector<Symbol> left;  // built right to left
  Coord lo = left_e;
  for (int n = 0; n < p.half_width || lo > -p.min_cells_per_side; ++n) {
    int l = draw_length(p, left_rng);
    std::vector<Symbol> block;
    push_digits(block, l, left_rng);
    for (auto it = block.rbegin(); it != block.rend(); ++it) left.push_back(*it);
    left.push_back(kE);
    lo -= l + 1;
  }

  WindowConfig w;
  w.origin = lo;
  w.cells.reserve(left.size() + mid.size() + right.size());
  w.cells.assign(left.rbegin(), left.rend());
  w.cells.insert(w.cells.end(), mid.begin(), mid.end());
  w.cells.insert(w.cells.end(), right.begin(), right.end());
  w.valid = w.extent();
  w.projected = true;
  return w;
}

}  // namespace

std::string to_string(StationaryConvention c) {
  return c == StationaryConvention::Renewal ? "renewal" : "tower";
}

StationaryConvention parse_convention(const std::string& text) {
  if (text == "renewal") return StationaryConvention::Renewal;
  if (text == "tower") return StationaryConvention::TowerShifts;
  throw ParseError("unknown stationary convention '" + text + "'");
}

void validate(const MeasureParams& p) {
  if (!(p.nu > 0 && p.nu < 1)) throw Error("nu must lie in (0, 1)");
  if (p.min_length != 3) throw Error("min_length must be 3");
  if (p.half_width < 1) throw Error("half_width must be at least 1");
  if (p.burn_in_T < 1) throw Error("burn_in_T must be at least 1");
  if (p.min_cells_per_side < 0) throw Error("min_cells_per_side must be non-negative");
}

double length_pmf(const MeasureParams& p, int l) {
  if (l < p.min_length) return 0;
  return std::pow(p.nu, l - p.min_length) * (1 - p.nu);
}

double mean_length(const MeasureParams& p) { return p.min_length + p.nu / (1 - p.nu); }

double length_entropy(const MeasureParams& p) {
  const double q = 1 - p.nu;
  return -(p.nu * std::log(p.nu) + q * std::log(q)) / q;
}

double renewal_entropy_rate(const MeasureParams& p) {
  const double m = mean_length(p);
  return (length_entropy(p) + m * std::log(2.0)) / (m + 1);
}

std::vector<int> sample_lengths(const MeasureParams& p, std::size_t count) {
  validate(p);
  auto rng = stream(p.seed, 0, Stream::Lengths);
  std::vector<int> out(count);
  for (auto& l : out) l = draw_length(p, rng);
  return out;
}

WindowConfig sample_omega_star(const MeasureParams& p, std::uint64_t index, SampleInfo* info) {
  validate(p);
  auto rng = stream(p.seed, index, Stream::Origin);
  int l0 = draw_length(p, rng);
  if (info) *info = {index, l0, 0, 0};
  return build(p, index, l0, 0, rng);
}

WindowConfig sample_stationary(const MeasureParams& p, std::uint64_t index, SampleInfo* info) {
  validate(p);
  auto rng = stream(p.seed, index, Stream::Origin);
  const int a = p.convention == StationaryConvention::Renewal ? 1 : 0;
  int l0 = draw_biased_length(p, a, rng);
  int offset = std::uniform_int_distribution<int>(0, l0 - 1 + a)(rng);
  if (info) *info = {index, l0, offset, 0};
  return build(p, index, l0, offset, rng);
}

WindowConfig sample_bernoulli(int alphabet_size, std::uint64_t seed, std::uint64_t index, const Interval& span) {
  if (alphabet_size < 2) throw Error("alphabet needs at least two symbols");
  auto rng = stream(seed, index, Stream::Origin);
  std::uniform_int_distribution<int> d(0, alphabet_size - 1);
  WindowConfig w;
  w.origin = span.lo;
  w.cells.resize(static_cast<std::size_t>(span.length()));
  for (auto& s : w.cells) s = static_cast<Symbol>(d(rng));
  w.valid = w.extent();
  return w;
}

BurnIn cesaro_burnin_k(const WindowConfig& cfg, int k, std::optional<Interval> keep) {
  const auto& F = counter_automaton();
  WindowConfig w = cfg;
  if (keep) {
    const Coord m = k == 0 ? 0
                           : static_cast<Coord>(F.radius_for(cfg.projected)) +
                                 static_cast<Coord>(F.effective_radius()) * (k - 1);
    Interval need{keep->lo - m, keep->hi + m};
    Interval have = intersect(cfg.valid, cfg.extent());
    if (need.lo < have.lo || need.hi > have.hi) throw WindowExhausted("window does not cover the burn-in cone", 0);
    w = cfg.trimmed(need);
  }
  for (int j = 0; j < k; ++j) {
    try {
      w = F.step(w);
    } catch (const WindowExhausted&) {
      throw WindowExhausted("burn-in of " + std::to_string(k) + " steps exhausted the window", j);
    }
  }
  return {std::move(w), k};
}

BurnIn cesaro_burnin(const WindowConfig& cfg, int T, std::uint64_t seed, std::optional<Interval> keep) {
  if (T < 1) throw Error("burn-in horizon must be at least 1");
  auto rng = stream(seed, 0, Stream::BurnIn);
  int k = std::uniform_int_distribution<int>(0, T - 1)(rng);
  return cesaro_burnin_k(cfg, k, keep);
}

int draw_burnin(const MeasureParams& p, std::uint64_t index) {
  auto rng = stream(p.seed, index, Stream::BurnIn);
  return std::uniform_int_distribution<int>(0, p.burn_in_T - 1)(rng);
}

std::optional<Interval> counter_span(const WindowConfig& cfg, int i) {
  const auto es = validate_omega(cfg).emitters;
  auto it = std::upper_bound(es.begin(), es.end(), Coord{0});
  if (it == es.begin()) return std::nullopt;
  const auto j0 = static_cast<long>(it - es.begin()) - 1;
  const long a = j0 + i;
  if (a < 0 || a + 1 >= static_cast<long>(es.size())) return std::nullopt;
  return Interval{es[static_cast<std::size_t>(a)], es[static_cast<std::size_t>(a + 1)]};
}

WindowConfig sample_burned_in(const MeasureParams& p, std::uint64_t index, const Interval& keep, SampleInfo* info) {
  MeasureParams q = p;
  const Coord reach = std::max(-keep.lo, keep.hi) + 2 * static_cast<Coord>(p.burn_in_T) + 8;
  q.min_cells_per_side = std::max(p.min_cells_per_side, reach);
  SampleInfo local;
  WindowConfig x = sample_stationary(q, index, &local);
  const int k = draw_burnin(p, index);
  local.burn_in = k;
  if (info) *info = local;
  return cesaro_burnin_k(x, k, keep).cfg;
}

std::string to_string(SampleKind k) {
  switch (k) {
    case SampleKind::OmegaStar:
      return "omega-star";
    case SampleKind::Stationary:
      return "stationary";
    case SampleKind::BurnedIn:
      return "burned-in";
  }
  return "?";
}

SampleKind parse_sample_kind(const std::string& text) {
  for (auto k : {SampleKind::OmegaStar, SampleKind::Stationary, SampleKind::BurnedIn})
    if (to_string(k) == text) return k;
  throw ParseError("unknown sample kind '" + text + "'");
}

std::vector<WindowConfig> sample_batch(SampleKind kind, const MeasureParams& p, std::size_t count,
                                       SampleManifest* manifest, Interval keep) {
  std::vector<WindowConfig> out;
  out.reserve(count);
  if (manifest) {
    manifest->kind = kind;
    manifest->params = p;
    manifest->keep = keep;
    manifest->entries.clear();
  }
  for (std::size_t i = 0; i < count; ++i) {
    SampleInfo info;
    switch (kind) {
      case SampleKind::OmegaStar:
        out.push_back(sample_omega_star(p, i, &info));
        break;
      case SampleKind::Stationary:
        out.push_back(sample_stationary(p, i, &info));
        break;
      case SampleKind::BurnedIn:
        out.push_back(sample_burned_in(p, i, keep, &info));
        break;
    }
    if (manifest) manifest->entries.push_back(info);
  }
  return out;
}

std::vector<WindowConfig> replay_manifest(const SampleManifest& m) {
  std::vector<WindowConfig> out;
  out.reserve(m.count());
  for (const auto& e : m.entries) {
    SampleInfo info;
    switch (m.kind) {
      case SampleKind::OmegaStar:
        out.push_back(sample_omega_star(m.params, e.index, &info));
        break;
      case SampleKind::Stationary:
        out.push_back(sample_stationary(m.params, e.index, &info));
        break;
      case SampleKind::BurnedIn:
        out.push_back(sample_burned_in(m.params, e.index, m.keep, &info));
        break;
    }
    if (info.origin_length != e.origin_length || info.offset != e.offset || info.burn_in != e.burn_in)
      throw Error("manifest entry " + std::to_string(e.index) + " does not replay");
  }
  return out;
}

std::string SampleManifest::to_json() const {
  nlohmann::json j;
  j["kind"] = to_string(kind);
  j["params"] = {{"nu", params.nu},
                 {"min_length", params.min_length},
                 {"half_width", params.half_width},
                 {"min_cells_per_side", params.min_cells_per_side},
                 {"burn_in_T", params.burn_in_T},
                 {"seed", params.seed},
                 {"convention", to_string(params.convention)}};
  j["keep"] = {keep.lo, keep.hi};
  j["count"] = entries.size();
  auto& arr = j["entries"] = nlohmann::json::array();
  for (const auto& e : entries) arr.push_back({e.index, e.origin_length, e.offset, e.burn_in});
  return j.dump(1);
}

SampleManifest SampleManifest::from_json(const std::string& text) {
  SampleManifest m;
  try {
    auto j = nlohmann::json::parse(text);
    m.kind = parse_sample_kind(j.at("kind").get<std::string>());
    const auto& p = j.at("params");
    m.params.nu = p.at("nu").get<double>();
    m.params.min_length = p.at("min_length").get<int>();
    m.params.half_width = p.at("half_width").get<int>();
    m.params.min_cells_per_side = p.at("min_cells_per_side").get<Coord>();
    m.params.burn_in_T = p.at("burn_in_T").get<int>();
    m.params.seed = p.at("seed").get<std::uint64_t>();
    m.params.convention = parse_convention(p.at("convention").get<std::string>());
    m.keep = {j.at("keep").at(0).get<Coord>(), j.at("keep").at(1).get<Coord>()};
    for (const auto& e : j.at("entries"))
      m.entries.push_back({e.at(0).get<std::uint64_t>(), e.at(1).get<int>(), e.at(2).get<int>(), e.at(3).get<int>()});
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("bad sample manifest: ") + e.what());
  }
  return m;
}

ConditionStarReport check_condition_star(const std::vector<WindowConfig>& samples, const MeasureParams& p) {
  ConditionStarReport rep;
  rep.samples = samples.size();
  rep.min_counters = samples.empty() ? 0 : std::numeric_limits<int>::max();
  std::map<std::vector<Coord>, std::size_t> seen;
  for (const auto& x : samples) {
    auto om = validate_omega(x);
    if (om.in_omega && om.emitters.size() >= 2) ++rep.in_omega;
    rep.min_counters = std::min(rep.min_counters, static_cast<int>(om.emitters.size()) - 1);
    rep.collisions += seen[om.emitters]++;
  }
  if (rep.min_counters < 0) rep.min_counters = 0;
  const double q = (1 - p.nu) / (1 + p.nu);  // sum of nu_*(l)^2
  const double n = static_cast<double>(rep.samples);
  rep.expected_collisions = n * (n - 1) / 2 * std::pow(q, rep.min_counters);
  return rep;
}

const UniformityClass* UniformityReport::find(const std::vector<int>& lengths) const {
  for (const auto& c : classes)
    if (c.lengths == lengths) return &c;
  return nullptr;
}

UniformityReport uniformity_check(const std::vector<CounterLine>& lines, int index, std::vector<int> condition_on,
                                  std::size_t min_count) {
  if (condition_on.empty()) condition_on = {index};
  UniformityReport rep;
  rep.index = index;
  std::map<std::vector<int>, std::map<std::uint64_t, std::size_t>> hist;
  std::map<std::vector<int>, std::size_t> totals;
  for (const auto& line : lines) {
    bool ok = line.has_index(index) && line.reliable(index);
    for (int j : condition_on) ok = ok && line.has_index(j);
    if (!ok) {
      ++rep.skipped;
      continue;
    }
    std::vector<int> key;
    for (int j : condition_on) key.push_back(line.at(j).l);
    ++hist[key][line.at(index).c];
    ++totals[key];
  }
  const auto pos = static_cast<std::size_t>(std::find(condition_on.begin(), condition_on.end(), index) -
                                            condition_on.begin());
  for (const auto& [key, h] : hist) {
    UniformityClass cls;
    cls.lengths = key;
    cls.count = totals[key];
    if (pos == condition_on.size()) {
      rep.notes.push_back("counter " + std::to_string(index) + " length not in the conditioning set");
      continue;
    }
    const int l = key[pos];
    const double u = std::ldexp(1.0, -l);
    const double n = static_cast<double>(cls.count);
    double tv = 0;
    std::size_t seen = 0;
    for (const auto& [c, cnt] : h) {
      tv += std::abs(static_cast<double>(cnt) / n - u);
      ++seen;
    }
    tv += u * static_cast<double>((std::uint64_t{1} << l) - seen);
    cls.tv = tv / 2;
    cls.starved = cls.count < min_count;
    if (cls.starved) {
      std::string k;
      for (int v : key) k += (k.empty() ? "" : ",") + std::to_string(v);
      rep.notes.push_back("class (" + k + ") starved with " + std::to_string(cls.count) + " samples");
    }
    rep.classes.push_back(cls);
  }
  return rep;
}

namespace {

struct PrefixStats {
  double h = 0;
  double var = 0;  // of -log p(word)
  std::size_t distinct = 0;
  std::size_t singletons = 0;
};

using Key = std::string;

Key prefix_key(const std::vector<Symbol>& w, std::size_t len) {
  return Key(reinterpret_cast<const char*>(w.data()), len);
}

PrefixStats prefix_stats(const std::vector<std::vector<Symbol>>& words, std::size_t len,
                         std::unordered_map<Key, std::size_t>& counts) {
  counts.clear();
  for (const auto& w : words) ++counts[prefix_key(w, len)];
  PrefixStats s;
  const double n = static_cast<double>(words.size());
  double m2 = 0;
  for (const auto& [k, c] : counts) {
    double p = static_cast<double>(c) / n;
    double info = -std::log(p);
    s.h += p * info;
    m2 += p * info * info;
    if (c == 1) ++s.singletons;
  }
  s.var = std::max(0.0, m2 - s.h * s.h);
  s.distinct = counts.size();
  return s;
}

EntropyEstimate estimate(const std::vector<std::vector<Symbol>>& words, std::size_t len, std::size_t prev,
                         int k, double divisor) {
  EntropyEstimate e;
  e.k = k;
  e.samples = words.size();
  if (words.empty()) throw Error("entropy of an empty sample");
  for (const auto& w : words)
    if (w.size() < len) throw Error("word shorter than the requested block");
  std::unordered_map<Key, std::size_t> full, part;
  auto sf = prefix_stats(words, len, full);
  prefix_stats(words, prev, part);
  const double n = static_cast<double>(words.size());
  e.block = sf.h / divisor;
  e.block_stderr = std::sqrt(sf.var / n) / divisor;
  // -log p(last | prefix) per sample
  double mean = 0, m2 = 0;
  for (const auto& [key, c] : full) {
    double pc = static_cast<double>(part[key.substr(0, prev)]);
    double info = std::log(pc / static_cast<double>(c));
    double p = static_cast<double>(c) / n;
    mean += p * info;
    m2 += p * info * info;
  }
  e.difference = mean;
  e.difference_stderr = std::sqrt(std::max(0.0, m2 - mean * mean) / n);
  e.distinct = sf.distinct;
  e.coverage = 1.0 - static_cast<double>(sf.singletons) / n;
  e.undersampled = e.coverage < 0.9;
  return e;
}

}  // namespace

EntropyEstimate word_entropy(const std::vector<std::vector<Symbol>>& words, int k) {
  if (k < 1) throw Error("block length must be positive");
  return estimate(words, static_cast<std::size_t>(k), static_cast<std::size_t>(k - 1), k, k);
}

EntropyEstimate block_entropy(const std::vector<WindowConfig>& samples, int k) {
  if (k < 1) throw Error("block length must be positive");
  std::vector<std::vector<Symbol>> words;
  words.reserve(samples.size());
  for (const auto& x : samples) {
    if (!x.valid.contains(0) || !x.valid.contains(k - 1) || !x.in_window(0) || !x.in_window(k - 1))
      throw WindowExhausted("sample does not cover the block", 0);
    std::vector<Symbol> w(static_cast<std::size_t>(k));
    for (int j = 0; j < k; ++j) w[static_cast<std::size_t>(j)] = x.at(j);
    words.push_back(std::move(w));
  }
  return word_entropy(words, k);
}

std::vector<std::vector<Symbol>> column_words(const std::vector<WindowConfig>& samples, const Dynamics& dyn, int w,
                                              int T) {
  if (w < 1 || T < 1) throw Error("column width and horizon must be positive");
  std::vector<std::vector<Symbol>> out;
  out.reserve(samples.size());
  const Coord reach = static_cast<Coord>(dyn.radius()) * (T - 1);
  for (const auto& x : samples) {
    WindowConfig cur = x.trimmed({-reach, w - 1 + reach});
    std::vector<Symbol> word;
    word.reserve(static_cast<std::size_t>(w) * static_cast<std::size_t>(T));
    for (int t = 0; t < T; ++t) {
      if (t > 0) cur = dyn.step(cur);
      if (!cur.valid.contains(0) || !cur.valid.contains(w - 1))
        throw WindowExhausted("sample does not support the column horizon", t);
      for (int j = 0; j < w; ++j) word.push_back(cur.at(j));
    }
    out.push_back(std::move(word));
  }
  return out;
}

EntropyEstimate column_entropy(const std::vector<std::vector<Symbol>>& words, int w, int T) {
  if (w < 1 || T < 1) throw Error("column width and horizon must be positive");
  const auto len = static_cast<std::size_t>(w) * static_cast<std::size_t>(T);
  return estimate(words, len, len - static_cast<std::size_t>(w), T, T);
}

EntropyEstimate column_entropy(const std::vector<WindowConfig>& samples, const Dynamics& dyn, int w, int T) {
  return column_entropy(column_words(samples, dyn, w, T), w, T);
}

}  // namespace counterca
