#include "counterca/engine.hpp"

#include <algorithm>
#include <array>

namespace counterca {

namespace {

std::size_t ipow(std::size_t base, int e) {
  std::size_t r = 1;
  for (int i = 0; i < e; ++i) r *= base;
  return r;
}

}  // namespace

WindowConfig step(const WindowConfig& cfg, const RuleTable& rule) {
  const int r = rule.radius();
  Interval v = intersect(cfg.valid, cfg.extent());
  if (v.length() < 2 * r + 1)
    throw WindowExhausted("valid interval of length " + std::to_string(v.length()) +
                              " cannot support a radius-" + std::to_string(r) + " step",
                          0);
  WindowConfig out;
  out.valid = {v.lo + r, v.hi - r};
  out.origin = out.valid.lo;
  out.time = cfg.time + 1;
  const auto n = static_cast<std::size_t>(out.valid.length());
  out.cells.resize(n);

  const Symbol* src = cfg.cells.data() + (v.lo - cfg.origin);
  const auto k = static_cast<std::size_t>(rule.alphabet().size());
  const std::size_t top = ipow(k, 2 * r);
  const auto& table = rule.entries();
  std::size_t idx = 0;
  for (int j = 0; j < 2 * r; ++j) idx = idx * k + src[j];
  for (std::size_t i = 0; i < n; ++i) {
    idx = idx * k + src[i + static_cast<std::size_t>(2 * r)];
    out.cells[i] = table[idx];
    idx -= src[i] * top;
  }
  return out;
}

namespace {

SymbolSet apply_set(const RuleTable& rule, const SymbolSet* nb, int w) {
  bool all_single = true;
  bool all_full = true;
  const SymbolSet full = rule.alphabet().full_mask();
  for (int j = 0; j < w; ++j) {
    all_single = all_single && is_singleton(nb[j]);
    all_full = all_full && nb[j] == full;
  }
  const auto k = static_cast<std::size_t>(rule.alphabet().size());
  if (all_single) {
    std::size_t idx = 0;
    for (int j = 0; j < w; ++j) idx = idx * k + singleton_value(nb[j]);
    return singleton(rule[idx]);
  }
  if (all_full) return rule.image_mask();

  std::array<std::array<Symbol, 8>, 16> members{};
  std::array<int, 16> count{};
  for (int j = 0; j < w; ++j) {
    count[j] = 0;
    for (int s = 0; s < 8; ++s)
      if (nb[j] & (1u << s)) members[j][count[j]++] = static_cast<Symbol>(s);
    if (count[j] == 0) return 0;
  }
  std::array<int, 16> pos{};
  SymbolSet out = 0;
  const SymbolSet image = rule.image_mask();
  while (true) {
    std::size_t idx = 0;
    for (int j = 0; j < w; ++j) idx = idx * k + members[j][pos[j]];
    out |= singleton(rule[idx]);
    if (out == image) return out;
    int j = w - 1;
    while (j >= 0 && ++pos[j] == count[j]) pos[j--] = 0;
    if (j < 0) return out;
  }
}

}  // namespace

SetConfig step(const SetConfig& cfg, const RuleTable& rule) {
  const int r = rule.radius();
  const int w = 2 * r + 1;
  if (w > 16) throw Error("set-valued step supports radius up to 7");
  if (cfg.open_left && cfg.valid.lo != cfg.lo()) throw Error("open-left set window must be valid at its edge");
  if (cfg.open_right && cfg.valid.hi != cfg.hi()) throw Error("open-right set window must be valid at its edge");
  Interval nv{cfg.open_left ? cfg.valid.lo : cfg.valid.lo + r, cfg.open_right ? cfg.valid.hi : cfg.valid.hi - r};
  if (nv.empty()) throw WindowExhausted("set window exhausted", 0);

  SetConfig out;
  out.origin = nv.lo;
  out.valid = nv;
  out.time = cfg.time + 1;
  out.open_left = cfg.open_left;
  out.open_right = cfg.open_right;
  out.cells.resize(static_cast<std::size_t>(nv.length()));
  const SymbolSet full = rule.alphabet().full_mask();
  std::array<SymbolSet, 16> nb{};
  for (Coord p = nv.lo; p <= nv.hi; ++p) {
    for (int j = 0; j < w; ++j) {
      Coord q = p - r + j;
      if (q < cfg.lo() || q > cfg.hi())
        nb[j] = full;
      else
        nb[j] = cfg.cells[static_cast<std::size_t>(q - cfg.origin)];
    }
    out.cells[static_cast<std::size_t>(p - nv.lo)] = apply_set(rule, nb.data(), w);
  }
  return out;
}

CyclicConfig step_cyclic(const CyclicConfig& cfg, const RuleTable& rule) {
  const int r = rule.radius();
  const auto n = static_cast<std::int64_t>(cfg.cells.size());
  if (n == 0) throw Error("empty cyclic configuration");
  const auto k = static_cast<std::size_t>(rule.alphabet().size());
  CyclicConfig out;
  out.time = cfg.time + 1;
  out.cells.resize(cfg.cells.size());
  for (std::int64_t i = 0; i < n; ++i) {
    std::size_t idx = 0;
    for (int j = -r; j <= r; ++j) idx = idx * k + cfg.cells[static_cast<std::size_t>(((i + j) % n + n) % n)];
    out.cells[static_cast<std::size_t>(i)] = rule[idx];
  }
  return out;
}

SpaceTimeDiagram orbit(const WindowConfig& cfg, const Dynamics& dyn, int t) {
  SpaceTimeDiagram d;
  d.rows.reserve(static_cast<std::size_t>(t) + 1);
  d.rows.push_back(cfg);
  for (int k = 0; k < t; ++k) {
    try {
      d.rows.push_back(dyn.step(d.rows.back()));
    } catch (const WindowExhausted& e) {
      throw WindowExhausted(std::string("orbit stopped at depth ") + std::to_string(k) + ": " + e.what(), k);
    }
  }
  return d;
}

SpaceTimeDiagram orbit(const WindowConfig& cfg, const RuleTable& rule, int t) {
  return orbit(cfg, TableDynamics("table", rule), t);
}

std::vector<SetConfig> set_valued_orbit(const SetConfig& cfg, const Dynamics& dyn, int t) {
  std::vector<SetConfig> rows{cfg};
  for (int k = 0; k < t; ++k) {
    try {
      rows.push_back(dyn.step(rows.back()));
    } catch (const WindowExhausted& e) {
      throw WindowExhausted(std::string("set orbit stopped at depth ") + std::to_string(k) + ": " + e.what(), k);
    }
  }
  return rows;
}

std::vector<std::optional<Interval>> diff_front(const WindowConfig& x, const WindowConfig& y, const Dynamics& dyn,
                                                int t) {
  auto ox = orbit(x, dyn, t);
  auto oy = orbit(y, dyn, t);
  std::vector<std::optional<Interval>> fronts;
  for (int k = 0; k <= t; ++k) {
    const auto& a = ox.rows[static_cast<std::size_t>(k)];
    const auto& b = oy.rows[static_cast<std::size_t>(k)];
    Interval common = intersect(intersect(a.valid, a.extent()), intersect(b.valid, b.extent()));
    std::optional<Interval> f;
    for (Coord c = common.lo; c <= common.hi; ++c) {
      if (a.at(c) != b.at(c)) {
        if (!f) f = Interval{c, c};
        f->hi = c;
      }
    }
    fronts.push_back(f);
  }
  return fronts;
}

PerturbationTrace track_perturbation(const SpaceTimeDiagram& base, std::span<const CellChange> changes,
                                     const Dynamics& dyn, int n, const FrontPredicate& stop) {
  if (base.size() < static_cast<std::size_t>(n) + 1) throw WindowExhausted("base orbit shorter than horizon", 0);
  PerturbationTrace trace;
  const WindowConfig& row0 = base.rows[0];
  std::vector<CellChange> applied;
  for (const auto& ch : changes) {
    if (!row0.valid.contains(ch.coord) || !row0.in_window(ch.coord))
      throw Error("perturbation outside the valid window");
    auto it = std::find_if(applied.begin(), applied.end(), [&](const CellChange& a) { return a.coord == ch.coord; });
    if (it != applied.end())
      it->value = ch.value;
    else
      applied.push_back(ch);
  }
  std::optional<Interval> front;
  for (const auto& ch : applied) {
    if (row0.at(ch.coord) != ch.value) {
      if (!front) front = Interval{ch.coord, ch.coord};
      front->lo = std::min(front->lo, ch.coord);
      front->hi = std::max(front->hi, ch.coord);
    }
  }
  trace.fronts.push_back(front);
  if (!front) return trace;

  WindowConfig y = row0.trimmed(*front);
  for (const auto& ch : applied)
    if (front->contains(ch.coord)) y.at(ch.coord) = ch.value;
  bool projected = false;
  if (stop && stop(*front)) {
    trace.stopped_early = true;
    return trace;
  }

  for (int k = 0; k < n; ++k) {
    const WindowConfig& bk = base.rows[static_cast<std::size_t>(k)];
    const WindowConfig& bnext = base.rows[static_cast<std::size_t>(k) + 1];
    const int r = dyn.radius_for(projected);
    Interval need{front->lo - 2 * r, front->hi + 2 * r};
    Interval bv = intersect(bk.valid, bk.extent());
    if (need.lo < bv.lo || need.hi > bv.hi)
      throw WindowExhausted("perturbation reached the edge of the recorded orbit at step " + std::to_string(k), k);
    WindowConfig w = bk.trimmed(need);
    for (Coord c = front->lo; c <= front->hi; ++c) w.at(c) = y.at(c);
    w.projected = projected;
    WindowConfig out = dyn.step(w);
    projected = out.projected;

    std::optional<Interval> nf;
    Interval cmp = intersect(out.valid, intersect(bnext.valid, bnext.extent()));
    for (Coord c = cmp.lo; c <= cmp.hi; ++c) {
      if (out.at(c) != bnext.at(c)) {
        if (!nf) nf = Interval{c, c};
        nf->hi = c;
      }
    }
    trace.fronts.push_back(nf);
    trace.steps = k + 1;
    if (!nf) return trace;
    front = nf;
    y = out.trimmed(*nf);
    if (stop && stop(*nf)) {
      trace.stopped_early = true;
      return trace;
    }
  }
  return trace;
}

std::shared_ptr<TableDynamics> xor_rule() {
  return std::make_shared<TableDynamics>(
      "xor", RuleTable::build(binary_alphabet(), 1, [](std::span<const Symbol> nb) {
        return static_cast<Symbol>(nb[0] ^ nb[2]);
      }));
}

std::shared_ptr<TableDynamics> identity_rule() {
  return std::make_shared<TableDynamics>(
      "identity", RuleTable::build(binary_alphabet(), 1, [](std::span<const Symbol> nb) { return nb[1]; }));
}

std::shared_ptr<TableDynamics> shift_rule() {
  return std::make_shared<TableDynamics>(
      "shift", RuleTable::build(binary_alphabet(), 1, [](std::span<const Symbol> nb) { return nb[2]; }));
}

}  // namespace counterca
