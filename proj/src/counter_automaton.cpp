#include "counterca/counter_automaton.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace counterca {

Alphabet counter_alphabet() { return Alphabet("0123E"); }

Symbol fd_local(Symbol left2, Symbol left1, Symbol center) {
  if (center == kE) return kE;
  int v = center - (is_high(center) ? 2 : 0) + (is_high(left1) ? 1 : 0);
  if (left1 == kE) v += 1 + (left2 == 2 ? 1 : 0);
  return static_cast<Symbol>(v);
}

Symbol fp_local(std::span<const Symbol> w) {
  if (w.size() != 7) throw Error("projection window must have 7 cells");
  if (w[3] != kE) return w[3];
  for (std::size_t j = 0; j < 7; ++j)
    if (j != 3 && w[j] == kE) return 0;
  return kE;
}

RuleTable digit_table() {
  return RuleTable::build(counter_alphabet(), 2,
                          [](std::span<const Symbol> nb) { return fd_local(nb[0], nb[1], nb[2]); });
}

RuleTable projection_table() {
  return RuleTable::build(counter_alphabet(), 3, [](std::span<const Symbol> nb) { return fp_local(nb); });
}

CounterAutomaton::CounterAutomaton() : CounterAutomaton(projection_table(), digit_table()) {}

CounterAutomaton::CounterAutomaton(RuleTable projection, RuleTable digits)
    : projection_(std::move(projection)), digits_(std::move(digits)) {
  if (!(projection_.alphabet() == counter_alphabet()) || !(digits_.alphabet() == counter_alphabet()))
    throw Error("counter automaton tables must use the counter alphabet");
}

WindowConfig CounterAutomaton::step(const WindowConfig& cfg) const {
  WindowConfig out = cfg.projected ? counterca::step(cfg, digits_)
                                   : counterca::step(counterca::step(cfg, projection_), digits_);
  out.time = cfg.time + 1;
  out.projected = true;
  return out;
}

SetConfig CounterAutomaton::step(const SetConfig& cfg) const {
  SetConfig out;
  if (cfg.projected) {
    out = counterca::step(cfg, digits_);
  } else {
    SetConfig mid = counterca::step(cfg, projection_);
    mid.time = cfg.time;
    out = counterca::step(mid, digits_);
  }
  out.projected = true;
  return out;
}

CyclicConfig CounterAutomaton::step(const CyclicConfig& cfg) const {
  CyclicConfig out = step_cyclic(step_cyclic(cfg, projection_), digits_);
  out.time = cfg.time + 1;
  return out;
}

const CounterAutomaton& counter_automaton() {
  static const CounterAutomaton f;
  return f;
}

WindowConfig step_F(const WindowConfig& cfg) { return counter_automaton().step(cfg); }

void advance_block(std::span<Symbol> d, int increment) {
  if (d.empty()) return;
  if (increment != 1 && increment != 2) throw Error("increment must be 1 or 2");
  Symbol prev2 = increment == 2 ? 2 : 0;
  Symbol prev1 = kE;
  for (auto& cell : d) {
    Symbol old = cell;
    cell = fd_local(prev2, prev1, old);
    prev2 = prev1;
    prev1 = old;
  }
}

OmegaReport validate_omega(const WindowConfig& cfg) {
  OmegaReport rep;
  Interval v = intersect(cfg.valid, cfg.extent());
  for (Coord c = v.lo; c <= v.hi; ++c)
    if (cfg.at(c) == kE) rep.emitters.push_back(c);
  for (std::size_t i = 0; i + 1 < rep.emitters.size(); ++i) {
    int gap = static_cast<int>(rep.emitters[i + 1] - rep.emitters[i] - 1);
    rep.min_gap = rep.min_gap < 0 ? gap : std::min(rep.min_gap, gap);
    if (gap < 3) rep.violations.push_back(rep.emitters[i]);
  }
  rep.has_left_E = std::any_of(rep.emitters.begin(), rep.emitters.end(), [](Coord c) { return c <= 0; });
  rep.has_right_E = std::any_of(rep.emitters.begin(), rep.emitters.end(), [](Coord c) { return c > 0; });
  rep.in_omega = rep.violations.empty() && rep.has_left_E && rep.has_right_E;
  return rep;
}

std::string to_string(StructureCheck check) {
  switch (check) {
    case StructureCheck::EmitterMoved: return "emitter moved";
    case StructureCheck::EmitterSpacing: return "emitters closer than 4";
    case StructureCheck::TripleTwo: return "222 block";
    case StructureCheck::MisplacedThree: return "3 not preceded by E";
    case StructureCheck::TwosPerCounter: return "more than two 2s in a counter";
  }
  return "unknown";
}

std::size_t StructureReport::count(StructureCheck check) const {
  return static_cast<std::size_t>(
      std::count_if(violations.begin(), violations.end(), [&](const StructureViolation& v) { return v.check == check; }));
}

StructureReport assert_orbit_structure(const SpaceTimeDiagram& diagram) {
  StructureReport rep;
  auto& out = rep.violations;
  for (std::size_t k = 0; k < diagram.size(); ++k) {
    const WindowConfig& row = diagram[k];
    const int rk = static_cast<int>(k);
    Interval v = intersect(row.valid, row.extent());
    auto cell = [&](Coord c) { return row.at(c); };
    Coord last_e = 0;
    bool seen_e = false;
    int twos = 0;
    for (Coord c = v.lo; c <= v.hi; ++c) {
      Symbol s = cell(c);
      if (s == 3 && c > v.lo && cell(c - 1) != kE) out.push_back({rk, c, StructureCheck::MisplacedThree});
      if (k >= 2 && s == 2 && c + 2 <= v.hi && cell(c + 1) == 2 && cell(c + 2) == 2)
        out.push_back({rk, c, StructureCheck::TripleTwo});
      if (s == kE) {
        if (seen_e && k >= 1 && c - last_e < 4) out.push_back({rk, c, StructureCheck::EmitterSpacing});
        if (seen_e && k >= 2 && twos > 2) out.push_back({rk, last_e, StructureCheck::TwosPerCounter});
        seen_e = true;
        last_e = c;
        twos = 0;
      } else if (s == 2) {
        ++twos;
      }
    }
    if (k >= 1 && k + 1 < diagram.size()) {
      const WindowConfig& next = diagram[k + 1];
      Interval common = intersect(v, intersect(next.valid, next.extent()));
      for (Coord c = common.lo; c <= common.hi; ++c)
        if ((cell(c) == kE) != (next.at(c) == kE)) out.push_back({rk + 1, c, StructureCheck::EmitterMoved});
    }
  }
  return rep;
}

Fixture reference_fixture() {
  Fixture f;
  f.rows = {"0E110E0222E", "0E210E1011E", "0E120E2011E", "0E201E1111E", "0E111E2111E",
            "0E211E1211E", "0E121E2021E", "0E202E1102E", "0E110E3100E", "0E210E2200E"};
  return f;
}

Fixture load_fixture(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open fixture " + path);
  Fixture f;
  std::string line;
  while (std::getline(in, line)) {
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::string row;
    for (char c : line)
      if (c != ' ' && c != '\t' && c != '\r') row.push_back(c);
    if (row.empty()) continue;
    if (row.rfind("pad=", 0) == 0) {
      f.pad = std::stoi(row.substr(4));
      continue;
    }
    f.rows.push_back(row);
  }
  if (f.rows.empty()) throw ParseError("fixture " + path + " has no rows");
  for (const auto& r : f.rows)
    if (r.size() != f.rows.front().size()) throw ParseError("fixture rows differ in width");
  return f;
}

WindowConfig fixture_initial(const Fixture& fixture) {
  const Alphabet a = counter_alphabet();
  std::string padded = std::string(static_cast<std::size_t>(fixture.pad), '0') + fixture.rows.front() +
                       std::string(static_cast<std::size_t>(fixture.pad), '0');
  return WindowConfig::from_string(a, padded, -fixture.pad);
}

std::optional<FixtureMismatch> check_fixture(const Fixture& fixture, const Dynamics& dyn) {
  const Alphabet& a = dyn.alphabet();
  auto diagram = orbit(fixture_initial(fixture), dyn, static_cast<int>(fixture.rows.size()) - 1);
  for (std::size_t k = 0; k < fixture.rows.size(); ++k) {
    const auto& want = fixture.rows[k];
    const auto& row = diagram[k];
    for (std::size_t col = 0; col < want.size(); ++col) {
      Coord c = static_cast<Coord>(col);
      if (!row.valid.contains(c)) throw WindowExhausted("fixture column outside validity", static_cast<int>(k));
      char got = a.glyph(row.at(c));
      if (got != want[col]) return FixtureMismatch{static_cast<int>(k), static_cast<int>(col), want[col], got};
    }
  }
  return std::nullopt;
}

std::shared_ptr<Dynamics> make_dynamics(const std::string& name) {
  if (name == "F") return std::make_shared<CounterAutomaton>();
  if (name == "xor") return xor_rule();
  if (name == "identity") return identity_rule();
  if (name == "shift") return shift_rule();
  throw Error("unknown rule '" + name + "'");
}

}  // namespace counterca
