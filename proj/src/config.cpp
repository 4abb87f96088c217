#include "counterca/config.hpp"

#include <algorithm>

namespace counterca {

Interval intersect(const Interval& a, const Interval& b) { return {std::max(a.lo, b.lo), std::min(a.hi, b.hi)}; }

Symbol WindowConfig::at(Coord c) const {
  if (!in_window(c)) throw Error("coordinate " + std::to_string(c) + " outside window");
  return cells[static_cast<std::size_t>(c - origin)];
}

Symbol& WindowConfig::at(Coord c) {
  if (!in_window(c)) throw Error("coordinate " + std::to_string(c) + " outside window");
  return cells[static_cast<std::size_t>(c - origin)];
}

WindowConfig WindowConfig::from_string(const Alphabet& alphabet, std::string_view text, Coord origin) {
  WindowConfig cfg;
  cfg.origin = origin;
  for (char ch : text) {
    if (ch == ' ') continue;
    cfg.cells.push_back(alphabet.parse(ch));
  }
  cfg.valid = cfg.extent();
  return cfg;
}

std::string WindowConfig::to_string(const Alphabet& alphabet) const {
  std::string s;
  s.reserve(cells.size());
  for (Symbol c : cells) s.push_back(alphabet.glyph(c));
  return s;
}

WindowConfig WindowConfig::trimmed(const Interval& keep) const {
  Interval v = intersect(intersect(valid, extent()), keep);
  if (v.empty()) throw WindowExhausted("trim leaves no valid cell", 0);
  WindowConfig out;
  out.origin = v.lo;
  out.cells.assign(cells.begin() + (v.lo - origin), cells.begin() + (v.hi - origin) + 1);
  out.valid = v;
  out.time = time;
  out.projected = projected;
  return out;
}

SymbolSet SetConfig::at(Coord c) const {
  if (c < lo() || c > hi()) throw Error("coordinate " + std::to_string(c) + " outside set window");
  return cells[static_cast<std::size_t>(c - origin)];
}

bool SetConfig::contains(const WindowConfig& cfg) const {
  Interval common = intersect(valid, intersect(cfg.valid, cfg.extent()));
  for (Coord c = common.lo; c <= common.hi; ++c)
    if (!(at(c) & singleton(cfg.at(c)))) return false;
  return true;
}

SetConfig SetConfig::from_window(const WindowConfig& cfg) {
  SetConfig s;
  Interval v = intersect(cfg.valid, cfg.extent());
  s.origin = v.lo;
  s.valid = v;
  s.time = cfg.time;
  s.projected = cfg.projected;
  for (Coord c = v.lo; c <= v.hi; ++c) s.cells.push_back(singleton(cfg.at(c)));
  return s;
}

}  // namespace counterca
