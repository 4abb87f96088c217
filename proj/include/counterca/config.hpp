#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "counterca/core.hpp"

namespace counterca {

struct Interval {
  Coord lo = 0;
  Coord hi = -1;

  bool empty() const { return hi < lo; }
  Coord length() const { return empty() ? 0 : hi - lo + 1; }
  bool contains(Coord c) const { return lo <= c && c <= hi; }
  bool operator==(const Interval&) const = default;
};

Interval intersect(const Interval& a, const Interval& b);

// Finite window [origin, origin + size) of a bi-infinite configuration.
// Only cells inside `valid` are known to agree with the underlying configuration.
struct WindowConfig {
  Coord origin = 0;
  std::vector<Symbol> cells;
  Interval valid;
  std::int64_t time = 0;
  // Certificate that the configuration is a fixed point of a projection stage
  // (used by the counter automaton to skip its first stage).
  bool projected = false;

  Coord lo() const { return origin; }
  Coord hi() const { return origin + static_cast<Coord>(cells.size()) - 1; }
  Interval extent() const { return {lo(), hi()}; }
  bool in_window(Coord c) const { return c >= lo() && c <= hi(); }
  Symbol at(Coord c) const;
  Symbol& at(Coord c);

  static WindowConfig from_string(const Alphabet& alphabet, std::string_view text, Coord origin = 0);
  std::string to_string(const Alphabet& alphabet) const;

  // Restrict window and validity to `keep` (intersected with the valid interval).
  WindowConfig trimmed(const Interval& keep) const;
};

struct CyclicConfig {
  std::vector<Symbol> cells;
  std::int64_t time = 0;
};

using SymbolSet = std::uint8_t;

inline bool is_singleton(SymbolSet s) { return s != 0 && (s & (s - 1)) == 0; }
inline Symbol singleton_value(SymbolSet s) { return static_cast<Symbol>(__builtin_ctz(s)); }
inline SymbolSet singleton(Symbol s) { return static_cast<SymbolSet>(1u << s); }

// Set-valued window: each cell holds the set of possible symbols.
// With open_left (open_right) every cell beyond the window on that side is the
// full alphabet, so validity does not shrink on that side.
struct SetConfig {
  Coord origin = 0;
  std::vector<SymbolSet> cells;
  Interval valid;
  std::int64_t time = 0;
  bool open_left = false;
  bool open_right = false;
  bool projected = false;

  Coord lo() const { return origin; }
  Coord hi() const { return origin + static_cast<Coord>(cells.size()) - 1; }
  SymbolSet at(Coord c) const;
  bool contains(const WindowConfig& cfg) const;

  static SetConfig from_window(const WindowConfig& cfg);
};

struct SpaceTimeDiagram {
  std::vector<WindowConfig> rows;

  const WindowConfig& operator[](std::size_t i) const { return rows[i]; }
  std::size_t size() const { return rows.size(); }
};

}  // namespace counterca
