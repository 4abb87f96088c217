#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "counterca/config.hpp"
#include "counterca/counter_automaton.hpp"

namespace testutil {

using counterca::Coord;
using counterca::Symbol;
using counterca::WindowConfig;

inline std::vector<Symbol> random_cells(std::mt19937_64& rng, std::size_t n, int k) {
  std::uniform_int_distribution<int> d(0, k - 1);
  std::vector<Symbol> v(n);
  for (auto& s : v) s = static_cast<Symbol>(d(rng));
  return v;
}

inline WindowConfig window(std::vector<Symbol> cells, Coord origin) {
  WindowConfig w;
  w.origin = origin;
  w.cells = std::move(cells);
  w.valid = w.extent();
  return w;
}

// Emitter-separated configuration: counters of length in [min_len, max_len]
// with digits drawn from {0,1} (or {0,1,2,3} when `any_digit`), starting with E
// at `origin`.
inline WindowConfig random_omega(std::mt19937_64& rng, Coord origin, std::size_t min_cells, int min_len = 3,
                                 int max_len = 8, bool any_digit = false) {
  std::uniform_int_distribution<int> len(min_len, max_len);
  std::uniform_int_distribution<int> dig(0, any_digit ? 3 : 1);
  std::vector<Symbol> cells{counterca::kE};
  while (cells.size() < min_cells) {
    int l = len(rng);
    for (int j = 0; j < l; ++j) cells.push_back(static_cast<Symbol>(dig(rng)));
    cells.push_back(counterca::kE);
  }
  WindowConfig w = window(std::move(cells), origin);
  w.projected = true;
  return w;
}

}  // namespace testutil
