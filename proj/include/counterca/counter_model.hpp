#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "counterca/config.hpp"

namespace counterca {

using Rational = boost::multiprecision::cpp_rational;

struct Counter {
  int l = 3;
  std::uint64_t c = 0;
  int r = 0;

  std::uint64_t capacity() const { return std::uint64_t{1} << l; }
  bool emits() const { return r == 1; }
  bool operator==(const Counter&) const = default;
};

inline constexpr int kMaxCounterLength = 62;

void validate(const Counter& u);
Counter increment_counter(const Counter& u, int a);
std::string to_string(const Counter& u);

// Counter i sits between the emitters e_positions[i - first_index] and the next one.
struct CounterLine {
  std::vector<Counter> counters;
  std::vector<Coord> e_positions;  // counters.size() + 1 entries, or empty for an abstract line
  int first_index = 0;
  std::int64_t time = 0;
  // Leftmost counters whose state depends on the unknown left boundary.
  int unreliable = 0;
  bool cyclic = false;

  int size() const { return static_cast<int>(counters.size()); }
  int last_index() const { return first_index + size() - 1; }
  bool has_index(int i) const { return i >= first_index && i <= last_index(); }
  const Counter& at(int i) const;
  Counter& at(int i);
  bool reliable(int i) const { return cyclic || i - first_index >= unreliable; }
  bool has_positions() const { return e_positions.size() == counters.size() + 1; }
  Coord left_e(int i) const;
  // Counter whose span (s_i, s_{i+1}] contains coordinate 0.
  std::optional<int> origin_index() const;
};

CounterLine make_line(std::vector<Counter> counters, Coord first_e, int first_index = 0);

std::string format_line(const CounterLine& line);
CounterLine parse_line(const std::string& text);

enum class LeftBoundary { Unknown, Silent, Overflow };

CounterLine step_H(const CounterLine& line, LeftBoundary boundary = LeftBoundary::Unknown);

// Counters of every block between two visible emitters.  Index 0 is the block
// whose left emitter is the last one at a coordinate <= 0.
CounterLine phi(const WindowConfig& cfg);

struct SemiconjugacyMismatch {
  std::int64_t time = 0;
  Coord left_e = 0;
  Counter expected;  // from the model
  Counter got;       // from the automaton
};

struct SemiconjugacyReport {
  bool ok = true;
  std::size_t compared = 0;
  std::optional<SemiconjugacyMismatch> mismatch;
};

SemiconjugacyReport check_semiconjugacy(const WindowConfig& cfg, int t, LeftBoundary boundary = LeftBoundary::Unknown);

struct PeriodEstimate {
  Rational value;
  Rational truncation_error;
  int terms = 0;

  double to_double() const { return static_cast<double>(value); }
};

// lengths[0] is the counter itself, then its left neighbours.
PeriodEstimate real_period_formula(const std::vector<int>& lengths);
// Lengths repeating `pattern` forever to the left.
PeriodEstimate real_period_periodic(const std::vector<int>& pattern);

struct OverflowFrequency {
  int index = 0;
  std::int64_t steps = 0;
  std::int64_t count = 0;       // steps k < t with r = 1
  std::int64_t left_count = 0;  // same for the left neighbour
  double frequency = 0;
  // Bracket from counting turns with the delay taken as l and the start state ignored.
  double bracket_lo = 0;
  double bracket_hi = 0;
  bool in_bracket = false;
  // Bracket that also accounts for the start state and a delay of up to 2l increments.
  double certified_lo = 0;
  double certified_hi = 0;
  bool in_certified = false;
};

OverflowFrequency real_period_empirical(const CounterLine& line, int index, std::int64_t t,
                                        LeftBoundary boundary = LeftBoundary::Unknown);

// Band that holds |n_i^t / t - N_i| for a stationary length sequence.
struct FrequencyBand {
  double lo = 0;
  double hi = 0;
  bool contains(double v) const { return lo <= v && v <= hi; }
};
FrequencyBand stationary_band(double target, int min_length, std::int64_t t);

struct ModelCrossing {
  std::int64_t steps = 0;  // steps during which the origin counter is certainly unaffected
  bool reached = false;    // false when nothing arrived within the horizon
  int first_uncertain = 0;
  std::vector<std::int64_t> arrivals;
  // First disagreement between an overflow-every-step and a silent left boundary, minus one.
  std::optional<std::int64_t> boundary_split;
  bool fallback = false;
};

// Certified lower bound on how long a perturbation of every cell left of -n leaves
// the origin counter unchanged.  The first counter whose left emitter lies at or
// right of -n + 3 receives arbitrary increments from time 0.
ModelCrossing crossing_time_model(const CounterLine& line, std::int64_t n, std::int64_t horizon,
                                  std::size_t cap = 1u << 18);
ModelCrossing crossing_time_model_from(const CounterLine& line, int first_uncertain, int target,
                                       std::int64_t horizon, std::size_t cap = 1u << 18);

}  // namespace counterca
