#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "counterca/engine.hpp"
#include "counterca/measures.hpp"

namespace counterca {

// Plus: perturbations left of -s, watched cells >= 0.  Minus: right of s, cells <= 0.
enum class Side { Plus, Minus };

std::string to_string(Side side);
Side parse_side(const std::string& text);

struct Witness {
  std::vector<CellChange> changes;
  int step = 0;  // first step at which a watched cell differs
};

struct InBracket {
  int n = 0;
  Side side = Side::Plus;
  int lower = 0;
  int upper = 0;
  std::optional<Witness> witness;  // supports `lower` when lower > 0
  std::string certificate;         // what proved `upper`
  bool inconclusive = false;       // upper is only the radius bound
};

struct BracketOptions {
  std::size_t exhaustive_budget = 160;  // strips adjacent to the boundary, all contents
  int random_tries = 64;
  int random_max_width = 12;
  std::uint64_t seed = 1;
  int cellwise_horizon = 64;
  bool use_channel = true;
  std::size_t channel_cap = 1u << 18;
};

// Furthest any perturbation can travel in n steps.
int reach_bound(const Dynamics& dyn, int n);
// Cells a window must hold for brackets and crossing times up to horizon n.
Interval required_window(const Dynamics& dyn, int n);

// First step at which a watched cell may differ; horizon + 1 if none within the horizon.
std::int64_t cellwise_arrival(const WindowConfig& x, const Dynamics& dyn, std::int64_t s, Side side, int horizon);
// Counter-channel bound for the automaton F, side Plus; nullopt when x is not emitter-separated.
std::optional<std::int64_t> channel_arrival(const WindowConfig& x, std::int64_t s, std::int64_t horizon,
                                            std::size_t cap = 1u << 18);
std::int64_t certified_arrival(const WindowConfig& x, const Dynamics& dyn, std::int64_t s, Side side,
                               std::int64_t horizon, const BracketOptions& opt = {});

// Replays the witness on full orbits; returns the first step a watched cell differs.
std::optional<int> replay_witness(const WindowConfig& x, const Dynamics& dyn, const Witness& w, int n, Side side);

InBracket in_upper(const WindowConfig& x, const Dynamics& dyn, int n, Side side, const BracketOptions& opt = {});
InBracket in_lower(const WindowConfig& x, const Dynamics& dyn, int n, Side side, const BracketOptions& opt = {},
                   std::optional<int> search_below = std::nullopt);
InBracket in_bracket(const WindowConfig& x, const Dynamics& dyn, int n, Side side, const BracketOptions& opt = {});

// Brackets on a grid of horizons, tightened with monotonicity in n.
std::vector<InBracket> pointwise_exponents(const WindowConfig& x, const Dynamics& dyn, const std::vector<int>& n_grid,
                                           Side side, const BracketOptions& opt = {});

struct ExponentPoint {
  int n = 0;
  double lower_mean = 0;  // of lower / n
  double upper_mean = 0;
  double mid_mean = 0;
  double lower_stderr = 0;
  double upper_stderr = 0;
  double mid_stderr = 0;
  int inconclusive = 0;
};

struct ExponentEstimate {
  std::string rule;
  Side side = Side::Plus;
  std::vector<int> n_grid;
  std::vector<ExponentPoint> points;
  std::size_t sample_count = 0;
  std::uint64_t seed = 0;
  std::string source;  // sampler used
  std::vector<std::vector<InBracket>> brackets;  // per sample, per horizon
  std::vector<WindowConfig> samples;             // kept when requested

  std::string to_csv(bool header = true) const;
};

// Samples: burned-in stationary measure for F, uniform Bernoulli otherwise.
ExponentEstimate average_exponents(const MeasureParams& params, const Dynamics& dyn, const std::vector<int>& n_grid,
                                   std::size_t samples, Side side, const BracketOptions& opt = {},
                                   bool keep_samples = false);
ExponentEstimate average_exponents(const std::vector<WindowConfig>& samples, const Dynamics& dyn,
                                   const std::vector<int>& n_grid, Side side, const BracketOptions& opt = {});

enum class CrossingStrategy { AlphabetFront, CounterResize };

struct CrossingResult {
  std::int64_t steps = 0;  // lower bound (AlphabetFront) or witnessed value (CounterResize)
  bool reached = false;    // false: nothing within the horizon, steps == horizon
  bool certified = false;
  std::optional<Witness> witness;
};

// Number of steps during which no change of the cells left of -n reaches [0, inf).
CrossingResult crossing_time_F(const WindowConfig& x, const Dynamics& dyn, std::int64_t n, CrossingStrategy strategy,
                               int horizon, const BracketOptions& opt = {});

}  // namespace counterca
