#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "counterca/counter_model.hpp"
#include "counterca/lyapunov.hpp"
#include "counterca/measures.hpp"
#include "counterca/rule_table.hpp"

namespace counterca {

struct ExpansivityReport {
  std::optional<int> n_plus;
  Rational lambda_bound = 0;  // r / n_plus
  int cap = 0;
  int radius = 0;
  std::uint64_t configurations = 0;  // enumerated at the deciding depth
  // Pair that defeats the largest depth tried when nothing was found.
  std::optional<std::pair<std::vector<Symbol>, std::vector<Symbol>>> counterexample;
  Coord window_lo = 0;  // coordinates of the counterexample cells
};

// Smallest N <= cap such that agreement left of -r and on [-r, r] at steps 1..N
// forces agreement on [r, 2r].
ExpansivityReport find_nplus(const RuleTable& rule, int cap);
// Independent pair-by-pair re-check of the property at depth n.
bool verify_nplus(const RuleTable& rule, int n);

enum class CheckStatus { Pass, Fail, Inconclusive };
std::string to_string(CheckStatus s);

struct GrowthRow {
  int t = 0;
  int n = 0;
  int required = 0;
  int lower = 0;
  int upper = 0;
};

struct GrowthCheck {
  CheckStatus status = CheckStatus::Fail;
  std::vector<GrowthRow> rows;
  std::string note;
};

// I_{tN}(x) >= (t + 1) r for t = 1..t_max, checked with brackets.
GrowthCheck expansive_growth_check(const Dynamics& dyn, const ExpansivityReport& report, const WindowConfig& x,
                                   int t_max, Side side = Side::Minus, const BracketOptions& opt = {});

// First t <= horizon with F^t(x) != F^t(y) on [-1, 1].  Both windows must be
// emitter-separated; validity is tracked, and WindowExhausted is thrown if they
// cannot support the horizon.
std::optional<std::int64_t> central_divergence(const WindowConfig& x, const WindowConfig& y, std::int64_t horizon);

// Counter `index` relaid with `new_length` digits against its right emitter; low digits
// are kept, missing high digits are 0.  Everything left of it shifts.
WindowConfig resize_counter(const WindowConfig& x, int index, int new_length);

struct DivergenceRecord {
  int index = 0;
  int old_length = 0;
  int new_length = 0;
  Coord depth = 0;  // x and y agree on coordinates > -depth
  std::optional<std::int64_t> time;
  std::int64_t horizon = 0;
  int central = 0;  // counter whose real period is compared
  Rational gap = 0;
  Rational gap_error = 0;  // sum of truncation errors
  Rational margin = 0;     // 3/7 K_2 from the first differing length
  bool gap_positive() const { return gap > gap_error; }
  bool gap_exceeds_margin() const { return gap - gap_error >= margin; }
  bool censored() const { return !time.has_value(); }
};

DivergenceRecord sensitivity_divergence(const WindowConfig& x, int index, int new_length, std::int64_t t_max);
bool replay_divergence(const WindowConfig& x, const DivergenceRecord& rec);

struct ExpansivenessRow {
  int depth = 0;
  std::int64_t horizon = 0;
  std::size_t pairs = 0;
  std::size_t diverged = 0;
  double fraction() const { return pairs ? static_cast<double>(diverged) / static_cast<double>(pairs) : 0; }
};

struct ExpansivenessStat {
  std::vector<ExpansivenessRow> rows;
  // Per depth, per pair: divergence time or nullopt.
  std::vector<std::vector<std::optional<std::int64_t>>> times;
};

// y resamples every counter with index <= -depth; `identical` makes y = x.
ExpansivenessStat mu_expansiveness_stat(const MeasureParams& params, std::size_t pairs,
                                        const std::vector<std::int64_t>& horizons, const std::vector<int>& depths,
                                        bool identical = false);

}  // namespace counterca
