#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "counterca/config.hpp"
#include "counterca/counter_model.hpp"
#include "counterca/engine.hpp"

namespace counterca {

// Renewal: origin counter drawn proportionally to (l + 1) nu_*(l), origin cell uniform
// over its l + 1 cells (emitter included); shift-invariant.
// TowerShifts: proportional to l nu_*(l), offset uniform in {0..l-1}; P(x_0 = E) = 1/mean.
enum class StationaryConvention { Renewal, TowerShifts };

std::string to_string(StationaryConvention c);
StationaryConvention parse_convention(const std::string& text);

struct MeasureParams {
  double nu = 2.0 / 3.0;
  int min_length = 3;
  int half_width = 30;          // counters per side
  Coord min_cells_per_side = 0;  // window reaches at least this far on each side
  int burn_in_T = 256;
  std::uint64_t seed = 1;
  StationaryConvention convention = StationaryConvention::Renewal;
};

void validate(const MeasureParams& p);

double length_pmf(const MeasureParams& p, int l);
double mean_length(const MeasureParams& p);
// Exact entropy (nats) of the length law.
double length_entropy(const MeasureParams& p);
// Entropy rate of the renewal-stationary cell process.
double renewal_entropy_rate(const MeasureParams& p);

std::vector<int> sample_lengths(const MeasureParams& p, std::size_t count);

struct SampleInfo {
  std::uint64_t index = 0;
  int origin_length = 0;
  int offset = 0;   // x_{-offset} is the left emitter of the origin counter
  int burn_in = 0;  // F steps applied
};

// x_0 = E, counters on both sides, digits uniform bits.
WindowConfig sample_omega_star(const MeasureParams& p, std::uint64_t index, SampleInfo* info = nullptr);
WindowConfig sample_stationary(const MeasureParams& p, std::uint64_t index, SampleInfo* info = nullptr);

// I.i.d. uniform symbols on [lo, hi] from (seed, index).
WindowConfig sample_bernoulli(int alphabet_size, std::uint64_t seed, std::uint64_t index, const Interval& span);

struct BurnIn {
  WindowConfig cfg;
  int k = 0;
};

// Applies F^k with k uniform on {0..T-1}.  With `keep`, the window is first cut to
// the cells that can influence `keep` within k steps.
BurnIn cesaro_burnin(const WindowConfig& cfg, int T, std::uint64_t seed, std::optional<Interval> keep = {});
BurnIn cesaro_burnin_k(const WindowConfig& cfg, int k, std::optional<Interval> keep = {});
int draw_burnin(const MeasureParams& p, std::uint64_t index);

// Emitter to emitter span of counter i (index 0: last emitter <= 0), if visible.
std::optional<Interval> counter_span(const WindowConfig& cfg, int i);

// Stationary sample followed by a burn-in drawn from (seed, index), kept on [keep].
// The window is generated wide enough for T steps around `keep`.
WindowConfig sample_burned_in(const MeasureParams& p, std::uint64_t index, const Interval& keep,
                              SampleInfo* info = nullptr);

enum class SampleKind { OmegaStar, Stationary, BurnedIn };

std::string to_string(SampleKind k);
SampleKind parse_sample_kind(const std::string& text);

struct SampleManifest {
  SampleKind kind = SampleKind::Stationary;
  MeasureParams params;
  Interval keep{-8, 8};  // BurnedIn only
  std::vector<SampleInfo> entries;

  std::size_t count() const { return entries.size(); }
  std::string to_json() const;
  static SampleManifest from_json(const std::string& text);
};

std::vector<WindowConfig> sample_batch(SampleKind kind, const MeasureParams& p, std::size_t count,
                                       SampleManifest* manifest = nullptr, Interval keep = {-8, 8});
std::vector<WindowConfig> replay_manifest(const SampleManifest& m);

struct ConditionStarReport {
  std::size_t samples = 0;
  std::size_t in_omega = 0;
  std::size_t collisions = 0;  // pairs with the same emitter set
  int min_counters = 0;        // fewest complete counters in one sample
  double expected_collisions = 0;
  bool violates() const { return in_omega < samples || collisions > 0; }
};

ConditionStarReport check_condition_star(const std::vector<WindowConfig>& samples, const MeasureParams& p = {});

struct UniformityClass {
  std::vector<int> lengths;  // lengths of the conditioning counters
  std::size_t count = 0;
  double tv = 0;
  bool starved = false;
};

struct UniformityReport {
  int index = 0;
  std::vector<UniformityClass> classes;
  std::size_t skipped = 0;  // samples where the counter was not visible or unreliable
  std::vector<std::string> notes;

  const UniformityClass* find(const std::vector<int>& lengths) const;
};

// Conditional law of c_index given the lengths of the counters in `condition_on`
// (default: the counter itself), against uniform on 2^l states.
UniformityReport uniformity_check(const std::vector<CounterLine>& lines, int index,
                                  std::vector<int> condition_on = {}, std::size_t min_count = 1000);

struct EntropyEstimate {
  int k = 0;
  std::size_t samples = 0;
  double block = 0;       // H_k / k
  double difference = 0;  // H_k - H_{k-1}
  double block_stderr = 0;
  double difference_stderr = 0;
  double coverage = 0;  // 1 - (words seen once) / samples
  std::size_t distinct = 0;
  bool undersampled = false;
};

// Plug-in estimates over words of equal length (symbols < 256).
EntropyEstimate word_entropy(const std::vector<std::vector<Symbol>>& words, int k);
// k-blocks on coordinates 0..k-1 of every sample.
EntropyEstimate block_entropy(const std::vector<WindowConfig>& samples, int k);

// Width-w column on coordinates 0..w-1 over steps 0..T-1, flattened row by row.
std::vector<std::vector<Symbol>> column_words(const std::vector<WindowConfig>& samples, const Dynamics& dyn, int w,
                                              int T);
// Rate H(T-word) / T per step; `words` may be longer, prefixes are used.
EntropyEstimate column_entropy(const std::vector<std::vector<Symbol>>& words, int w, int T);
EntropyEstimate column_entropy(const std::vector<WindowConfig>& samples, const Dynamics& dyn, int w, int T);

}  // namespace counterca
