#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "counterca/config.hpp"
#include "counterca/rule_table.hpp"

namespace counterca {

WindowConfig step(const WindowConfig& cfg, const RuleTable& rule);
SetConfig step(const SetConfig& cfg, const RuleTable& rule);
CyclicConfig step_cyclic(const CyclicConfig& cfg, const RuleTable& rule);

// A cellular automaton given as something that can advance windows.
class Dynamics {
 public:
  virtual ~Dynamics() = default;

  virtual std::string name() const = 0;
  virtual const Alphabet& alphabet() const = 0;
  // Worst-case validity loss per step on each side.
  virtual int radius() const = 0;
  // Validity loss for one step applied to this particular window.
  virtual int radius_for(bool /*projected*/) const { return radius(); }
  // Radius governing asymptotic information speed (equals radius() for a plain table).
  virtual int effective_radius() const { return radius(); }

  virtual WindowConfig step(const WindowConfig& cfg) const = 0;
  virtual SetConfig step(const SetConfig& cfg) const = 0;
  virtual CyclicConfig step(const CyclicConfig& cfg) const = 0;
};

class TableDynamics : public Dynamics {
 public:
  TableDynamics(std::string name, RuleTable table) : name_(std::move(name)), table_(std::move(table)) {}

  std::string name() const override { return name_; }
  const Alphabet& alphabet() const override { return table_.alphabet(); }
  int radius() const override { return table_.radius(); }
  const RuleTable& table() const { return table_; }

  WindowConfig step(const WindowConfig& cfg) const override { return counterca::step(cfg, table_); }
  SetConfig step(const SetConfig& cfg) const override { return counterca::step(cfg, table_); }
  CyclicConfig step(const CyclicConfig& cfg) const override { return step_cyclic(cfg, table_); }

 private:
  std::string name_;
  RuleTable table_;
};

// Rows 0..t.  Throws WindowExhausted (carrying the achieved depth) if the
// window cannot support t steps.
SpaceTimeDiagram orbit(const WindowConfig& cfg, const Dynamics& dyn, int t);
SpaceTimeDiagram orbit(const WindowConfig& cfg, const RuleTable& rule, int t);
std::vector<SetConfig> set_valued_orbit(const SetConfig& cfg, const Dynamics& dyn, int t);

// Extremal differing coordinates inside the common valid interval, per step 0..t.
std::vector<std::optional<Interval>> diff_front(const WindowConfig& x, const WindowConfig& y,
                                                const Dynamics& dyn, int t);

struct CellChange {
  Coord coord;
  Symbol value;
};

// Replays a local perturbation of a recorded orbit, only recomputing the cells
// that may differ.  fronts[k] is the differing interval at step k, or nullopt
// once the perturbation has died out.
struct PerturbationTrace {
  std::vector<std::optional<Interval>> fronts;
  int steps = 0;
  bool stopped_early = false;
};

using FrontPredicate = std::function<bool(const Interval&)>;

PerturbationTrace track_perturbation(const SpaceTimeDiagram& base, std::span<const CellChange> changes,
                                     const Dynamics& dyn, int n, const FrontPredicate& stop = {});

// Elementary reference rules on {0,1}.
std::shared_ptr<TableDynamics> xor_rule();       // x_{i-1} + x_{i+1} mod 2
std::shared_ptr<TableDynamics> identity_rule();  // radius 1
std::shared_ptr<TableDynamics> shift_rule();     // x_i <- x_{i+1}

}  // namespace counterca
