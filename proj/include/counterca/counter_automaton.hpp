#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "counterca/engine.hpp"

namespace counterca {

inline constexpr Symbol kE = 4;

Alphabet counter_alphabet();  // 0 1 2 3 E

inline bool is_high(Symbol s) { return s == 2 || s == 3; }

// Digit update from (x_{i-2}, x_{i-1}, x_i).
Symbol fd_local(Symbol left2, Symbol left1, Symbol center);
// Projection of an emitter that has another emitter within distance 3.
Symbol fp_local(std::span<const Symbol> window7);

RuleTable digit_table();       // radius 2, ignores the right neighbours
RuleTable projection_table();  // radius 3

// F = digit stage after projection stage.  Once a configuration is an image of F
// the projection is the identity, so the step shrinks validity by 2 instead of 5.
class CounterAutomaton : public Dynamics {
 public:
  CounterAutomaton();
  CounterAutomaton(RuleTable projection, RuleTable digits);

  std::string name() const override { return "F"; }
  const Alphabet& alphabet() const override { return digits_.alphabet(); }
  int radius() const override { return projection_.radius() + digits_.radius(); }
  int radius_for(bool projected) const override { return projected ? digits_.radius() : radius(); }
  int effective_radius() const override { return digits_.radius(); }

  WindowConfig step(const WindowConfig& cfg) const override;
  SetConfig step(const SetConfig& cfg) const override;
  CyclicConfig step(const CyclicConfig& cfg) const override;

  const RuleTable& projection() const { return projection_; }
  const RuleTable& digits() const { return digits_; }

 private:
  RuleTable projection_;
  RuleTable digits_;
};

const CounterAutomaton& counter_automaton();
WindowConfig step_F(const WindowConfig& cfg);

// Digits of one counter block (leftmost digit least significant) advanced by one
// step when the block receives `increment` in {1,2} from its left neighbour.
void advance_block(std::span<Symbol> digits, int increment);

struct OmegaReport {
  bool in_omega = false;
  int min_gap = -1;  // fewest digits between consecutive emitters, -1 with fewer than two
  std::vector<Coord> violations;  // left emitter of every gap shorter than 3
  bool has_left_E = false;        // emitter at a coordinate <= 0
  bool has_right_E = false;       // emitter at a coordinate > 0
  std::vector<Coord> emitters;
};

OmegaReport validate_omega(const WindowConfig& cfg);

enum class StructureCheck { EmitterMoved, EmitterSpacing, TripleTwo, MisplacedThree, TwosPerCounter };

struct StructureViolation {
  int row = 0;
  Coord coord = 0;
  StructureCheck check = StructureCheck::EmitterMoved;
};

std::string to_string(StructureCheck check);

struct StructureReport {
  std::vector<StructureViolation> violations;

  bool ok() const { return violations.empty(); }
  std::size_t count(StructureCheck check) const;
};

// Report-only structural checks inside validity: emitters fixed from row 1 on,
// emitters at least 4 apart from row 1 on, no 222 from row 2 on, every 3 right
// after an emitter, at most two 2s per fully visible counter from row 2 on.
StructureReport assert_orbit_structure(const SpaceTimeDiagram& diagram);

// Reference space-time fixture: rows of cells at coordinates 0..width-1,
// padded with `pad` zeros on each side for simulation.
struct Fixture {
  std::vector<std::string> rows;
  int pad = 60;
};

Fixture reference_fixture();
Fixture load_fixture(const std::string& path);

struct FixtureMismatch {
  int row = 0;
  int col = 0;
  char expected = '?';
  char got = '?';
};

std::optional<FixtureMismatch> check_fixture(const Fixture& fixture, const Dynamics& dyn);
WindowConfig fixture_initial(const Fixture& fixture);

std::shared_ptr<Dynamics> make_dynamics(const std::string& name);

}  // namespace counterca
