#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "counterca/core.hpp"

namespace counterca {

// Local rule of radius r stored as a flat table over all (2r+1)-tuples.
// The leftmost neighbour is the most significant digit of the index.
class RuleTable {
 public:
  using LocalRule = std::function<Symbol(std::span<const Symbol>)>;

  RuleTable(Alphabet alphabet, int radius, std::vector<Symbol> entries);

  static RuleTable build(const Alphabet& alphabet, int radius, const LocalRule& local);

  int radius() const { return radius_; }
  int width() const { return 2 * radius_ + 1; }
  const Alphabet& alphabet() const { return alphabet_; }
  std::size_t size() const { return entries_.size(); }
  const std::vector<Symbol>& entries() const { return entries_; }

  std::size_t index_of(std::span<const Symbol> neighborhood) const;
  Symbol apply(std::span<const Symbol> neighborhood) const;
  Symbol operator[](std::size_t index) const { return entries_[index]; }

  // Bitmask of symbols produced by some neighbourhood.
  std::uint8_t image_mask() const { return image_mask_; }

  RuleTable with_entry(std::size_t index, Symbol value) const;

 private:
  Alphabet alphabet_;
  int radius_;
  std::vector<Symbol> entries_;
  std::uint8_t image_mask_ = 0;
};

}  // namespace counterca
