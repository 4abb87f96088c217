#include "counterca/rule_table.hpp"

#include <string>

namespace counterca {

namespace {

std::size_t table_size(int k, int radius) {
  std::size_t n = 1;
  for (int i = 0; i < 2 * radius + 1; ++i) n *= static_cast<std::size_t>(k);
  return n;
}

}  // namespace

RuleTable::RuleTable(Alphabet alphabet, int radius, std::vector<Symbol> entries)
    : alphabet_(std::move(alphabet)), radius_(radius), entries_(std::move(entries)) {
  if (radius_ < 0) throw Error("negative radius");
  if (entries_.size() != table_size(alphabet_.size(), radius_))
    throw Error("rule table has " + std::to_string(entries_.size()) + " entries, expected " +
                std::to_string(table_size(alphabet_.size(), radius_)));
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (!alphabet_.contains(entries_[i]))
      throw Error("rule table entry " + std::to_string(i) + " outside alphabet");
    image_mask_ |= static_cast<std::uint8_t>(1u << entries_[i]);
  }
}

RuleTable RuleTable::build(const Alphabet& alphabet, int radius, const LocalRule& local) {
  const int k = alphabet.size();
  const int w = 2 * radius + 1;
  std::vector<Symbol> entries(table_size(k, radius));
  std::vector<Symbol> nb(static_cast<std::size_t>(w), 0);
  for (std::size_t idx = 0; idx < entries.size(); ++idx) {
    std::size_t rest = idx;
    for (int j = w - 1; j >= 0; --j) {
      nb[static_cast<std::size_t>(j)] = static_cast<Symbol>(rest % static_cast<std::size_t>(k));
      rest /= static_cast<std::size_t>(k);
    }
    Symbol out = local(nb);
    if (!alphabet.contains(out))
      throw Error("local rule produced symbol " + std::to_string(out) + " outside alphabet");
    entries[idx] = out;
  }
  return RuleTable(alphabet, radius, std::move(entries));
}

std::size_t RuleTable::index_of(std::span<const Symbol> nb) const {
  if (nb.size() != static_cast<std::size_t>(width())) throw Error("neighbourhood has wrong width");
  std::size_t idx = 0;
  for (Symbol s : nb) {
    if (!alphabet_.contains(s)) throw Error("neighbourhood symbol outside alphabet");
    idx = idx * static_cast<std::size_t>(alphabet_.size()) + s;
  }
  return idx;
}

Symbol RuleTable::apply(std::span<const Symbol> nb) const { return entries_[index_of(nb)]; }

RuleTable RuleTable::with_entry(std::size_t index, Symbol value) const {
  auto copy = entries_;
  copy.at(index) = value;
  return RuleTable(alphabet_, radius_, std::move(copy));
}

}  // namespace counterca
