#include "counterca/core.hpp"

#include <string>

namespace counterca {

Alphabet::Alphabet(std::string glyphs) : glyphs_(std::move(glyphs)) {
  if (glyphs_.empty() || glyphs_.size() > 8) throw Error("alphabet size must be in 1..8");
}

char Alphabet::glyph(Symbol s) const {
  if (s >= glyphs_.size()) throw Error("symbol " + std::to_string(s) + " outside alphabet");
  return glyphs_[s];
}

Symbol Alphabet::parse(char c) const {
  auto pos = glyphs_.find(c);
  if (pos == std::string::npos) throw ParseError(std::string("unknown glyph '") + c + "'");
  return static_cast<Symbol>(pos);
}

Alphabet binary_alphabet() { return Alphabet("01"); }

}  // namespace counterca
