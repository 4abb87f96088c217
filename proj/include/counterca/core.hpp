#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace counterca {

using Symbol = std::uint8_t;
using Coord = std::int64_t;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised when a window can no longer support the requested number of steps.
class WindowExhausted : public Error {
 public:
  WindowExhausted(const std::string& what, int depth) : Error(what), depth_(depth) {}
  int depth() const { return depth_; }

 private:
  int depth_;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

class Alphabet {
 public:
  Alphabet() = default;
  explicit Alphabet(std::string glyphs);

  int size() const { return static_cast<int>(glyphs_.size()); }
  char glyph(Symbol s) const;
  Symbol parse(char c) const;
  bool contains(Symbol s) const { return s < glyphs_.size(); }
  const std::string& glyphs() const { return glyphs_; }
  std::uint8_t full_mask() const { return static_cast<std::uint8_t>((1u << size()) - 1u); }

  bool operator==(const Alphabet&) const = default;

 private:
  std::string glyphs_;
};

Alphabet binary_alphabet();

}  // namespace counterca
