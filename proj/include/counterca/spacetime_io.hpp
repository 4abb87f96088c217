#pragma once

#include <iosfwd>
#include <string>

#include "counterca/config.hpp"

namespace counterca {

// Plain-text space-time diagram:
//   origin=<a> time=<t0> valid=<lo>..<hi>
// followed by one line per row, one glyph per cell, aligned on the first row's
// window.  Cells outside a later row's valid interval are written as '.'.
// Rows after the first must have window == valid interval.
void write_diagram(std::ostream& out, const SpaceTimeDiagram& diagram, const Alphabet& alphabet);
std::string format_diagram(const SpaceTimeDiagram& diagram, const Alphabet& alphabet);

SpaceTimeDiagram read_diagram(std::istream& in, const Alphabet& alphabet);
SpaceTimeDiagram parse_diagram(const std::string& text, const Alphabet& alphabet);

}  // namespace counterca
