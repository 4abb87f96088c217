#include "counterca/spacetime_io.hpp"

#include <istream>
#include <ostream>
#include <regex>
#include <sstream>

namespace counterca {

void write_diagram(std::ostream& out, const SpaceTimeDiagram& diagram, const Alphabet& alphabet) {
  if (diagram.rows.empty()) throw Error("empty diagram");
  const WindowConfig& first = diagram.rows.front();
  out << "origin=" << first.origin << " time=" << first.time << " valid=" << first.valid.lo << ".."
      << first.valid.hi << "\n";
  out << first.to_string(alphabet) << "\n";
  for (std::size_t i = 1; i < diagram.rows.size(); ++i) {
    const WindowConfig& row = diagram.rows[i];
    if (row.valid != row.extent()) throw Error("row " + std::to_string(i) + " has cells outside its valid interval");
    if (row.time != first.time + static_cast<std::int64_t>(i)) throw Error("rows are not consecutive in time");
    if (row.lo() < first.lo() || row.hi() > first.hi()) throw Error("row extends beyond the first row");
    std::string line(first.cells.size(), '.');
    for (Coord c = row.lo(); c <= row.hi(); ++c) line[static_cast<std::size_t>(c - first.origin)] = alphabet.glyph(row.at(c));
    out << line << "\n";
  }
}

std::string format_diagram(const SpaceTimeDiagram& diagram, const Alphabet& alphabet) {
  std::ostringstream os;
  write_diagram(os, diagram, alphabet);
  return os.str();
}

SpaceTimeDiagram read_diagram(std::istream& in, const Alphabet& alphabet) {
  std::string header;
  if (!std::getline(in, header)) throw ParseError("missing header line");
  static const std::regex re(R"(^origin=(-?\d+) time=(-?\d+) valid=(-?\d+)\.\.(-?\d+)\s*$)");
  std::smatch m;
  if (!std::regex_match(header, m, re)) throw ParseError("malformed header: " + header);
  const Coord origin = std::stoll(m[1]);
  const std::int64_t t0 = std::stoll(m[2]);
  const Interval v0{std::stoll(m[3]), std::stoll(m[4])};

  SpaceTimeDiagram d;
  std::string line;
  std::size_t width = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (d.rows.empty()) {
      WindowConfig row = WindowConfig::from_string(alphabet, line, origin);
      row.valid = v0;
      row.time = t0;
      width = line.size();
      d.rows.push_back(std::move(row));
      continue;
    }
    if (line.size() != width) throw ParseError("row " + std::to_string(d.rows.size()) + " has wrong width");
    auto a = line.find_first_not_of('.');
    auto b = line.find_last_not_of('.');
    if (a == std::string::npos) throw ParseError("row " + std::to_string(d.rows.size()) + " has no valid cell");
    WindowConfig row = WindowConfig::from_string(alphabet, line.substr(a, b - a + 1), origin + static_cast<Coord>(a));
    row.time = t0 + static_cast<std::int64_t>(d.rows.size());
    d.rows.push_back(std::move(row));
  }
  if (d.rows.empty()) throw ParseError("diagram has no rows");
  return d;
}

SpaceTimeDiagram parse_diagram(const std::string& text, const Alphabet& alphabet) {
  std::istringstream is(text);
  return read_diagram(is, alphabet);
}

}  // namespace counterca
