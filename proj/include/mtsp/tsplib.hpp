#pragma once

#include <cctype>
#include <fstream>
#include <iomanip>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "mtsp/core.hpp"

namespace mtsp::tsplib {

// Coordinates plus the optional extensions this project writes:
//   SALESMEN : <m>                   header line
//   ENDOWMENT_SECTION                one "<node> <salesman>" line per city
// File node 1 is the depot; nodes are renumbered from zero.
struct CoordFile {
  std::string name;
  std::vector<Point> points;
  std::optional<int> salesmen;
  std::vector<int> owner;  // owner[c] for c >= 1; empty when absent
};

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline std::string upper_key(const std::string& line) {
  std::string key = trim(line.substr(0, line.find(':')));
  for (auto& ch : key) ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
  return key;
}

}  // namespace detail

inline CoordFile parse(std::istream& in) {
  CoordFile out;
  std::string line;
  enum class Section { Header, Coords, Endowment } section = Section::Header;
  std::vector<std::pair<int, Point>> coords;
  std::vector<std::pair<int, int>> owners;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = detail::trim(line);
    if (t.empty()) continue;
    if (t == "EOF") break;
    if (t == "NODE_COORD_SECTION") {
      section = Section::Coords;
      continue;
    }
    if (t == "ENDOWMENT_SECTION") {
      section = Section::Endowment;
      continue;
    }
    if (section == Section::Header) {
      const auto colon = t.find(':');
      if (colon == std::string::npos) continue;
      const std::string key = detail::upper_key(t);
      const std::string value = detail::trim(t.substr(colon + 1));
      if (key == "NAME") out.name = value;
      if (key == "SALESMEN") {
        try {
          out.salesmen = std::stoi(value);
        } catch (const std::exception&) {
          throw ParseError("line " + std::to_string(line_no) + ": bad SALESMEN value");
        }
      }
      if (key == "EDGE_WEIGHT_TYPE" && value != "EUC_2D")
        throw ParseError("unsupported EDGE_WEIGHT_TYPE " + value);
      continue;
    }
    std::istringstream row(t);
    if (section == Section::Coords) {
      int idx;
      double x, y;
      if (!(row >> idx >> x >> y))
        throw ParseError("line " + std::to_string(line_no) + ": expected '<index> <x> <y>'");
      coords.push_back({idx, {x, y}});
    } else {
      int node, owner;
      if (!(row >> node)) throw ParseError("line " + std::to_string(line_no) + ": bad endowment");
      if (node == -1) {
        section = Section::Header;
        continue;
      }
      if (!(row >> owner)) throw ParseError("line " + std::to_string(line_no) + ": bad endowment");
      owners.push_back({node, owner});
    }
  }
  if (coords.empty()) throw ParseError("no NODE_COORD_SECTION entries");
  out.points.resize(coords.size());
  std::vector<char> filled(coords.size(), 0);
  for (auto [idx, p] : coords) {
    if (idx < 1 || static_cast<std::size_t>(idx) > coords.size() || filled[idx - 1])
      throw ParseError("node indices must be 1..N without repeats");
    out.points[idx - 1] = p;
    filled[idx - 1] = 1;
  }
  if (!owners.empty()) {
    out.owner.assign(out.points.size(), -1);
    for (auto [node, owner] : owners) {
      if (node < 2 || static_cast<std::size_t>(node) > out.points.size())
        throw ParseError("endowment node out of range: " + std::to_string(node));
      out.owner[node - 1] = owner;
    }
  }
  return out;
}

inline CoordFile read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  return parse(in);
}

/// Builds an instance; `default_m` applies when the file names no salesman count.
inline Instance to_instance(const CoordFile& f, int default_m) {
  const int m = f.salesmen.value_or(default_m);
  if (f.owner.empty()) return Instance(f.points, m, f.name);
  Allocation a;
  a.sets.assign(static_cast<std::size_t>(m), CitySet{kDepot});
  for (std::size_t c = 1; c < f.owner.size(); ++c) {
    const int o = f.owner[c];
    if (o < 0 || o >= m) throw ParseError("endowment owner out of range for node " + std::to_string(c + 1));
    a.sets[static_cast<std::size_t>(o)].push_back(static_cast<CityId>(c));
  }
  return Instance(f.points, std::move(a), f.name);
}

inline void write(std::ostream& out, const Instance& inst) {
  out << "NAME : " << (inst.name().empty() ? "instance" : inst.name()) << "\n";
  out << "TYPE : TSP\n";
  out << "DIMENSION : " << inst.n() << "\n";
  out << "EDGE_WEIGHT_TYPE : EUC_2D\n";
  out << "SALESMEN : " << inst.m() << "\n";
  out << "NODE_COORD_SECTION\n";
  out << std::setprecision(17);
  for (int c = 0; c < inst.n(); ++c)
    out << c + 1 << " " << inst.city(c).x << " " << inst.city(c).y << "\n";
  out << "ENDOWMENT_SECTION\n";
  for (int a = 0; a < inst.m(); ++a)
    for (CityId c : inst.endowment().sets[static_cast<std::size_t>(a)])
      if (c != kDepot) out << c + 1 << " " << a << "\n";
  out << "-1\nEOF\n";
}

}  // namespace mtsp::tsplib
