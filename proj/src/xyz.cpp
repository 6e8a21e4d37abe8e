// SPDX-License-Identifier: Apache-2.0

#include "mofgcn/xyz.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <sstream>

#include "mofgcn/errors.hpp"

namespace mofgcn {

namespace {

bool parse_double(const std::string& token, double& out) {
  std::size_t pos = 0;
  try {
    out = std::stod(token, &pos);
  } catch (const std::exception&) {
    return false;
  }
  return pos == token.size() && std::isfinite(out);
}

// Splits the comment line into key=value pairs; values may be double-quoted.
std::vector<std::pair<std::string, std::string>> parse_key_values(const std::string& comment) {
  std::vector<std::pair<std::string, std::string>> out;
  std::size_t i = 0;
  const std::size_t n = comment.size();
  while (i < n) {
    while (i < n && std::isspace(static_cast<unsigned char>(comment[i]))) ++i;
    const std::size_t start = i;
    std::size_t eq = std::string::npos;
    while (i < n && !std::isspace(static_cast<unsigned char>(comment[i]))) {
      if (comment[i] == '=' && eq == std::string::npos) {
        eq = i;
        if (i + 1 < n && comment[i + 1] == '"') {
          i += 2;
          while (i < n && comment[i] != '"') ++i;
          if (i < n) ++i;  // closing quote
          break;
        }
      }
      ++i;
    }
    if (eq != std::string::npos) {
      std::string key = comment.substr(start, eq - start);
      std::string value = comment.substr(eq + 1, i - eq - 1);
      if (value.size() >= 2 && value.front() == '"' && value.back() == '"')
        value = value.substr(1, value.size() - 2);
      out.emplace_back(std::move(key), std::move(value));
    }
  }
  return out;
}

}  // namespace

XyzFrame parse_xyz(std::istream& in, const std::string& origin) {
  std::string line;
  std::size_t line_no = 0;

  if (!std::getline(in, line)) throw ParseError(origin, 1, "empty file");
  ++line_no;
  long count = -1;
  {
    std::istringstream ss(line);
    std::string token, extra;
    if (!(ss >> token) || (ss >> extra))
      throw ParseError(origin, line_no, "atom count line must hold a single integer");
    try {
      std::size_t pos = 0;
      count = std::stol(token, &pos);
      if (pos != token.size()) throw std::invalid_argument(token);
    } catch (const std::exception&) {
      throw ParseError(origin, line_no, "malformed atom count '" + token + "'");
    }
    if (count < 1) throw ParseError(origin, line_no, "atom count must be >= 1");
  }

  XyzFrame frame;
  if (!std::getline(in, line)) throw ParseError(origin, 2, "missing comment line");
  ++line_no;
  frame.comment = line;
  for (const auto& [key, value] : parse_key_values(line)) {
    if (key == "energy") {
      double e = 0;
      if (!parse_double(value, e))
        throw ParseError(origin, line_no, "malformed energy value '" + value + "'");
      frame.energy = e;
    } else if (key == "cell") {
      std::istringstream cs(value);
      std::array<double, 3> cell{};
      std::string tok;
      for (int k = 0; k < 3; ++k) {
        if (!(cs >> tok) || !parse_double(tok, cell[static_cast<std::size_t>(k)]))
          throw ParseError(origin, line_no, "cell must hold three lengths, got '" + value + "'");
      }
      frame.structure.cell = cell;
    }
  }

  for (long a = 0; a < count; ++a) {
    if (!std::getline(in, line))
      throw ParseError(origin, line_no + 1,
                       "expected " + std::to_string(count) + " atom lines, found " +
                           std::to_string(a));
    ++line_no;
    std::istringstream ss(line);
    std::string species, xs, ys, zs;
    if (!(ss >> species >> xs >> ys >> zs))
      throw ParseError(origin, line_no, "atom line needs 'species x y z'");
    std::array<double, 3> pos{};
    if (!parse_double(xs, pos[0]) || !parse_double(ys, pos[1]) || !parse_double(zs, pos[2]))
      throw ParseError(origin, line_no, "non-numeric coordinate in '" + line + "'");
    frame.structure.species.push_back(species);
    frame.structure.positions.push_back(pos);
  }

  // one frame per file; trailing blanks tolerated
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") != std::string::npos)
      throw ParseError(origin, line_no, "trailing content after the last atom line");
  }
  return frame;
}

XyzFrame parse_xyz_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path.string(), 0, "cannot open file");
  return parse_xyz(in, path.filename().string());
}

void write_xyz_file(const std::filesystem::path& path, const Structure& structure,
                    std::optional<double> energy) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write file: " + path.string());
  out << structure.positions.size() << "\n";
  char buf[64];
  bool first = true;
  if (energy) {
    std::snprintf(buf, sizeof buf, "%.17g", *energy);
    out << "energy=" << buf;
    first = false;
  }
  if (structure.cell) {
    if (!first) out << " ";
    out << "cell=\"";
    for (int k = 0; k < 3; ++k) {
      std::snprintf(buf, sizeof buf, "%.17g", (*structure.cell)[static_cast<std::size_t>(k)]);
      out << (k ? " " : "") << buf;
    }
    out << "\"";
    first = false;
  }
  out << "\n";
  for (std::size_t i = 0; i < structure.positions.size(); ++i) {
    out << structure.species[i];
    for (double v : structure.positions[i]) {
      std::snprintf(buf, sizeof buf, "%.17g", v);
      out << " " << buf;
    }
    out << "\n";
  }
  if (!out) throw ConfigError("write failed: " + path.string());
}

}  // namespace mofgcn
