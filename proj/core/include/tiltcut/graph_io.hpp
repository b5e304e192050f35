#pragma once

#include <iosfwd>
#include <string>

#include "tiltcut/network.hpp"

namespace tiltcut {

// Edge-list text format:
//
//   n
//   u v            (one line per edge, 0-indexed)
//   ...
//   h: h_0 h_1 ... h_{n-1}   (optional; fields default to 0)
//
// Blank lines and lines starting with '#' are ignored. Reals are written in
// shortest round-trip form, so write -> read reproduces every field bit-exactly.

Network read_edge_list(std::istream& in);
Network read_edge_list_file(const std::string& path);

void write_edge_list(std::ostream& out, const Network& g);
void write_edge_list_file(const std::string& path, const Network& g);

/// Shortest decimal string that parses back to exactly `x`.
std::string format_real(double x);

}  // namespace tiltcut
