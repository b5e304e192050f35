#include "tiltcut/graph_io.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <system_error>

#include "tiltcut/error.hpp"

namespace tiltcut {

std::string format_real(double x) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  if (ec != std::errc{}) throw std::runtime_error("format_real: conversion failed");
  return std::string(buf, ptr);
}

namespace {

double parse_real(const std::string& token, int line_no) {
  double x = 0.0;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), x);
  if (ec != std::errc{} || ptr != token.data() + token.size()) {
    throw ValidationError("edge list line " + std::to_string(line_no) + ": bad real '" + token +
                          "'");
  }
  return x;
}

int parse_int(const std::string& token, int line_no) {
  int x = 0;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), x);
  if (ec != std::errc{} || ptr != token.data() + token.size()) {
    throw ValidationError("edge list line " + std::to_string(line_no) + ": bad integer '" +
                          token + "'");
  }
  return x;
}

bool skippable(const std::string& line) {
  const auto pos = line.find_first_not_of(" \t\r");
  return pos == std::string::npos || line[pos] == '#';
}

}  // namespace

Network read_edge_list(std::istream& in) {
  std::string line;
  int line_no = 0;
  int n = -1;
  std::vector<Edge> edges;
  std::vector<double> fields;
  bool saw_fields = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (skippable(line)) continue;
    std::istringstream tokens(line);
    std::string first;
    tokens >> first;
    if (n < 0) {
      n = parse_int(first, line_no);
      if (n < 0) throw ValidationError("edge list: negative vertex count");
      std::string extra;
      if (tokens >> extra) throw ValidationError("edge list line 1: expected only n");
      continue;
    }
    if (saw_fields) {
      throw ValidationError("edge list line " + std::to_string(line_no) +
                            ": content after the field line");
    }
    if (first == "h:") {
      saw_fields = true;
      std::string tok;
      while (tokens >> tok) fields.push_back(parse_real(tok, line_no));
      if (static_cast<int>(fields.size()) != n) {
        throw ValidationError("edge list line " + std::to_string(line_no) + ": expected " +
                              std::to_string(n) + " fields");
      }
      continue;
    }
    std::string second, extra;
    if (!(tokens >> second) || (tokens >> extra)) {
      throw ValidationError("edge list line " + std::to_string(line_no) + ": expected 'u v'");
    }
    edges.push_back({parse_int(first, line_no), parse_int(second, line_no)});
  }
  if (n < 0) throw ValidationError("edge list: missing vertex count");
  return Network(n, std::move(edges), std::move(fields));
}

Network read_edge_list_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open graph file " + path);
  return read_edge_list(in);
}

void write_edge_list(std::ostream& out, const Network& g) {
  out << g.size() << '\n';
  for (const auto& e : g.edges()) out << e.u << ' ' << e.v << '\n';
  out << "h:";
  for (double h : g.fields()) out << ' ' << format_real(h);
  out << '\n';
}

void write_edge_list_file(const std::string& path, const Network& g) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write graph file " + path);
  write_edge_list(out, g);
}

}  // namespace tiltcut
