#pragma once

#include "ksurf/common/types.hpp"

#include <istream>
#include <ostream>
#include <string>

namespace ksurf::io {

/// `tensor <name> <rows> <cols>` followed by rows of space-separated values.
inline void write_tensor(std::ostream& out, const std::string& name, const Matrix& m) {
  out << "tensor " << name << ' ' << m.rows() << ' ' << m.cols() << '\n';
  for (Index r = 0; r < m.rows(); ++r) {
    for (Index c = 0; c < m.cols(); ++c) {
      out << (c ? " " : "") << m(r, c);
    }
    out << '\n';
  }
}

/// Reads a tensor written by write_tensor into m, which must already have the expected shape.
inline void read_tensor(std::istream& in, const std::string& expected, Matrix& m, const std::string& what) {
  std::string tag;
  std::string name;
  Index rows = 0;
  Index cols = 0;
  if (!(in >> tag >> name >> rows >> cols) || tag != "tensor") {
    throw ConfigError(what + ": expected tensor header for " + expected);
  }
  if (name != expected) {
    throw ConfigError(what + ": expected tensor " + expected + ", found " + name);
  }
  if (rows != m.rows() || cols != m.cols()) {
    throw ConfigError(what + ": tensor " + name + " has shape " + std::to_string(rows) + "x" + std::to_string(cols) +
                      ", expected " + std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
  }
  for (Index r = 0; r < rows; ++r) {
    for (Index c = 0; c < cols; ++c) {
      if (!(in >> m(r, c))) {
        throw ConfigError(what + ": truncated tensor " + name);
      }
    }
  }
  if (!m.allFinite()) {
    throw ConfigError(what + ": tensor " + name + " has non-finite values");
  }
}

}  // namespace ksurf::io
