#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>

namespace ablp {

/// Internal node identifier. Real nodes are 1..n; 0 is the padding sentinel.
using NodeId = std::uint32_t;
inline constexpr NodeId kPadding = 0;

/// Input data could not be parsed or violates a data precondition.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed edge-list line.
class ParseError : public DataError {
 public:
  ParseError(std::size_t line, const std::string& what)
      : DataError("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Model document problems, or scoring a row of the wrong length.
class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Read-only row-major view over integer feature rows.
struct FeatureView {
  std::span<const NodeId> values;
  std::size_t width = 0;

  std::size_t rows() const { return width == 0 ? 0 : values.size() / width; }
  std::span<const NodeId> row(std::size_t i) const { return values.subspan(i * width, width); }
};

}  // namespace ablp
