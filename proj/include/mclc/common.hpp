#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace mclc {

using Symbol = std::uint32_t;

/// Invalid argument to an operation (bad flag value, out-of-domain parameter).
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Malformed input data (text that does not parse, empty files).
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Container-level problems: bad magic, unknown version.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Payload-level problems: truncated or inconsistent streams.
class DecodeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr const char* kVersionString = "0.1.0";

}  // namespace mclc
