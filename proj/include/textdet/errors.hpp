#pragma once

#include <stdexcept>
#include <string>

namespace textdet {

// Invalid caller input: malformed polygons, bad dimensions, unparsable files.
// The CLI maps this to exit code 1.
class input_error : public std::runtime_error {
public:
  explicit input_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Numeric breakdown at runtime: non-finite loss, diverged training.
// The CLI maps this to exit code 2.
class numeric_error : public std::runtime_error {
public:
  explicit numeric_error(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace textdet
