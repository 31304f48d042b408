#pragma once

#include <stdexcept>

namespace courserec {

// File or directory could not be read or written.
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed input (CSV row, JSON document); the message carries file and
// line context where available.
struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A referenced student or course id does not exist.
struct NotFoundError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace courserec
