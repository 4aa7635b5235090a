#pragma once

#include <stdexcept>
#include <string>

namespace pavel {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Invalid user input: bad config values, unreadable files, unsupported formats.
struct ConfigError : Error {
  using Error::Error;
};

// A pipeline stage could not complete: degenerate geometry, exhausted fronts,
// resolution too coarse.
struct StageError : Error {
  using Error::Error;
};

}  // namespace pavel
