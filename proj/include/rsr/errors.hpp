#pragma once

#include <stdexcept>
#include <string>

namespace rsr {

// Data-dependent failure: malformed input, unknown terms, corrupt dictionary
// files. The CLI maps these to exit code 1.
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Configuration or query-parse failure detected before any stream work
// starts. The CLI maps these to exit code 2.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace rsr
