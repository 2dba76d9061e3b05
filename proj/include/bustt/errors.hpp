#pragma once

#include <stdexcept>
#include <string>

namespace bustt {

/// Raised when input data violates a contract (bad files, insufficient
/// coverage, degenerate samples). The CLI maps this to exit code 2,
/// as opposed to std::invalid_argument (usage errors, exit code 1).
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace bustt
