#pragma once

#include <stdexcept>
#include <string>

namespace netrank {

// Configuration / usage problems. The CLI maps these to exit code 2;
// every other exception surfaces as a runtime failure (exit code 1).
struct config_error : std::runtime_error {
  explicit config_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace netrank
