#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace maxstab {

// Invalid arguments or model/grid parameters. CLI maps this to exit code 2
// when raised during configuration, otherwise treats it as a defect.
class input_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Factorization failures, non-convergent quadrature, inconsistent estimates.
// CLI exit code 3.
class numerical_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Spectral draw budget exhausted before the stopping rule fired. Carries the
// partial diagnostics needed to size a rerun.
class simulation_error : public numerical_error {
 public:
  simulation_error(const std::string& msg, long draws, double current_min)
      : numerical_error(msg), draws_(draws), current_min_(current_min) {}
  long draws() const { return draws_; }
  double current_min() const { return current_min_; }

 private:
  long draws_;
  double current_min_;
};

// Filesystem failures. CLI exit code 4.
class io_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Accumulated configuration problems; parsing never stops at the first one.
class config_error : public std::runtime_error {
 public:
  explicit config_error(std::vector<std::string> messages)
      : std::runtime_error(join(messages)), messages_(std::move(messages)) {}
  const std::vector<std::string>& messages() const { return messages_; }

 private:
  static std::string join(const std::vector<std::string>& msgs) {
    std::string out = "configuration rejected:";
    for (const auto& m : msgs) {
      out += "\n  - ";
      out += m;
    }
    return out;
  }
  std::vector<std::string> messages_;
};

}  // namespace maxstab
