#pragma once

// Command-line front end. Exit codes: 0 success, 1 a checked inequality
// failed, 2 invalid input.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace spectral_cantor {

struct RunConfig {
  std::string command;
  std::optional<double> gamma;
  std::optional<double> mu;
  std::optional<std::size_t> level;
  std::optional<std::size_t> trunc;
  std::optional<double> s;
  std::optional<double> p;
  std::size_t horizon = 100;
  std::uint64_t seed = 1;
  double tol = 1e-12;
  std::string format = "json";
  std::string out;
  std::vector<std::string> points;
  std::size_t random = 0;
  bool all = false;
  bool connes = false;
  bool quick = false;
  std::string phi;
  std::string psi;
  std::string method = "intervals";
  std::vector<double> vector;
  std::size_t n = 4;
  std::size_t trials = 20;
};

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace spectral_cantor
