#pragma once

#include <string>

#include "cohomlab/root_combinatorics.hpp"

namespace cohomlab::detail {

// Parsed generator id. `indexed` ids are "u_i_j" and "X_i"; everything else
// ("X", "U", "Y1", ...) is kept as text.
struct GeneratorId {
  std::string text;
  bool indexed = false;
  BasisElement basis;
};

GeneratorId parse_generator(const std::string& gen);

}  // namespace cohomlab::detail
