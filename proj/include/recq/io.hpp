#pragma once

#include <stdexcept>
#include <string>

#include "recq/recursive_engine.hpp"

namespace recq {

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Shortest decimal string that parses back to the same double (17 significant
// digits via %.17g).
std::string format_double(double v);

// Writes the chain as a directory bundle: chain.json (levels, step count)
// plus per-step grid_<k>.csv (index, point, weight) and, for k < n,
// transition_<k>.csv (i, j, p). Round-trips bit-exactly through load_chain.
void save_chain(const QuantizedChain& chain, const std::string& dir);

QuantizedChain load_chain(const std::string& dir);

}  // namespace recq
