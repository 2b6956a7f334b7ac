#pragma once

#include <stdexcept>
#include <string>

namespace cardiotwin {

// Error taxonomy used across the library. The CLI maps these onto exit
// codes: ConfigError -> 1 (usage), DataError/IoError -> 2, NumericalError -> 3.

// Shape/structure mismatch: incompatible dims, token counts, layouts.
struct DimensionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Wrong grid form (labels where probs expected, invalid probability rows).
struct FormError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Out-of-range or otherwise invalid argument value.
struct ValueError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Invalid or inconsistent configuration (also checkpoint/config mismatch).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Missing/degenerate input data (missing structures, empty datasets,
// undetectable cycles, unmatched evaluation pairs).
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Non-finite losses or other numeric breakdown during optimization.
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace cardiotwin
