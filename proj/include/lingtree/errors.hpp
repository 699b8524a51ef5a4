#pragma once

#include <stdexcept>
#include <string>

namespace lingtree {

// Error taxonomy mirrored by the CLI exit codes:
//   usage_error -> 1, data_error -> 2, numeric_error -> 3.
struct usage_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed or unreadable inputs: manifests, text files, matrices, models.
struct data_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Non-finite values or other numeric breakdown during computation.
struct numeric_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace lingtree
