#pragma once

#include <stdexcept>

namespace mebd {

/// Input whose content (not its shape) makes the operation meaningless,
/// e.g. an all-zero snapshot matrix or a zero reference field.
struct degenerate_input : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A linear-algebra factorization failed for inputs that should be well posed.
struct ill_conditioned : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A scenario file violated the documented schema or one of its invariants.
struct validation_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace mebd
