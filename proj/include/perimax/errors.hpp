#pragma once

#include <stdexcept>
#include <string>

namespace perimax {

// Invalid model or generator parameters (bad T, p, t, distribution shape, ...).
struct config_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Structurally inconsistent inputs (length mismatches, out-of-range blocks).
struct structural_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Not enough data to form the requested estimate.
struct sample_too_short_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A Monte Carlo estimate is undefined because no qualifying event occurred.
struct undefined_estimate_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A closed form was requested for a (process, T) pair that has none.
struct unsupported_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace perimax
