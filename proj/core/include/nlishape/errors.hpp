#pragma once

#include <stdexcept>
#include <string>

namespace nlishape {

/// Malformed input data: wrong bit-string length, block/composition
/// mismatch, empty series, mismatched vector sizes.
class invalid_input_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Series too short for the requested window or truncation length.
class insufficient_length_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Statistic undefined for the given data (all-zero signal, constant series).
class degenerate_input_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Value out of the representable range (e.g. a constant-composition block
/// whose lexicographic rank exceeds the bit capacity of the matcher).
class out_of_range_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// NaN/Inf produced during propagation, typically launch power or step
/// size outside the stable regime.
class numeric_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid or inconsistent configuration; message carries the field path.
class config_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace nlishape
