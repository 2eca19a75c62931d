#pragma once

#include <stdexcept>

namespace onebit {

/// Raised when an iteration produces NaN/inf or a normalizer degenerates.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace onebit
