#pragma once

#include <stdexcept>

namespace mmlarma {

/// Raised for every domain failure in the library: nonstationary inputs,
/// failed factorizations, unfittable data, malformed files.
class ArmaError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace mmlarma
