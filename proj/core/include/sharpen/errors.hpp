#pragma once

#include <stdexcept>
#include <string>

namespace sharpen {

// Shapes or dimensions that do not line up.
class StructuralError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// A scalar parameter outside its admissible range (beta <= 0, G < 2 for RLOO, ...).
class ParameterError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// A mathematically undefined evaluation (log of zero, geometric mean of a zero entry).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Linear algebra or optimizer faults: singular kernels, non-finite gradients.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace sharpen
