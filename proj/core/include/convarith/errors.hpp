#pragma once

#include <stdexcept>
#include <string>

namespace convarith {

/// Hyperparameters that cannot describe a valid operation: the kernel never
/// fits, a size or stride is out of range, or the arithmetic overflows.
class InvalidGeometry : public std::invalid_argument {
public:
    explicit InvalidGeometry(const std::string& what) : std::invalid_argument(what) {}
};

/// Operand dimensions disagree with what an operation requires.
class ShapeMismatch : public std::invalid_argument {
public:
    explicit ShapeMismatch(const std::string& what) : std::invalid_argument(what) {}
};

/// A tensor document could not be opened or does not match the file schema.
class TensorIoError : public std::runtime_error {
public:
    explicit TensorIoError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace convarith
