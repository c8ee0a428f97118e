#pragma once

#include <iosfwd>
#include <string>

#include "convarith/tensor.hpp"

namespace convarith {

// Tensors travel as JSON objects: {"shape": [2, 3], "data": [1, 2, 3, 4, 5, 6]}
// with data flattened row-major. Anything malformed (unreadable stream, bad
// JSON, wrong element count, non-numeric data) raises TensorIoError.

Tensor read_tensor(std::istream& in);
Tensor read_tensor_file(const std::string& path);

void write_tensor(std::ostream& out, const Tensor& tensor);
void write_tensor_file(const std::string& path, const Tensor& tensor);

} // namespace convarith
