#include "convarith/tensor_io.hpp"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "convarith/errors.hpp"

namespace convarith {

namespace {

using nlohmann::json;

std::vector<std::int64_t> parse_shape(const json& value) {
    if (!value.is_array()) {
        throw TensorIoError("tensor \"shape\" must be an array of integers");
    }
    std::vector<std::int64_t> shape;
    shape.reserve(value.size());
    for (const json& item : value) {
        if (!item.is_number_integer()) {
            throw TensorIoError("tensor \"shape\" must be an array of integers");
        }
        shape.push_back(item.get<std::int64_t>());
    }
    return shape;
}

std::vector<double> parse_data(const json& value) {
    if (!value.is_array()) {
        throw TensorIoError("tensor \"data\" must be an array of numbers");
    }
    std::vector<double> data;
    data.reserve(value.size());
    for (const json& item : value) {
        if (!item.is_number()) {
            throw TensorIoError("tensor \"data\" must be an array of numbers");
        }
        data.push_back(item.get<double>());
    }
    return data;
}

} // namespace

Tensor read_tensor(std::istream& in) {
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& err) {
        std::ostringstream msg;
        msg << "tensor input is not valid JSON: " << err.what();
        throw TensorIoError(msg.str());
    }
    if (!doc.is_object() || !doc.contains("shape") || !doc.contains("data")) {
        throw TensorIoError("tensor input must be an object with \"shape\" and \"data\"");
    }
    std::vector<std::int64_t> shape = parse_shape(doc["shape"]);
    std::vector<double> data = parse_data(doc["data"]);

    std::int64_t expected = 1;
    for (std::int64_t extent : shape) {
        if (extent < 1 || __builtin_mul_overflow(expected, extent, &expected)) {
            std::ostringstream msg;
            msg << "tensor shape " << json(shape).dump() << " is not a valid extent list";
            throw TensorIoError(msg.str());
        }
    }
    if (expected != static_cast<std::int64_t>(data.size())) {
        std::ostringstream msg;
        msg << "tensor data has " << data.size() << " elements but shape "
            << json(shape).dump() << " calls for " << expected;
        throw TensorIoError(msg.str());
    }
    return Tensor(std::move(shape), std::move(data));
}

Tensor read_tensor_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw TensorIoError("cannot open tensor file: " + path);
    }
    try {
        return read_tensor(in);
    } catch (const TensorIoError& err) {
        std::ostringstream msg;
        msg << path << ": " << err.what();
        throw TensorIoError(msg.str());
    }
}

void write_tensor(std::ostream& out, const Tensor& tensor) {
    json doc;
    doc["shape"] = tensor.shape();
    doc["data"] = tensor.data();
    out << doc.dump() << "\n";
    if (!out) {
        throw TensorIoError("failed while writing tensor output");
    }
}

void write_tensor_file(const std::string& path, const Tensor& tensor) {
    std::ofstream out(path);
    if (!out) {
        throw TensorIoError("cannot open tensor file for writing: " + path);
    }
    write_tensor(out, tensor);
}

} // namespace convarith
