#include "tring/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <sstream>

#include "tring/error.hpp"
#include "tring/kernels.hpp"

namespace tring {

Shape::Shape(std::vector<std::size_t> dims) : dims_(std::move(dims)) {
    if (dims_.empty()) {
        throw DimensionError("shape must have at least one mode");
    }
    for (std::size_t d : dims_) {
        if (d == 0) {
            throw DimensionError("shape " + str() + " has a zero dimension");
        }
    }
}

Shape::Shape(std::initializer_list<std::size_t> dims) : Shape(std::vector<std::size_t>(dims)) {}

std::size_t Shape::numel() const noexcept {
    if (dims_.empty()) return 0;
    return std::accumulate(dims_.begin(), dims_.end(), std::size_t{1}, std::multiplies<>());
}

std::vector<std::size_t> Shape::strides() const {
    std::vector<std::size_t> s(dims_.size(), 1);
    for (std::size_t k = dims_.size(); k-- > 1;) {
        s[k - 1] = s[k] * dims_[k];
    }
    return s;
}

std::string Shape::str() const {
    std::ostringstream os;
    os << '(';
    for (std::size_t k = 0; k < dims_.size(); ++k) {
        if (k) os << 'x';
        os << dims_[k];
    }
    os << ')';
    return os.str();
}

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (data_.size() != rows_ * cols_) {
        throw DimensionError("matrix data length " + std::to_string(data_.size()) +
                             " does not match " + std::to_string(rows_) + "x" +
                             std::to_string(cols_));
    }
}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows)
    : rows_(rows.size()), cols_(rows.size() ? rows.begin()->size() : 0) {
    data_.reserve(rows_ * cols_);
    for (const auto& r : rows) {
        if (r.size() != cols_) throw DimensionError("ragged matrix initializer");
        data_.insert(data_.end(), r.begin(), r.end());
    }
}

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

Matrix Matrix::transposed() const {
    Matrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
}

DenseTensor::DenseTensor(Shape shape, double fill)
    : shape_(std::move(shape)), data_(shape_.numel(), fill) {}

DenseTensor::DenseTensor(Shape shape, std::vector<double> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
    if (data_.size() != shape_.numel()) {
        throw DimensionError("tensor data length " + std::to_string(data_.size()) +
                             " does not match shape " + shape_.str());
    }
}

std::size_t DenseTensor::linear_index(std::span<const std::size_t> index) const {
    if (index.size() != order()) {
        throw DimensionError("index arity " + std::to_string(index.size()) +
                             " does not match tensor order " + std::to_string(order()));
    }
    std::size_t lin = 0;
    for (std::size_t k = 0; k < index.size(); ++k) {
        if (index[k] >= shape_[k]) throw DimensionError("index out of range");
        lin = lin * shape_[k] + index[k];
    }
    return lin;
}

double DenseTensor::at(std::span<const std::size_t> index) const {
    return data_[linear_index(index)];
}

double& DenseTensor::at(std::span<const std::size_t> index) { return data_[linear_index(index)]; }

bool DenseTensor::is_nonnegative() const noexcept {
    return std::all_of(data_.begin(), data_.end(), [](double v) { return v >= 0.0; });
}

bool DenseTensor::is_finite() const noexcept {
    return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

double frobenius_norm(std::span<const double> values) {
    return std::sqrt(kernels::dot(values, values));
}

bool next_index(std::vector<std::size_t>& index, const std::vector<std::size_t>& dims) {
    for (std::size_t k = dims.size(); k-- > 0;) {
        if (++index[k] < dims[k]) return true;
        index[k] = 0;
    }
    return false;
}

}  // namespace tring
