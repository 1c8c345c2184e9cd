#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace tring {

/// Dimensions i_1, ..., i_d of a dense tensor. Every dimension is at least 1.
class Shape {
public:
    Shape() = default;
    explicit Shape(std::vector<std::size_t> dims);
    Shape(std::initializer_list<std::size_t> dims);

    [[nodiscard]] std::size_t order() const noexcept { return dims_.size(); }
    [[nodiscard]] std::size_t operator[](std::size_t mode) const { return dims_.at(mode); }
    [[nodiscard]] const std::vector<std::size_t>& dims() const noexcept { return dims_; }
    [[nodiscard]] std::size_t numel() const noexcept;

    /// Row-major strides: the last index varies fastest.
    [[nodiscard]] std::vector<std::size_t> strides() const;

    [[nodiscard]] std::string str() const;

    friend bool operator==(const Shape&, const Shape&) = default;

private:
    std::vector<std::size_t> dims_;
};

/// Dense row-major matrix of doubles.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
    Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);
    Matrix(std::initializer_list<std::initializer_list<double>> rows);

    static Matrix identity(std::size_t n);

    [[nodiscard]] std::size_t rows() const noexcept { return rows_; }
    [[nodiscard]] std::size_t cols() const noexcept { return cols_; }
    [[nodiscard]] std::size_t size() const noexcept { return data_.size(); }
    [[nodiscard]] bool empty() const noexcept { return data_.empty(); }

    double& operator()(std::size_t r, std::size_t c) noexcept { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * cols_ + c]; }

    [[nodiscard]] std::span<double> data() noexcept { return data_; }
    [[nodiscard]] std::span<const double> data() const noexcept { return data_; }
    [[nodiscard]] std::span<const double> row(std::size_t r) const noexcept {
        return std::span<const double>(data_).subspan(r * cols_, cols_);
    }
    [[nodiscard]] std::span<double> row(std::size_t r) noexcept {
        return std::span<double>(data_).subspan(r * cols_, cols_);
    }

    [[nodiscard]] Matrix transposed() const;

    friend bool operator==(const Matrix&, const Matrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

/// Dense d-way array of doubles stored row-major (last index fastest).
class DenseTensor {
public:
    DenseTensor() = default;
    explicit DenseTensor(Shape shape, double fill = 0.0);
    DenseTensor(Shape shape, std::vector<double> data);

    [[nodiscard]] const Shape& shape() const noexcept { return shape_; }
    [[nodiscard]] std::size_t order() const noexcept { return shape_.order(); }
    [[nodiscard]] std::size_t dim(std::size_t mode) const { return shape_[mode]; }
    [[nodiscard]] std::size_t size() const noexcept { return data_.size(); }

    [[nodiscard]] std::span<double> data() noexcept { return data_; }
    [[nodiscard]] std::span<const double> data() const noexcept { return data_; }

    double& operator[](std::size_t linear) noexcept { return data_[linear]; }
    double operator[](std::size_t linear) const noexcept { return data_[linear]; }

    /// Element access by multi-index; throws DimensionError on a bad index.
    [[nodiscard]] double at(std::span<const std::size_t> index) const;
    double& at(std::span<const std::size_t> index);
    [[nodiscard]] double at(std::initializer_list<std::size_t> index) const {
        return at(std::span<const std::size_t>(index.begin(), index.size()));
    }
    double& at(std::initializer_list<std::size_t> index) {
        return at(std::span<const std::size_t>(index.begin(), index.size()));
    }

    [[nodiscard]] std::size_t linear_index(std::span<const std::size_t> index) const;

    [[nodiscard]] bool is_nonnegative() const noexcept;
    [[nodiscard]] bool is_finite() const noexcept;

    friend bool operator==(const DenseTensor&, const DenseTensor&) = default;

private:
    Shape shape_;
    std::vector<double> data_;
};

/// Frobenius norm of a flat array.
[[nodiscard]] double frobenius_norm(std::span<const double> values);

/// Increments a row-major multi-index in place; returns false after the last index.
bool next_index(std::vector<std::size_t>& index, const std::vector<std::size_t>& dims);

}  // namespace tring
