#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace lyapnet {

// Dense row-major matrix. Small sizes only (state dimension squared); all
// entries are expected to stay finite.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), entries_(rows * cols, 0.0) {}
    Matrix(std::size_t rows, std::size_t cols, std::vector<double> entries);

    static Matrix identity(std::size_t n);

    [[nodiscard]] std::size_t rows() const noexcept { return rows_; }
    [[nodiscard]] std::size_t cols() const noexcept { return cols_; }

    double& operator()(std::size_t r, std::size_t c) { return entries_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return entries_[r * cols_ + c]; }

    [[nodiscard]] std::span<const double> entries() const noexcept { return entries_; }

    // y = A x, lengths checked by the caller.
    void multiply(std::span<const double> x, std::span<double> y) const;

    [[nodiscard]] Matrix multiply(const Matrix& other) const;

    // max-abs-entry norm (used for inverse residual checks)
    [[nodiscard]] double max_abs() const;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> entries_;
};

// Inverse via LU decomposition with partial pivoting. Throws
// ErrorCode::singular_matrix when a pivot magnitude falls below 1e-12.
Matrix lu_invert(const Matrix& m);

// softplus(r) = ln(1 + e^r), computed without overflow for large |r|.
double softplus(double r);
// First derivative: the logistic function 1 / (1 + e^-r).
double softplus_d1(double r);
// Second derivative: d1 * (1 - d1), in (0, 0.25].
double softplus_d2(double r);

// Value and both derivatives in one call, bit-identical to the scalar
// functions above (batch code and scalar code must agree exactly).
struct SoftplusTrio {
    double value;
    double d1;
    double d2;
};
SoftplusTrio softplus_trio(double r);

// Value plus gradient against a fixed set of differentiation seeds
// (coordinates of x, or network parameters).
struct DualBundle {
    double value = 0.0;
    std::vector<double> grad;
};

using ScalarFn = std::function<double(std::span<const double>)>;

// Central finite differences, (fn(x + h e_i) - fn(x - h e_i)) / 2h.
std::vector<double> fd_gradient(const ScalarFn& fn, std::span<const double> x, double h);

}  // namespace lyapnet
