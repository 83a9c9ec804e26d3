#include "diffmath.hpp"

#include <cmath>
#include <string>
#include <utility>

#include "error.hpp"

namespace lyapnet {

namespace {
constexpr double kPivotThreshold = 1e-12;
}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> entries)
    : rows_(rows), cols_(cols), entries_(std::move(entries)) {
    if (entries_.size() != rows_ * cols_) {
        raise(ErrorCode::invalid_argument, "matrix entry count does not match rows*cols");
    }
    for (double v : entries_) {
        if (!std::isfinite(v)) {
            raise(ErrorCode::non_finite, "matrix entries must be finite");
        }
    }
}

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

void Matrix::multiply(std::span<const double> x, std::span<double> y) const {
    for (std::size_t r = 0; r < rows_; ++r) {
        double acc = 0.0;
        const double* row = entries_.data() + r * cols_;
        for (std::size_t c = 0; c < cols_; ++c) acc += row[c] * x[c];
        y[r] = acc;
    }
}

Matrix Matrix::multiply(const Matrix& other) const {
    Matrix out(rows_, other.cols_);
    for (std::size_t r = 0; r < rows_; ++r) {
        for (std::size_t k = 0; k < cols_; ++k) {
            const double a = (*this)(r, k);
            if (a == 0.0) continue;
            for (std::size_t c = 0; c < other.cols_; ++c) {
                out(r, c) += a * other(k, c);
            }
        }
    }
    return out;
}

double Matrix::max_abs() const {
    double m = 0.0;
    for (double v : entries_) m = std::max(m, std::abs(v));
    return m;
}

Matrix lu_invert(const Matrix& m) {
    if (m.rows() != m.cols()) {
        raise(ErrorCode::invalid_argument, "lu_invert requires a square matrix");
    }
    const std::size_t n = m.rows();

    // Gauss-Jordan on [A | I] with partial pivoting.
    Matrix a = m;
    Matrix inv = Matrix::identity(n);
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < n; ++r) {
            if (std::abs(a(r, col)) > std::abs(a(pivot, col))) pivot = r;
        }
        if (std::abs(a(pivot, col)) <= kPivotThreshold) {
            raise(ErrorCode::singular_matrix,
                  "singular matrix: pivot " + std::to_string(std::abs(a(pivot, col))) +
                      " below threshold in column " + std::to_string(col));
        }
        if (pivot != col) {
            for (std::size_t c = 0; c < n; ++c) {
                std::swap(a(col, c), a(pivot, c));
                std::swap(inv(col, c), inv(pivot, c));
            }
        }
        const double d = a(col, col);
        for (std::size_t c = 0; c < n; ++c) {
            a(col, c) /= d;
            inv(col, c) /= d;
        }
        for (std::size_t r = 0; r < n; ++r) {
            if (r == col) continue;
            const double factor = a(r, col);
            if (factor == 0.0) continue;
            for (std::size_t c = 0; c < n; ++c) {
                a(r, c) -= factor * a(col, c);
                inv(r, c) -= factor * inv(col, c);
            }
        }
    }
    return inv;
}

double softplus(double r) {
    if (r > 30.0) return r + std::log1p(std::exp(-r));
    return std::log1p(std::exp(r));
}

double softplus_d1(double r) { return 1.0 / (1.0 + std::exp(-r)); }

double softplus_d2(double r) {
    const double s = softplus_d1(r);
    return s * (1.0 - s);
}

SoftplusTrio softplus_trio(double r) {
    SoftplusTrio t;
    t.value = softplus(r);
    t.d1 = softplus_d1(r);
    t.d2 = t.d1 * (1.0 - t.d1);
    return t;
}

std::vector<double> fd_gradient(const ScalarFn& fn, std::span<const double> x, double h) {
    std::vector<double> grad(x.size());
    std::vector<double> probe(x.begin(), x.end());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double xi = probe[i];
        probe[i] = xi + h;
        const double hi = fn(probe);
        probe[i] = xi - h;
        const double lo = fn(probe);
        probe[i] = xi;
        grad[i] = (hi - lo) / (2.0 * h);
    }
    return grad;
}

}  // namespace lyapnet
