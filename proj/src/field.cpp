#include "field.hpp"

#include <cmath>
#include <utility>

#include "error.hpp"

namespace lyapnet {

namespace {

// Transform matrix of the built-in ten-dimensional system (exact tenths and
// halves).
constexpr double kExample10dT[100] = {
    -0.2, -0.3,  0.5, -0.8,  0.8,  0.4,  0.7,  0.7, -1.0,  0.8,
     0.2,  1.0,  0.9,  0.8, -0.1,  0.6, -0.3,  0.5,  0.8, -0.3,
    -0.3,  0.3,  0.4, -0.4,  0.0, -0.6,  0.3,  0.6,  1.0, -0.5,
    -0.7, -0.1, -0.6, -0.2, -0.6,  0.4,  0.1, -0.1,  0.1, -0.6,
     0.1, -0.6, -0.9, -0.7, -0.2, -0.1,  0.1,  0.2,  0.0, -0.8,
     0.6,  0.9, -0.2,  1.0,  0.4,  0.5,  0.0, -0.1, -0.4,  0.0,
    -1.0,  1.0,  0.7,  0.6, -0.8, -0.8,  0.0, -0.2, -0.2,  0.7,
    -0.9,  0.8,  0.2,  1.0, -0.8,  0.4, -0.3,  0.7,  0.2, -0.8,
     0.6, -0.1, -0.4, -0.5, -0.3, -0.1, -0.7,  1.0,  0.8, -0.3,
     0.0, -1.0, -0.1,  0.4, -0.3, -0.1, -0.2,  0.7, -0.1,  0.8,
};

void rhs_example_2d(std::span<const double> x, std::span<double> fx) {
    fx[0] = -x[0] - 10.0 * x[1] * x[1];
    fx[1] = -2.0 * x[1];
}

// Five weakly coupled two-dimensional linear blocks plus quadratic
// cross-terms.
void rhs_example_10d_hat(std::span<const double> x, std::span<double> fx) {
    fx[0] = -x[0] + 0.5 * x[1] - 0.1 * x[8] * x[8];
    fx[1] = -0.5 * x[0] - x[1];
    fx[2] = -x[2] + 0.5 * x[3] - 0.1 * x[0] * x[0];
    fx[3] = -0.5 * x[2] - x[3];
    fx[4] = -x[4] + 0.5 * x[5] + 0.1 * x[6] * x[6];
    fx[5] = -0.5 * x[4] - x[5];
    fx[6] = -x[6] + 0.5 * x[7];
    fx[7] = -0.5 * x[6] - x[7];
    fx[8] = -x[8] + 0.5 * x[9];
    fx[9] = -0.5 * x[8] - x[9] + 0.1 * x[1] * x[1];
}

}  // namespace

VectorField VectorField::from_source(const std::string& source, int n, std::string name) {
    if (n < 1) raise(ErrorCode::invalid_argument, "state dimension must be at least 1");
    VectorField vf(n, std::move(name));
    vf.components_ = parse_components(source, n);
    vf.check_origin();
    return vf;
}

VectorField VectorField::from_native(int n, NativeRhs rhs, std::string name) {
    if (n < 1) raise(ErrorCode::invalid_argument, "state dimension must be at least 1");
    VectorField vf(n, std::move(name));
    vf.native_ = std::move(rhs);
    vf.check_origin();
    return vf;
}

VectorField VectorField::builtin(const std::string& name) {
    if (name == "example_2d") {
        return from_native(2, rhs_example_2d, "example_2d");
    }
    if (name == "example_10d") {
        VectorField vf = from_native(10, rhs_example_10d_hat, "example_10d");
        vf.attach_transform(Matrix(10, 10, std::vector<double>(kExample10dT, kExample10dT + 100)));
        return vf;
    }
    raise(ErrorCode::unknown_system, "unknown built-in system '" + name + "'");
}

void VectorField::attach_transform(Matrix t) {
    if (t.rows() != static_cast<std::size_t>(n_) || t.cols() != static_cast<std::size_t>(n_)) {
        raise(ErrorCode::shape_mismatch, "transform matrix must be " + std::to_string(n_) + "x" +
                                             std::to_string(n_));
    }
    Matrix t_inv = lu_invert(t);
    Matrix residual = t.multiply(t_inv);
    for (std::size_t i = 0; i < residual.rows(); ++i) residual(i, i) -= 1.0;
    if (residual.max_abs() > 1e-10) {
        raise(ErrorCode::invalid_argument, "transform matrix inversion residual exceeds 1e-10");
    }
    transform_ = Transform{std::move(t), std::move(t_inv)};
    check_origin();
}

void VectorField::eval_raw(std::span<const double> x, std::span<double> fx) const {
    if (native_) {
        native_(x, fx);
        return;
    }
    for (std::size_t i = 0; i < components_.size(); ++i) {
        fx[i] = eval_expr(*components_[i], x);
    }
}

void VectorField::eval(std::span<const double> x, std::span<double> fx, Workspace& ws) const {
    if (x.size() != static_cast<std::size_t>(n_) || fx.size() != static_cast<std::size_t>(n_)) {
        raise(ErrorCode::shape_mismatch, "state vector length does not match field dimension");
    }
    if (transform_) {
        ws.mapped.resize(static_cast<std::size_t>(n_));
        ws.image.resize(static_cast<std::size_t>(n_));
        transform_->t.multiply(x, ws.mapped);
        eval_raw(ws.mapped, ws.image);
        transform_->t_inv.multiply(ws.image, fx);
    } else {
        eval_raw(x, fx);
    }
    for (double v : fx) {
        if (!std::isfinite(v)) {
            raise(ErrorCode::non_finite, "vector field evaluation produced a non-finite value");
        }
    }
}

std::vector<double> VectorField::eval(std::span<const double> x) const {
    std::vector<double> fx(static_cast<std::size_t>(n_));
    Workspace ws;
    eval(x, fx, ws);
    return fx;
}

void VectorField::check_origin() const {
    std::vector<double> origin(static_cast<std::size_t>(n_), 0.0);
    (void)eval(origin);
}

}  // namespace lyapnet
