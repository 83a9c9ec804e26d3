#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "diffmath.hpp"
#include "expr.hpp"

namespace lyapnet {

// Right-hand side f of an ODE x' = f(x). Immutable after construction;
// eval() is pure and thread-safe. When a coordinate transform T is attached
// the stored components define f_hat and eval computes T^-1 f_hat(Tx).
class VectorField {
public:
    using NativeRhs = std::function<void(std::span<const double>, std::span<double>)>;

    // Scratch buffers for the transform path, so hot loops stay allocation-free.
    struct Workspace {
        std::vector<double> mapped;
        std::vector<double> image;
    };

    static VectorField from_source(const std::string& source, int n,
                                   std::string name = "custom");
    static VectorField from_native(int n, NativeRhs rhs, std::string name);

    // name in {"example_2d", "example_10d"}; throws ErrorCode::unknown_system.
    static VectorField builtin(const std::string& name);

    // Wraps the stored right-hand side: eval becomes T^-1 f_hat(T x).
    // T must be n-by-n and invertible with residual |T T^-1 - I|_max <= 1e-10.
    void attach_transform(Matrix t);

    [[nodiscard]] int dim() const noexcept { return n_; }
    [[nodiscard]] const std::string& name() const noexcept { return name_; }
    [[nodiscard]] bool has_transform() const noexcept { return transform_.has_value(); }
    [[nodiscard]] const Matrix& transform() const { return transform_->t; }
    [[nodiscard]] const Matrix& transform_inverse() const { return transform_->t_inv; }
    [[nodiscard]] const std::vector<ExprPtr>& components() const noexcept { return components_; }

    // Throws ErrorCode::non_finite when the result contains NaN or infinity.
    void eval(std::span<const double> x, std::span<double> fx, Workspace& ws) const;
    [[nodiscard]] std::vector<double> eval(std::span<const double> x) const;

private:
    VectorField(int n, std::string name) : n_(n), name_(std::move(name)) {}

    void eval_raw(std::span<const double> x, std::span<double> fx) const;
    void check_origin() const;

    struct Transform {
        Matrix t;
        Matrix t_inv;
    };

    int n_;
    std::string name_;
    std::vector<ExprPtr> components_;  // empty when native_ is set
    NativeRhs native_;
    std::optional<Transform> transform_;
};

}  // namespace lyapnet
