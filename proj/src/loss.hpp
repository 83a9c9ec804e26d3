#pragma once

#include <span>
#include <vector>

#include "diffmath.hpp"
#include "field.hpp"
#include "net.hpp"
#include "points.hpp"

namespace lyapnet {

enum class LossKind { pde, pdi };

// Power-law squeeze functions alpha1(r) = c1 r^power, alpha2(r) = c2 r^power.
struct BoundSpec {
    double c1 = 0.1;
    double c2 = 10.0;
    double power = 2.0;

    [[nodiscard]] double alpha1(double r) const { return c1 * radial(r); }
    [[nodiscard]] double alpha2(double r) const { return c2 * radial(r); }

    // r^power, avoiding sqrt/pow noise for the default quadratic case.
    [[nodiscard]] double radial(double r) const;
    [[nodiscard]] double radial_from_sq(double r_sq) const;

    void validate() const;  // c1 > 0, c2 > 0, c1 < c2, power >= 1
};

struct LossSpec {
    LossKind kind = LossKind::pdi;
    double nu = 1.0;  // weight of the bound penalties
    BoundSpec bounds;

    void validate() const;
};

// Pointwise loss L(w, p, x): squared equation residual (p.fx + |x|^2)^2 for
// the PDE form, squared positive part for the PDI form, plus
// nu * ([w - alpha1]_-^2 + [w - alpha2]_+^2). Nonnegative; zero exactly when
// the inequality and both bounds hold (PDI form).
double loss_pointwise(const LossSpec& spec, double w, std::span<const double> p,
                      std::span<const double> x, std::span<const double> fx);

struct BatchStats {
    double mean = 0.0;
    double max = 0.0;
};

// Fused batch kernel: evaluates W, DW.f and the full theta-gradient in one
// pass per point with preallocated workspace. Reduction order is the point
// order, so results are deterministic.
class LossEvaluator {
public:
    LossEvaluator(LossSpec spec, const VectorField& field, const NetShape& shape);

    // Mean/max pointwise loss over the points.
    BatchStats stats(const LyapunovNet& net, PointsView points);

    // Also accumulates d(mean loss)/d(theta) into grad (assigned, not added).
    BatchStats gradient(const LyapunovNet& net, PointsView points, std::vector<double>& grad);

    [[nodiscard]] const LossSpec& spec() const noexcept { return spec_; }

private:
    BatchStats run(const LyapunovNet& net, PointsView points, std::vector<double>* grad);

    LossSpec spec_;
    const VectorField* field_;
    VectorField::Workspace field_ws_;
    std::vector<double> fx_;      // f(x)
    std::vector<double> u_;       // linear layer values
    std::vector<double> v_;       // w1 . f(x)
    std::vector<double> back_w_;  // sum_k a sp' w2 per linear neuron
    std::vector<double> back_t_;  // sum_k a sp'' t w2 per linear neuron
    std::vector<double> act_;     // softplus(z) per neuron
    std::vector<double> act_d1_;
    std::vector<double> act_d2_;
    std::vector<double> slope_;   // t = w2 . v per neuron
};

// One-shot conveniences (the spec's batch operations).
BatchStats batch_loss(const LossSpec& spec, const LyapunovNet& net, const VectorField& field,
                      PointsView points);
DualBundle loss_param_gradient(const LossSpec& spec, const LyapunovNet& net,
                               const VectorField& field, PointsView points);

}  // namespace lyapnet
