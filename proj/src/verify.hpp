#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "field.hpp"
#include "loss.hpp"
#include "net.hpp"
#include "points.hpp"

namespace lyapnet {

// Worst case over the considered points; the witness is the point where the
// worst value was attained. A positive worst value means a violation.
struct ViolationStats {
    std::size_t count = 0;
    std::optional<double> worst;
    std::vector<double> witness;
};

struct VerifyReport {
    std::size_t points_checked = 0;
    double exclusion_radius = 0.0;
    ViolationStats bounds;    // margin max(alpha1(|x|) - W, W - alpha2(|x|))
    ViolationStats residual;  // DW(x).f(x) + |x|^2, only for |x| >= exclusion_radius
    double err1 = 0.0;
    double err_inf = 0.0;
};

// Sampled a-posteriori check of the bound corridor and the decrease
// inequality. Violation counting skips a ball of radius r0 around the
// origin; the err metrics cover every point.
VerifyReport verify_samples(const LyapunovNet& net, const VectorField& field,
                            const LossSpec& spec, PointsView points, double r0);

struct Trajectory {
    int dim = 0;
    std::vector<double> times;
    std::vector<double> states;    // row-major, one row per time
    std::vector<double> w_values;  // empty when integrated without a net

    [[nodiscard]] std::size_t size() const noexcept { return times.size(); }
    [[nodiscard]] std::span<const double> state(std::size_t i) const {
        return {states.data() + i * static_cast<std::size_t>(dim), static_cast<std::size_t>(dim)};
    }
};

// Classical fixed-step fourth-order Runge-Kutta from t=0 to t_end. A shorter
// final step lands exactly on t_end when dt does not divide it. W values are
// recorded along the way when a net is given.
Trajectory integrate(const VectorField& field, std::span<const double> x0, double t_end, double dt,
                     const LyapunovNet* net = nullptr);

struct DecreaseCheck {
    bool monotone = true;
    std::optional<std::size_t> first_violation;
};

// monotone iff w[k+1] <= w[k] + slack for every step.
DecreaseCheck check_decrease(const Trajectory& traj, double slack);

// CSV rows (xi, xj, W, DW.f) over a (resolution x resolution) grid on the
// plane spanned by two coordinates (0-based), all other coordinates zero.
std::string export_slice(const LyapunovNet& net, const VectorField& field, int axis_i, int axis_j,
                         double half_width, int resolution);

// CSV (t, W) series of a trajectory integrated with a net attached.
std::string trajectory_csv(const Trajectory& traj);

}  // namespace lyapnet
