#include "verify.hpp"

#include <cmath>
#include <string>

#include "error.hpp"
#include "textio.hpp"

namespace lyapnet {

VerifyReport verify_samples(const LyapunovNet& net, const VectorField& field,
                            const LossSpec& spec, PointsView points, double r0) {
    spec.validate();
    if (r0 < 0.0 || std::isnan(r0)) {
        raise(ErrorCode::invalid_argument, "exclusion radius must be nonnegative");
    }
    if (points.dim != net.shape().n || field.dim() != net.shape().n) {
        raise(ErrorCode::shape_mismatch, "point/field dimension does not match the network");
    }

    VerifyReport report;
    report.points_checked = points.count;
    report.exclusion_radius = r0;

    LyapunovNet::Workspace net_ws;
    VectorField::Workspace field_ws;
    const std::size_t n = static_cast<std::size_t>(points.dim);
    std::vector<double> fx(n);
    std::vector<double> dw(n);

    double loss_sum = 0.0;
    double loss_max = 0.0;
    for (std::size_t i = 0; i < points.count; ++i) {
        const std::span<const double> x = points.point(i);
        field.eval(x, fx, field_ws);
        const double w = net.forward(x, net_ws);
        net.grad_x(x, dw, net_ws);

        double r_sq = 0.0;
        for (double xi : x) r_sq += xi * xi;
        const double r = std::sqrt(r_sq);

        // Points inside the exclusion ball contribute to the err metrics but
        // not to the violation counts: close to the equilibrium the trained
        // candidate is only accurate up to the training tolerance.
        if (r >= r0) {
            const double radial = spec.bounds.radial_from_sq(r_sq);
            const double margin =
                std::max(spec.bounds.c1 * radial - w, w - spec.bounds.c2 * radial);
            if (!report.bounds.worst || margin > *report.bounds.worst) {
                report.bounds.worst = margin;
                report.bounds.witness.assign(x.begin(), x.end());
            }
            if (margin > 0.0) ++report.bounds.count;

            double residual = r_sq;
            for (std::size_t q = 0; q < n; ++q) residual += dw[q] * fx[q];
            if (!report.residual.worst || residual > *report.residual.worst) {
                report.residual.worst = residual;
                report.residual.witness.assign(x.begin(), x.end());
            }
            if (residual > 0.0) ++report.residual.count;
        }

        const double loss = loss_pointwise(spec, w, dw, x, fx);
        loss_sum += loss;
        loss_max = std::max(loss_max, loss);
    }
    if (points.count > 0) {
        report.err1 = loss_sum / static_cast<double>(points.count);
        report.err_inf = loss_max;
    }
    return report;
}

Trajectory integrate(const VectorField& field, std::span<const double> x0, double t_end, double dt,
                     const LyapunovNet* net) {
    if (!(dt > 0.0)) raise(ErrorCode::invalid_argument, "integration step dt must be positive");
    if (!(t_end >= dt)) raise(ErrorCode::invalid_argument, "t_end must be at least dt");
    const std::size_t n = static_cast<std::size_t>(field.dim());
    if (x0.size() != n) {
        raise(ErrorCode::shape_mismatch, "initial state length does not match field dimension");
    }
    if (net != nullptr && net->shape().n != field.dim()) {
        raise(ErrorCode::shape_mismatch, "network dimension does not match field dimension");
    }

    const std::size_t full_steps = static_cast<std::size_t>(std::floor(t_end / dt + 1e-9));
    const double remainder = t_end - static_cast<double>(full_steps) * dt;
    const bool has_tail = remainder > 1e-12 * std::max(1.0, std::abs(t_end));

    Trajectory traj;
    traj.dim = field.dim();
    traj.times.reserve(full_steps + 2);
    traj.states.reserve((full_steps + 2) * n);

    VectorField::Workspace field_ws;
    LyapunovNet::Workspace net_ws;
    std::vector<double> x(x0.begin(), x0.end());
    std::vector<double> k1(n), k2(n), k3(n), k4(n), probe(n);

    const auto record = [&](double t) {
        traj.times.push_back(t);
        traj.states.insert(traj.states.end(), x.begin(), x.end());
        if (net != nullptr) traj.w_values.push_back(net->forward(x, net_ws));
    };
    const auto step = [&](double h) {
        field.eval(x, k1, field_ws);
        for (std::size_t q = 0; q < n; ++q) probe[q] = x[q] + 0.5 * h * k1[q];
        field.eval(probe, k2, field_ws);
        for (std::size_t q = 0; q < n; ++q) probe[q] = x[q] + 0.5 * h * k2[q];
        field.eval(probe, k3, field_ws);
        for (std::size_t q = 0; q < n; ++q) probe[q] = x[q] + h * k3[q];
        field.eval(probe, k4, field_ws);
        for (std::size_t q = 0; q < n; ++q) {
            x[q] += h / 6.0 * (k1[q] + 2.0 * k2[q] + 2.0 * k3[q] + k4[q]);
            if (!std::isfinite(x[q])) {
                raise(ErrorCode::non_finite, "trajectory blew up during integration");
            }
        }
    };

    record(0.0);
    for (std::size_t s = 1; s <= full_steps; ++s) {
        step(dt);
        record(static_cast<double>(s) * dt);
    }
    if (has_tail) {
        step(remainder);
        record(t_end);
    }
    return traj;
}

DecreaseCheck check_decrease(const Trajectory& traj, double slack) {
    if (traj.w_values.size() < 2) {
        raise(ErrorCode::invalid_argument, "trajectory must carry at least two W values");
    }
    DecreaseCheck check;
    for (std::size_t k = 0; k + 1 < traj.w_values.size(); ++k) {
        if (traj.w_values[k + 1] > traj.w_values[k] + slack) {
            check.monotone = false;
            check.first_violation = k;
            break;
        }
    }
    return check;
}

std::string export_slice(const LyapunovNet& net, const VectorField& field, int axis_i, int axis_j,
                         double half_width, int resolution) {
    const int n = net.shape().n;
    if (field.dim() != n) {
        raise(ErrorCode::shape_mismatch, "field dimension does not match the network");
    }
    if (axis_i == axis_j || axis_i < 0 || axis_j < 0 || axis_i >= n || axis_j >= n) {
        raise(ErrorCode::invalid_argument, "slice axes must be distinct coordinates of the state");
    }
    if (resolution < 2) raise(ErrorCode::invalid_argument, "slice resolution must be at least 2");
    if (!(half_width > 0.0)) raise(ErrorCode::invalid_argument, "half_width must be positive");

    LyapunovNet::Workspace net_ws;
    VectorField::Workspace field_ws;
    std::vector<double> x(static_cast<std::size_t>(n), 0.0);
    std::vector<double> fx(static_cast<std::size_t>(n));
    std::vector<double> dw(static_cast<std::size_t>(n));

    std::string out = "xi,xj,W,DWf\n";
    const double step = 2.0 * half_width / static_cast<double>(resolution - 1);
    for (int row = 0; row < resolution; ++row) {
        const double xi = -half_width + step * static_cast<double>(row);
        for (int col = 0; col < resolution; ++col) {
            const double xj = -half_width + step * static_cast<double>(col);
            x[static_cast<std::size_t>(axis_i)] = xi;
            x[static_cast<std::size_t>(axis_j)] = xj;
            const double w = net.forward(x, net_ws);
            net.grad_x(x, dw, net_ws);
            field.eval(x, fx, field_ws);
            double dwf = 0.0;
            for (int q = 0; q < n; ++q) {
                dwf += dw[static_cast<std::size_t>(q)] * fx[static_cast<std::size_t>(q)];
            }
            append_double(out, xi);
            out += ',';
            append_double(out, xj);
            out += ',';
            append_double(out, w);
            out += ',';
            append_double(out, dwf);
            out += '\n';
        }
    }
    return out;
}

std::string trajectory_csv(const Trajectory& traj) {
    if (traj.w_values.size() != traj.times.size()) {
        raise(ErrorCode::invalid_argument, "trajectory has no W values to export");
    }
    std::string out = "t,W\n";
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        append_double(out, traj.times[i]);
        out += ',';
        append_double(out, traj.w_values[i]);
        out += '\n';
    }
    return out;
}

}  // namespace lyapnet
