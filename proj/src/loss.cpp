#include "loss.hpp"

#include <algorithm>
#include <cmath>

#include "error.hpp"

namespace lyapnet {

double BoundSpec::radial(double r) const {
    if (power == 2.0) return r * r;
    return std::pow(r, power);
}

double BoundSpec::radial_from_sq(double r_sq) const {
    if (power == 2.0) return r_sq;
    return std::pow(std::sqrt(r_sq), power);
}

void BoundSpec::validate() const {
    if (!(c1 > 0.0) || !(c2 > 0.0) || !std::isfinite(c1) || !std::isfinite(c2)) {
        raise(ErrorCode::invalid_argument, "bound coefficients c1, c2 must be positive and finite");
    }
    if (!(c1 < c2)) {
        raise(ErrorCode::invalid_argument, "bound coefficients must satisfy c1 < c2");
    }
    if (!(power >= 1.0) || !std::isfinite(power)) {
        raise(ErrorCode::invalid_argument, "bound power must be at least 1");
    }
}

void LossSpec::validate() const {
    bounds.validate();
    if (!(nu >= 0.0) || !std::isfinite(nu)) {
        raise(ErrorCode::invalid_argument, "loss weight nu must be finite and nonnegative");
    }
}

double loss_pointwise(const LossSpec& spec, double w, std::span<const double> p,
                      std::span<const double> x, std::span<const double> fx) {
    double r_sq = 0.0;
    for (double xi : x) r_sq += xi * xi;
    double residual = r_sq;
    for (std::size_t q = 0; q < p.size(); ++q) residual += p[q] * fx[q];

    double loss;
    if (spec.kind == LossKind::pde) {
        loss = residual * residual;
    } else {
        const double pos = std::max(residual, 0.0);
        loss = pos * pos;
    }
    const double radial = spec.bounds.radial_from_sq(r_sq);
    const double low = std::min(w - spec.bounds.c1 * radial, 0.0);
    const double high = std::max(w - spec.bounds.c2 * radial, 0.0);
    loss += spec.nu * (low * low + high * high);
    return loss;
}

LossEvaluator::LossEvaluator(LossSpec spec, const VectorField& field, const NetShape& shape)
    : spec_(spec), field_(&field) {
    spec_.validate();
    validate_shape(shape);
    if (field.dim() != shape.n) {
        raise(ErrorCode::shape_mismatch, "vector field dimension does not match network input");
    }
    const std::size_t n = static_cast<std::size_t>(shape.n);
    const std::size_t h1 = static_cast<std::size_t>(shape.linear_width());
    const std::size_t neurons = static_cast<std::size_t>(shape.n_sub) * shape.m_per;
    fx_.resize(n);
    u_.resize(h1);
    v_.resize(h1);
    back_w_.resize(h1);
    back_t_.resize(h1);
    act_.resize(neurons);
    act_d1_.resize(neurons);
    act_d2_.resize(neurons);
    slope_.resize(neurons);
}

BatchStats LossEvaluator::stats(const LyapunovNet& net, PointsView points) {
    return run(net, points, nullptr);
}

BatchStats LossEvaluator::gradient(const LyapunovNet& net, PointsView points,
                                   std::vector<double>& grad) {
    grad.assign(net.param_count(), 0.0);
    return run(net, points, &grad);
}

BatchStats LossEvaluator::run(const LyapunovNet& net, PointsView points, std::vector<double>* grad) {
    if (points.count == 0) {
        raise(ErrorCode::invalid_argument, "batch must contain at least one point");
    }
    if (points.dim != net.shape().n) {
        raise(ErrorCode::shape_mismatch, "point dimension does not match network input");
    }
    const NetShape& shape = net.shape();
    const std::size_t n = static_cast<std::size_t>(shape.n);
    const std::size_t h1 = static_cast<std::size_t>(shape.linear_width());
    const std::size_t d = static_cast<std::size_t>(shape.d_max);
    const std::size_t m = static_cast<std::size_t>(shape.m_per);
    const std::size_t n_sub = static_cast<std::size_t>(shape.n_sub);

    const double* w1 = net.params().data() + net.w1_offset();
    const double* b1 = net.params().data() + net.b1_offset();
    const double* w2 = net.params().data() + net.w2_offset();
    const double* b2 = net.params().data() + net.b2_offset();
    const double* a = net.params().data() + net.a_offset();
    const double c = net.c();

    double* g_w1 = nullptr;
    double* g_b1 = nullptr;
    double* g_w2 = nullptr;
    double* g_b2 = nullptr;
    double* g_a = nullptr;
    double* g_c = nullptr;
    if (grad != nullptr) {
        g_w1 = grad->data() + net.w1_offset();
        g_b1 = grad->data() + net.b1_offset();
        g_w2 = grad->data() + net.w2_offset();
        g_b2 = grad->data() + net.b2_offset();
        g_a = grad->data() + net.a_offset();
        g_c = grad->data() + net.c_offset();
    }

    double loss_sum = 0.0;
    double loss_max = 0.0;
    for (std::size_t idx = 0; idx < points.count; ++idx) {
        const std::span<const double> x = points.point(idx);
        field_->eval(x, fx_, field_ws_);

        double r_sq = 0.0;
        for (double xi : x) r_sq += xi * xi;

        // Linear layer value u = w1 x + b1 and directional input v = w1 f(x).
        for (std::size_t p = 0; p < h1; ++p) {
            const double* row = w1 + p * n;
            double acc_u = b1[p];
            double acc_v = 0.0;
            for (std::size_t q = 0; q < n; ++q) {
                acc_u += row[q] * x[q];
                acc_v += row[q] * fx_[q];
            }
            u_[p] = acc_u;
            v_[p] = acc_v;
        }

        // Hidden layer pass: W(x), orbital derivative G = DW(x) . f(x).
        double w_value = c;
        double orbital = 0.0;
        for (std::size_t i = 0; i < n_sub; ++i) {
            const double* ui = u_.data() + i * d;
            const double* vi = v_.data() + i * d;
            for (std::size_t k = 0; k < m; ++k) {
                const std::size_t neuron = i * m + k;
                const double* wrow = w2 + neuron * d;
                double z = b2[neuron];
                double t = 0.0;
                for (std::size_t j = 0; j < d; ++j) {
                    z += wrow[j] * ui[j];
                    t += wrow[j] * vi[j];
                }
                const SoftplusTrio sp = softplus_trio(z);
                act_[neuron] = sp.value;
                act_d1_[neuron] = sp.d1;
                act_d2_[neuron] = sp.d2;
                slope_[neuron] = t;
                w_value += a[neuron] * sp.value;
                orbital += a[neuron] * sp.d1 * t;
            }
        }

        const double residual = orbital + r_sq;
        const double radial = spec_.bounds.radial_from_sq(r_sq);
        const double low = std::min(w_value - spec_.bounds.c1 * radial, 0.0);
        const double high = std::max(w_value - spec_.bounds.c2 * radial, 0.0);

        double point_loss;
        double res_mult;  // d loss / d residual
        if (spec_.kind == LossKind::pde) {
            point_loss = residual * residual;
            res_mult = 2.0 * residual;
        } else {
            const double pos = std::max(residual, 0.0);
            point_loss = pos * pos;
            res_mult = 2.0 * pos;
        }
        point_loss += spec_.nu * (low * low + high * high);
        const double bound_mult = 2.0 * spec_.nu * (low + high);  // d loss / d W

        loss_sum += point_loss;
        loss_max = std::max(loss_max, point_loss);

        if (grad == nullptr) continue;
        if (res_mult == 0.0 && bound_mult == 0.0) continue;

        *g_c += bound_mult;
        std::fill(back_w_.begin(), back_w_.end(), 0.0);
        std::fill(back_t_.begin(), back_t_.end(), 0.0);
        for (std::size_t i = 0; i < n_sub; ++i) {
            const double* ui = u_.data() + i * d;
            const double* vi = v_.data() + i * d;
            double* bw = back_w_.data() + i * d;
            double* bt = back_t_.data() + i * d;
            for (std::size_t k = 0; k < m; ++k) {
                const std::size_t neuron = i * m + k;
                const double* wrow = w2 + neuron * d;
                double* g_wrow = g_w2 + neuron * d;
                const double ak = a[neuron];
                const double s = act_[neuron];
                const double s1 = act_d1_[neuron];
                const double s2 = act_d2_[neuron];
                const double t = slope_[neuron];

                g_a[neuron] += res_mult * s1 * t + bound_mult * s;
                const double gz = res_mult * ak * s2 * t + bound_mult * ak * s1;  // d/dz
                g_b2[neuron] += gz;
                const double gt = res_mult * ak * s1;  // d/dt
                for (std::size_t j = 0; j < d; ++j) {
                    g_wrow[j] += gz * ui[j] + gt * vi[j];
                    bw[j] += ak * s1 * wrow[j];
                    bt[j] += ak * s2 * t * wrow[j];
                }
            }
        }
        for (std::size_t p = 0; p < h1; ++p) {
            const double gu = res_mult * back_t_[p] + bound_mult * back_w_[p];  // d/du_p
            const double gv = res_mult * back_w_[p];                            // d/dv_p
            g_b1[p] += gu;
            if (gu == 0.0 && gv == 0.0) continue;
            double* g_row = g_w1 + p * n;
            for (std::size_t q = 0; q < n; ++q) {
                g_row[q] += gu * x[q] + gv * fx_[q];
            }
        }
    }

    if (grad != nullptr) {
        const double inv = 1.0 / static_cast<double>(points.count);
        for (double& g : *grad) g *= inv;
    }
    return BatchStats{loss_sum / static_cast<double>(points.count), loss_max};
}

BatchStats batch_loss(const LossSpec& spec, const LyapunovNet& net, const VectorField& field,
                      PointsView points) {
    LossEvaluator eval(spec, field, net.shape());
    return eval.stats(net, points);
}

DualBundle loss_param_gradient(const LossSpec& spec, const LyapunovNet& net,
                               const VectorField& field, PointsView points) {
    LossEvaluator eval(spec, field, net.shape());
    DualBundle out;
    BatchStats stats = eval.gradient(net, points, out.grad);
    out.value = stats.mean;
    return out;
}

}  // namespace lyapnet
