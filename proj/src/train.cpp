#include "train.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <string>

#include "error.hpp"
#include "rng.hpp"

namespace lyapnet {

void adam_step(AdamState& state, std::span<double> params, std::span<const double> grad,
               const AdamParams& hp) {
    if (params.size() != grad.size() || params.size() != state.m.size()) {
        raise(ErrorCode::shape_mismatch, "adam_step: parameter, gradient, and state lengths differ");
    }
    state.t += 1;
    const double bc1 = 1.0 - std::pow(hp.beta1, static_cast<double>(state.t));
    const double bc2 = 1.0 - std::pow(hp.beta2, static_cast<double>(state.t));
    for (std::size_t i = 0; i < params.size(); ++i) {
        const double g = grad[i];
        state.m[i] = hp.beta1 * state.m[i] + (1.0 - hp.beta1) * g;
        state.v[i] = hp.beta2 * state.v[i] + (1.0 - hp.beta2) * g * g;
        const double m_hat = state.m[i] / bc1;
        const double v_hat = state.v[i] / bc2;
        params[i] -= hp.lr * m_hat / (std::sqrt(v_hat) + hp.eps);
    }
}

void TrainConfig::validate() const {
    if (batch_size < 1) raise(ErrorCode::invalid_argument, "batch_size must be at least 1");
    if (m < batch_size) raise(ErrorCode::invalid_argument, "dataset size m must be >= batch_size");
    if (!(tol > 0.0)) raise(ErrorCode::invalid_argument, "tolerance must be positive");
    if (!(adam.lr > 0.0) || !(adam.eps > 0.0) || !(adam.beta1 >= 0.0 && adam.beta1 < 1.0) ||
        !(adam.beta2 >= 0.0 && adam.beta2 < 1.0)) {
        raise(ErrorCode::invalid_argument, "invalid Adam hyperparameters");
    }
}

std::vector<double> sample_dataset(int n, std::size_t m, std::uint64_t seed) {
    if (n < 1 || m < 1) raise(ErrorCode::invalid_argument, "dataset dimensions must be positive");
    SplitMix64 rng = seeded_stream(seed, kStreamDataset);
    std::vector<double> flat(static_cast<std::size_t>(n) * m);
    for (double& v : flat) v = rng.next_symmetric();
    return flat;
}

namespace {

void shuffle_rows(std::vector<double>& flat, std::size_t rows, std::size_t dim, SplitMix64& rng) {
    for (std::size_t i = rows - 1; i > 0; --i) {
        const std::size_t j = rng.next_below(i + 1);
        if (j != i) {
            std::swap_ranges(flat.begin() + static_cast<std::ptrdiff_t>(i * dim),
                             flat.begin() + static_cast<std::ptrdiff_t>((i + 1) * dim),
                             flat.begin() + static_cast<std::ptrdiff_t>(j * dim));
        }
    }
}

void check_finite_gradient(const BatchStats& stats, const std::vector<double>& grad,
                           std::size_t epoch, std::size_t batch) {
    bool ok = std::isfinite(stats.mean) && std::isfinite(stats.max);
    if (ok) {
        for (double g : grad) {
            if (!std::isfinite(g)) {
                ok = false;
                break;
            }
        }
    }
    if (!ok) {
        raise(ErrorCode::non_finite, "non-finite loss or gradient at epoch " +
                                         std::to_string(epoch) + ", batch " + std::to_string(batch));
    }
}

}  // namespace

std::pair<LyapunovNet, TrainReport> train(const TrainConfig& cfg, const NetShape& shape,
                                          const VectorField& field, const LossSpec& spec,
                                          const EpochCallback& on_epoch) {
    cfg.validate();
    validate_shape(shape);
    spec.validate();
    if (field.dim() != shape.n) {
        raise(ErrorCode::shape_mismatch, "vector field dimension does not match network shape");
    }

    const auto t_start = std::chrono::steady_clock::now();
    LyapunovNet net = LyapunovNet::init(shape, cfg.seed);
    std::vector<double> data = sample_dataset(shape.n, cfg.m, cfg.seed);
    const std::size_t dim = static_cast<std::size_t>(shape.n);

    LossEvaluator evaluator(spec, field, shape);
    AdamState adam(net.param_count());
    std::vector<double> grad;
    SplitMix64 shuffle_rng = seeded_stream(cfg.seed, kStreamShuffle);

    TrainReport report;
    for (std::size_t epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
        if (cfg.shuffle_each_epoch) shuffle_rows(data, cfg.m, dim, shuffle_rng);

        const PointsView all(data, shape.n);
        std::size_t batch_index = 0;
        for (std::size_t offset = 0; offset < cfg.m; offset += cfg.batch_size, ++batch_index) {
            const std::size_t len = std::min(cfg.batch_size, cfg.m - offset);
            const BatchStats stats = evaluator.gradient(net, all.slice(offset, len), grad);
            check_finite_gradient(stats, grad, epoch, batch_index);
            adam_step(adam, net.params(), grad, cfg.adam);
        }

        const BatchStats errs = evaluator.stats(net, all);
        if (!std::isfinite(errs.mean) || !std::isfinite(errs.max)) {
            raise(ErrorCode::non_finite,
                  "non-finite epoch metrics at epoch " + std::to_string(epoch));
        }
        report.history.push_back(errs);
        report.epochs_run = epoch;
        if (on_epoch) on_epoch(epoch, errs);
        if (errs.mean < cfg.tol && errs.max < cfg.tol) {
            report.converged = true;
            break;
        }
    }

    report.wall_time_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    return {std::move(net), report};
}

}  // namespace lyapnet
