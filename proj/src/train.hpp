#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "field.hpp"
#include "loss.hpp"
#include "net.hpp"

namespace lyapnet {

struct AdamParams {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-7;
};

struct AdamState {
    std::vector<double> m;  // first moment
    std::vector<double> v;  // second moment
    std::int64_t t = 0;

    explicit AdamState(std::size_t dim) : m(dim, 0.0), v(dim, 0.0) {}
};

// One Adam update: bias-corrected moments, params -= lr * m_hat / (sqrt(v_hat) + eps).
void adam_step(AdamState& state, std::span<double> params, std::span<const double> grad,
               const AdamParams& hp);

struct TrainConfig {
    std::size_t m = 200000;     // dataset size
    std::size_t batch_size = 32;
    std::size_t max_epochs = 100;
    double tol = 1e-6;          // applies to both err_1 and err_inf
    std::uint64_t seed = 1;
    AdamParams adam;
    bool shuffle_each_epoch = true;

    void validate() const;
};

struct TrainReport {
    std::size_t epochs_run = 0;
    bool converged = false;
    std::vector<BatchStats> history;  // per-epoch (err_1, err_inf) on the dataset
    double wall_time_seconds = 0.0;
    std::string checkpoint_path;      // set by callers that persist the result
};

// i.i.d. uniform samples on [-1, 1]^n, flat row-major; deterministic per seed.
std::vector<double> sample_dataset(int n, std::size_t m, std::uint64_t seed);

using EpochCallback = std::function<void(std::size_t epoch, const BatchStats& errs)>;

// Minibatch Adam on the mean loss; stops when both err metrics drop below
// cfg.tol at an epoch boundary. Single-threaded and bit-deterministic for a
// fixed config. Throws ErrorCode::non_finite (with epoch/batch position) if
// the loss or gradient degenerates.
std::pair<LyapunovNet, TrainReport> train(const TrainConfig& cfg, const NetShape& shape,
                                          const VectorField& field, const LossSpec& spec,
                                          const EpochCallback& on_epoch = {});

}  // namespace lyapnet
