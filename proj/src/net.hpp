#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace lyapnet {

// Architecture of the two-hidden-layer network: a trainable linear layer of
// n_sub*d_max neurons feeding n_sub disjoint softplus sublayers of m_per
// neurons each, affinely combined into a scalar output.
struct NetShape {
    int n = 0;      // input dimension
    int n_sub = 0;  // number of sublayers
    int d_max = 0;  // inputs per sublayer
    int m_per = 0;  // softplus neurons per sublayer

    [[nodiscard]] int linear_width() const noexcept { return n_sub * d_max; }
    [[nodiscard]] int hidden_neurons() const noexcept { return n_sub * (d_max + m_per); }

    friend bool operator==(const NetShape&, const NetShape&) = default;
};

// Throws ErrorCode::invalid_argument when a field is below 1.
void validate_shape(const NetShape& shape);

// Non-fatal advice (currently: n_sub larger than the state dimension).
std::vector<std::string> shape_warnings(const NetShape& shape);

[[nodiscard]] std::size_t param_count(const NetShape& shape);

// W(x; theta) with theta stored as one flat vector in the order
// [w1 | b1 | w2 | b2 | a | c]; w1 is (n_sub*d_max)-by-n row-major, w2 holds
// per-sublayer m_per-by-d_max blocks, a and b2 are sublayer-major. The flat
// layout is exactly what the optimizer updates.
class LyapunovNet {
public:
    struct Workspace {
        std::vector<double> u;  // linear layer output
        std::vector<double> b;  // per-linear-neuron back-weights
    };

    explicit LyapunovNet(NetShape shape);  // all parameters zero

    // Fan-based uniform weights, zero biases; deterministic per seed.
    static LyapunovNet init(const NetShape& shape, std::uint64_t seed);

    [[nodiscard]] const NetShape& shape() const noexcept { return shape_; }
    [[nodiscard]] std::size_t param_count() const noexcept { return params_.size(); }

    [[nodiscard]] std::span<const double> params() const noexcept { return params_; }
    [[nodiscard]] std::span<double> params() noexcept { return params_; }

    [[nodiscard]] double forward(std::span<const double> x) const;
    double forward(std::span<const double> x, Workspace& ws) const;

    void grad_x(std::span<const double> x, std::span<double> grad, Workspace& ws) const;
    [[nodiscard]] std::vector<double> grad_x(std::span<const double> x) const;

    // Flat-layout offsets and views.
    [[nodiscard]] std::size_t w1_offset() const noexcept { return 0; }
    [[nodiscard]] std::size_t b1_offset() const noexcept { return w1_size_; }
    [[nodiscard]] std::size_t w2_offset() const noexcept { return w1_size_ + b1_size_; }
    [[nodiscard]] std::size_t b2_offset() const noexcept { return w2_offset() + w2_size_; }
    [[nodiscard]] std::size_t a_offset() const noexcept { return b2_offset() + b2_size_; }
    [[nodiscard]] std::size_t c_offset() const noexcept { return a_offset() + a_size_; }

    [[nodiscard]] std::span<const double> w1() const { return view(w1_offset(), w1_size_); }
    [[nodiscard]] std::span<const double> b1() const { return view(b1_offset(), b1_size_); }
    [[nodiscard]] std::span<const double> w2() const { return view(w2_offset(), w2_size_); }
    [[nodiscard]] std::span<const double> b2() const { return view(b2_offset(), b2_size_); }
    [[nodiscard]] std::span<const double> a() const { return view(a_offset(), a_size_); }
    [[nodiscard]] double c() const { return params_[c_offset()]; }

    [[nodiscard]] std::span<double> w1() { return mut_view(w1_offset(), w1_size_); }
    [[nodiscard]] std::span<double> b1() { return mut_view(b1_offset(), b1_size_); }
    [[nodiscard]] std::span<double> w2() { return mut_view(w2_offset(), w2_size_); }
    [[nodiscard]] std::span<double> b2() { return mut_view(b2_offset(), b2_size_); }
    [[nodiscard]] std::span<double> a() { return mut_view(a_offset(), a_size_); }
    double& c_ref() { return params_[c_offset()]; }

private:
    [[nodiscard]] std::span<const double> view(std::size_t off, std::size_t len) const {
        return {params_.data() + off, len};
    }
    [[nodiscard]] std::span<double> mut_view(std::size_t off, std::size_t len) {
        return {params_.data() + off, len};
    }

    NetShape shape_;
    std::size_t w1_size_, b1_size_, w2_size_, b2_size_, a_size_;
    std::vector<double> params_;
};

// Checkpoint document (JSON text): {schema_version, shape{...}, w1, b1, w2,
// b2, a, c}. Round trips are lossless. Throws ErrorCode::schema on malformed
// documents and ErrorCode::shape_mismatch when array lengths disagree.
std::string serialize_checkpoint(const LyapunovNet& net);
LyapunovNet deserialize_checkpoint(const std::string& text);
void save_checkpoint(const LyapunovNet& net, const std::string& path);
LyapunovNet load_checkpoint(const std::string& path);

}  // namespace lyapnet
