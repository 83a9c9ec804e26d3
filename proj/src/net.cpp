#include "net.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "diffmath.hpp"
#include "error.hpp"
#include "rng.hpp"

namespace lyapnet {

void validate_shape(const NetShape& shape) {
    if (shape.n < 1 || shape.n_sub < 1 || shape.d_max < 1 || shape.m_per < 1) {
        raise(ErrorCode::invalid_argument, "network shape fields must all be at least 1");
    }
}

std::vector<std::string> shape_warnings(const NetShape& shape) {
    std::vector<std::string> warnings;
    if (shape.n_sub > shape.n) {
        warnings.push_back("n_sub (" + std::to_string(shape.n_sub) +
                           ") exceeds the state dimension (" + std::to_string(shape.n) +
                           "); extra sublayers add parameters without adding structure");
    }
    return warnings;
}

std::size_t param_count(const NetShape& shape) {
    validate_shape(shape);
    const std::size_t n = static_cast<std::size_t>(shape.n);
    const std::size_t s = static_cast<std::size_t>(shape.n_sub);
    const std::size_t d = static_cast<std::size_t>(shape.d_max);
    const std::size_t m = static_cast<std::size_t>(shape.m_per);
    return s * d * (n + 1) + s * m * (d + 1) + s * m + 1;
}

LyapunovNet::LyapunovNet(NetShape shape) : shape_(shape) {
    validate_shape(shape_);
    const std::size_t n = static_cast<std::size_t>(shape_.n);
    const std::size_t s = static_cast<std::size_t>(shape_.n_sub);
    const std::size_t d = static_cast<std::size_t>(shape_.d_max);
    const std::size_t m = static_cast<std::size_t>(shape_.m_per);
    w1_size_ = s * d * n;
    b1_size_ = s * d;
    w2_size_ = s * m * d;
    b2_size_ = s * m;
    a_size_ = s * m;
    params_.assign(w1_size_ + b1_size_ + w2_size_ + b2_size_ + a_size_ + 1, 0.0);
}

LyapunovNet LyapunovNet::init(const NetShape& shape, std::uint64_t seed) {
    LyapunovNet net(shape);
    SplitMix64 rng = seeded_stream(seed, kStreamInit);
    const auto fill_uniform = [&rng](std::span<double> dst, double fan_in, double fan_out) {
        const double limit = std::sqrt(6.0 / (fan_in + fan_out));
        for (double& v : dst) v = rng.next_in(-limit, limit);
    };
    fill_uniform(net.w1(), shape.n, shape.linear_width());
    fill_uniform(net.w2(), shape.d_max, shape.m_per);
    fill_uniform(net.a(), static_cast<double>(shape.n_sub) * shape.m_per, 1.0);
    return net;  // biases and c stay zero
}

double LyapunovNet::forward(std::span<const double> x) const {
    Workspace ws;
    return forward(x, ws);
}

double LyapunovNet::forward(std::span<const double> x, Workspace& ws) const {
    const std::size_t n = static_cast<std::size_t>(shape_.n);
    if (x.size() != n) {
        raise(ErrorCode::shape_mismatch, "input vector length does not match network dimension");
    }
    const std::size_t h1 = static_cast<std::size_t>(shape_.linear_width());
    const std::size_t d = static_cast<std::size_t>(shape_.d_max);
    const std::size_t m = static_cast<std::size_t>(shape_.m_per);

    ws.u.resize(h1);
    const double* w1p = params_.data() + w1_offset();
    const double* b1p = params_.data() + b1_offset();
    for (std::size_t p = 0; p < h1; ++p) {
        double acc = b1p[p];
        const double* row = w1p + p * n;
        for (std::size_t q = 0; q < n; ++q) acc += row[q] * x[q];
        ws.u[p] = acc;
    }

    const double* w2p = params_.data() + w2_offset();
    const double* b2p = params_.data() + b2_offset();
    const double* ap = params_.data() + a_offset();
    double out = params_[c_offset()];
    for (std::size_t i = 0; i < static_cast<std::size_t>(shape_.n_sub); ++i) {
        const double* ui = ws.u.data() + i * d;
        for (std::size_t k = 0; k < m; ++k) {
            const std::size_t neuron = i * m + k;
            double z = b2p[neuron];
            const double* wrow = w2p + neuron * d;
            for (std::size_t j = 0; j < d; ++j) z += wrow[j] * ui[j];
            out += ap[neuron] * softplus(z);
        }
    }
    return out;
}

void LyapunovNet::grad_x(std::span<const double> x, std::span<double> grad, Workspace& ws) const {
    const std::size_t n = static_cast<std::size_t>(shape_.n);
    if (x.size() != n || grad.size() != n) {
        raise(ErrorCode::shape_mismatch, "input vector length does not match network dimension");
    }
    const std::size_t h1 = static_cast<std::size_t>(shape_.linear_width());
    const std::size_t d = static_cast<std::size_t>(shape_.d_max);
    const std::size_t m = static_cast<std::size_t>(shape_.m_per);

    ws.u.resize(h1);
    ws.b.assign(h1, 0.0);
    const double* w1p = params_.data() + w1_offset();
    const double* b1p = params_.data() + b1_offset();
    for (std::size_t p = 0; p < h1; ++p) {
        double acc = b1p[p];
        const double* row = w1p + p * n;
        for (std::size_t q = 0; q < n; ++q) acc += row[q] * x[q];
        ws.u[p] = acc;
    }

    // Back-weights per linear neuron: b_p = sum_k a_ik sp'(z_ik) w2_ikj.
    const double* w2p = params_.data() + w2_offset();
    const double* b2p = params_.data() + b2_offset();
    const double* ap = params_.data() + a_offset();
    for (std::size_t i = 0; i < static_cast<std::size_t>(shape_.n_sub); ++i) {
        const double* ui = ws.u.data() + i * d;
        double* bi = ws.b.data() + i * d;
        for (std::size_t k = 0; k < m; ++k) {
            const std::size_t neuron = i * m + k;
            double z = b2p[neuron];
            const double* wrow = w2p + neuron * d;
            for (std::size_t j = 0; j < d; ++j) z += wrow[j] * ui[j];
            const double scale = ap[neuron] * softplus_d1(z);
            for (std::size_t j = 0; j < d; ++j) bi[j] += scale * wrow[j];
        }
    }

    for (std::size_t q = 0; q < n; ++q) grad[q] = 0.0;
    for (std::size_t p = 0; p < h1; ++p) {
        const double bp = ws.b[p];
        if (bp == 0.0) continue;
        const double* row = w1p + p * n;
        for (std::size_t q = 0; q < n; ++q) grad[q] += bp * row[q];
    }
}

std::vector<double> LyapunovNet::grad_x(std::span<const double> x) const {
    std::vector<double> grad(x.size());
    Workspace ws;
    grad_x(x, grad, ws);
    return grad;
}

namespace {

using nlohmann::json;

json span_to_json(std::span<const double> v) { return json(std::vector<double>(v.begin(), v.end())); }

void read_array(const json& doc, const char* key, std::span<double> dst) {
    if (!doc.contains(key)) {
        raise(ErrorCode::schema, std::string("checkpoint is missing field \"") + key + "\"");
    }
    const json& arr = doc[key];
    if (!arr.is_array()) {
        raise(ErrorCode::schema, std::string("checkpoint field \"") + key + "\" must be an array");
    }
    if (arr.size() != dst.size()) {
        raise(ErrorCode::shape_mismatch,
              std::string("checkpoint field \"") + key + "\" has length " +
                  std::to_string(arr.size()) + ", expected " + std::to_string(dst.size()));
    }
    for (std::size_t i = 0; i < dst.size(); ++i) {
        if (!arr[i].is_number()) {
            raise(ErrorCode::schema, std::string("checkpoint field \"") + key +
                                         "\" contains a non-numeric entry");
        }
        dst[i] = arr[i].get<double>();
    }
}

int read_shape_field(const json& shape, const char* key) {
    if (!shape.contains(key) || !shape[key].is_number_integer()) {
        raise(ErrorCode::schema, std::string("checkpoint shape is missing integer field \"") + key + "\"");
    }
    return shape[key].get<int>();
}

}  // namespace

std::string serialize_checkpoint(const LyapunovNet& net) {
    json doc;
    doc["schema_version"] = 1;
    doc["shape"] = {{"n", net.shape().n},
                    {"n_sub", net.shape().n_sub},
                    {"d_max", net.shape().d_max},
                    {"m_per", net.shape().m_per}};
    doc["w1"] = span_to_json(net.w1());
    doc["b1"] = span_to_json(net.b1());
    doc["w2"] = span_to_json(net.w2());
    doc["b2"] = span_to_json(net.b2());
    doc["a"] = span_to_json(net.a());
    doc["c"] = net.c();
    return doc.dump(2) + "\n";
}

LyapunovNet deserialize_checkpoint(const std::string& text) {
    json doc = json::parse(text, nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) {
        raise(ErrorCode::schema, "checkpoint is not a valid JSON object");
    }
    if (!doc.contains("schema_version") || !doc["schema_version"].is_number_integer() ||
        doc["schema_version"].get<int>() != 1) {
        raise(ErrorCode::schema, "checkpoint schema_version must be 1");
    }
    if (!doc.contains("shape") || !doc["shape"].is_object()) {
        raise(ErrorCode::schema, "checkpoint is missing object field \"shape\"");
    }
    NetShape shape;
    shape.n = read_shape_field(doc["shape"], "n");
    shape.n_sub = read_shape_field(doc["shape"], "n_sub");
    shape.d_max = read_shape_field(doc["shape"], "d_max");
    shape.m_per = read_shape_field(doc["shape"], "m_per");
    validate_shape(shape);

    LyapunovNet net(shape);
    read_array(doc, "w1", net.w1());
    read_array(doc, "b1", net.b1());
    read_array(doc, "w2", net.w2());
    read_array(doc, "b2", net.b2());
    read_array(doc, "a", net.a());
    if (!doc.contains("c") || !doc["c"].is_number()) {
        raise(ErrorCode::schema, "checkpoint is missing numeric field \"c\"");
    }
    net.c_ref() = doc["c"].get<double>();
    for (double v : net.params()) {
        if (!std::isfinite(v)) raise(ErrorCode::schema, "checkpoint contains non-finite parameters");
    }
    return net;
}

void save_checkpoint(const LyapunovNet& net, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) raise(ErrorCode::io, "cannot open checkpoint file for writing: " + path);
    out << serialize_checkpoint(net);
    if (!out) raise(ErrorCode::io, "failed writing checkpoint file: " + path);
}

LyapunovNet load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) raise(ErrorCode::io, "cannot open checkpoint file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return deserialize_checkpoint(buf.str());
}

}  // namespace lyapnet
