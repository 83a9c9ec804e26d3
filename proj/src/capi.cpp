#include "lyapnet.h"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <string>
#include <utility>

#include "config.hpp"
#include "error.hpp"
#include "field.hpp"
#include "net.hpp"
#include "train.hpp"
#include "verify.hpp"

struct lyn_config {
    lyapnet::RunConfig cfg;
};

struct lyn_field {
    lyapnet::VectorField field;
};

struct lyn_net {
    lyapnet::LyapunovNet net;
};

namespace {

thread_local std::string g_last_error;

void set_last_error(std::string message) { g_last_error = std::move(message); }

lyn_status map_code(lyapnet::ErrorCode code) { return static_cast<lyn_status>(code); }

template <typename Fn>
lyn_status guarded(Fn&& fn) noexcept {
    try {
        fn();
        return LYN_OK;
    } catch (const lyapnet::Error& e) {
        set_last_error(e.what());
        return map_code(e.code());
    } catch (const std::exception& e) {
        set_last_error(e.what());
        return LYN_E_INTERNAL;
    } catch (...) {
        set_last_error("unknown internal error");
        return LYN_E_INTERNAL;
    }
}

char* copy_string(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (out == nullptr) return nullptr;
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

void require_arg(bool ok, const char* what) {
    if (!ok) lyapnet::raise(lyapnet::ErrorCode::invalid_argument, what);
}

int config_dim(const lyapnet::RunConfig& cfg) { return cfg.net.n; }

}  // namespace

extern "C" {

const char* lyn_last_error(void) { return g_last_error.c_str(); }

const char* lyn_status_name(lyn_status status) {
    switch (status) {
        case LYN_OK: return "ok";
        case LYN_E_INVALID_ARGUMENT: return "invalid_argument";
        case LYN_E_PARSE: return "parse_error";
        case LYN_E_UNKNOWN_VARIABLE: return "unknown_variable";
        case LYN_E_ARITY: return "arity_error";
        case LYN_E_UNKNOWN_SYSTEM: return "unknown_system";
        case LYN_E_NON_FINITE: return "non_finite";
        case LYN_E_SINGULAR_MATRIX: return "singular_matrix";
        case LYN_E_SCHEMA: return "schema_error";
        case LYN_E_SHAPE_MISMATCH: return "shape_mismatch";
        case LYN_E_IO: return "io_error";
        default: return "internal_error";
    }
}

void lyn_string_free(char* text) { std::free(text); }

lyn_status lyn_config_load_file(const char* path, lyn_config** out) {
    return guarded([&] {
        require_arg(path != nullptr && out != nullptr, "path and out must not be NULL");
        *out = new lyn_config{lyapnet::RunConfig::parse_file(path)};
    });
}

lyn_status lyn_config_load_string(const char* text, lyn_config** out) {
    return guarded([&] {
        require_arg(text != nullptr && out != nullptr, "text and out must not be NULL");
        *out = new lyn_config{lyapnet::RunConfig::parse_string(text)};
    });
}

void lyn_config_free(lyn_config* cfg) { delete cfg; }

lyn_status lyn_config_set_seed(lyn_config* cfg, uint64_t seed) {
    return guarded([&] {
        require_arg(cfg != nullptr, "cfg must not be NULL");
        cfg->cfg.train.seed = seed;
    });
}

lyn_status lyn_config_dim(const lyn_config* cfg, int32_t* out) {
    return guarded([&] {
        require_arg(cfg != nullptr && out != nullptr, "cfg and out must not be NULL");
        *out = config_dim(cfg->cfg);
    });
}

lyn_status lyn_config_param_count(const lyn_config* cfg, int64_t* out) {
    return guarded([&] {
        require_arg(cfg != nullptr && out != nullptr, "cfg and out must not be NULL");
        *out = static_cast<int64_t>(lyapnet::param_count(cfg->cfg.net));
    });
}

lyn_status lyn_config_seed(const lyn_config* cfg, uint64_t* out) {
    return guarded([&] {
        require_arg(cfg != nullptr && out != nullptr, "cfg and out must not be NULL");
        *out = cfg->cfg.train.seed;
    });
}

lyn_status lyn_config_checkpoint_path(const lyn_config* cfg, char** out) {
    return guarded([&] {
        require_arg(cfg != nullptr && out != nullptr, "cfg and out must not be NULL");
        *out = copy_string(cfg->cfg.checkpoint_path);
    });
}

lyn_status lyn_config_report_path(const lyn_config* cfg, char** out) {
    return guarded([&] {
        require_arg(cfg != nullptr && out != nullptr, "cfg and out must not be NULL");
        *out = copy_string(cfg->cfg.report_path);
    });
}

lyn_status lyn_config_echo(const lyn_config* cfg, char** json_out) {
    return guarded([&] {
        require_arg(cfg != nullptr && json_out != nullptr, "cfg and json_out must not be NULL");
        *json_out = copy_string(cfg->cfg.echo_json());
    });
}

lyn_status lyn_config_warnings(const lyn_config* cfg, char** text_out) {
    return guarded([&] {
        require_arg(cfg != nullptr && text_out != nullptr, "cfg and text_out must not be NULL");
        std::string joined;
        for (const std::string& w : lyapnet::shape_warnings(cfg->cfg.net)) {
            joined += w;
            joined += '\n';
        }
        *text_out = copy_string(joined);
    });
}

lyn_status lyn_field_builtin(const char* name, lyn_field** out) {
    return guarded([&] {
        require_arg(name != nullptr && out != nullptr, "name and out must not be NULL");
        *out = new lyn_field{lyapnet::VectorField::builtin(name)};
    });
}

lyn_status lyn_field_parse(const char* source, int32_t n, lyn_field** out) {
    return guarded([&] {
        require_arg(source != nullptr && out != nullptr, "source and out must not be NULL");
        *out = new lyn_field{lyapnet::VectorField::from_source(source, n)};
    });
}

lyn_status lyn_field_from_config(const lyn_config* cfg, lyn_field** out) {
    return guarded([&] {
        require_arg(cfg != nullptr && out != nullptr, "cfg and out must not be NULL");
        *out = new lyn_field{cfg->cfg.make_field()};
    });
}

void lyn_field_free(lyn_field* field) { delete field; }

int32_t lyn_field_dim(const lyn_field* field) { return field != nullptr ? field->field.dim() : 0; }

lyn_status lyn_field_eval(const lyn_field* field, const double* x, double* fx) {
    return guarded([&] {
        require_arg(field != nullptr && x != nullptr && fx != nullptr,
                    "field, x, and fx must not be NULL");
        const std::size_t n = static_cast<std::size_t>(field->field.dim());
        lyapnet::VectorField::Workspace ws;
        field->field.eval({x, n}, {fx, n}, ws);
    });
}

lyn_status lyn_net_load_file(const char* path, lyn_net** out) {
    return guarded([&] {
        require_arg(path != nullptr && out != nullptr, "path and out must not be NULL");
        *out = new lyn_net{lyapnet::load_checkpoint(path)};
    });
}

lyn_status lyn_net_load_string(const char* text, lyn_net** out) {
    return guarded([&] {
        require_arg(text != nullptr && out != nullptr, "text and out must not be NULL");
        *out = new lyn_net{lyapnet::deserialize_checkpoint(text)};
    });
}

lyn_status lyn_net_save_file(const lyn_net* net, const char* path) {
    return guarded([&] {
        require_arg(net != nullptr && path != nullptr, "net and path must not be NULL");
        lyapnet::save_checkpoint(net->net, path);
    });
}

lyn_status lyn_net_serialize(const lyn_net* net, char** text_out) {
    return guarded([&] {
        require_arg(net != nullptr && text_out != nullptr, "net and text_out must not be NULL");
        *text_out = copy_string(lyapnet::serialize_checkpoint(net->net));
    });
}

void lyn_net_free(lyn_net* net) { delete net; }

int32_t lyn_net_input_dim(const lyn_net* net) { return net != nullptr ? net->net.shape().n : 0; }

int64_t lyn_net_param_count(const lyn_net* net) {
    return net != nullptr ? static_cast<int64_t>(net->net.param_count()) : 0;
}

lyn_status lyn_net_value(const lyn_net* net, const double* x, double* w_out) {
    return guarded([&] {
        require_arg(net != nullptr && x != nullptr && w_out != nullptr,
                    "net, x, and w_out must not be NULL");
        const std::size_t n = static_cast<std::size_t>(net->net.shape().n);
        *w_out = net->net.forward({x, n});
    });
}

lyn_status lyn_net_gradient(const lyn_net* net, const double* x, double* grad_out) {
    return guarded([&] {
        require_arg(net != nullptr && x != nullptr && grad_out != nullptr,
                    "net, x, and grad_out must not be NULL");
        const std::size_t n = static_cast<std::size_t>(net->net.shape().n);
        lyapnet::LyapunovNet::Workspace ws;
        net->net.grad_x({x, n}, {grad_out, n}, ws);
    });
}

lyn_status lyn_train(const lyn_config* cfg, lyn_train_callback cb, void* user, lyn_net** net_out,
                     int32_t* converged_out, char** report_json_out) {
    return guarded([&] {
        require_arg(cfg != nullptr && net_out != nullptr, "cfg and net_out must not be NULL");
        const lyapnet::RunConfig& rc = cfg->cfg;
        lyapnet::VectorField field = rc.make_field();
        lyapnet::EpochCallback on_epoch;
        if (cb != nullptr) {
            on_epoch = [cb, user](std::size_t epoch, const lyapnet::BatchStats& errs) {
                cb(static_cast<int32_t>(epoch), errs.mean, errs.max, user);
            };
        }
        auto [net, report] = lyapnet::train(rc.train, rc.net, field, rc.loss, on_epoch);
        report.checkpoint_path = rc.checkpoint_path;
        if (converged_out != nullptr) *converged_out = report.converged ? 1 : 0;
        if (report_json_out != nullptr) {
            *report_json_out = copy_string(lyapnet::make_run_report_json(rc, report));
        }
        *net_out = new lyn_net{std::move(net)};
    });
}

lyn_status lyn_verify(const lyn_net* net, const lyn_config* cfg, int64_t samples, double r0,
                      uint64_t seed, lyn_verify_summary* summary_out, char** report_json_out) {
    return guarded([&] {
        require_arg(net != nullptr && cfg != nullptr, "net and cfg must not be NULL");
        require_arg(samples > 0, "samples must be positive");
        const lyapnet::RunConfig& rc = cfg->cfg;
        if (net->net.shape().n != config_dim(rc)) {
            lyapnet::raise(lyapnet::ErrorCode::shape_mismatch,
                           "checkpoint dimension " + std::to_string(net->net.shape().n) +
                               " does not match system dimension " + std::to_string(config_dim(rc)));
        }
        lyapnet::VectorField field = rc.make_field();
        const std::vector<double> points = lyapnet::sample_dataset(
            config_dim(rc), static_cast<std::size_t>(samples), seed);
        const lyapnet::VerifyReport report = lyapnet::verify_samples(
            net->net, field, rc.loss, lyapnet::PointsView(points, config_dim(rc)), r0);
        if (summary_out != nullptr) {
            summary_out->points_checked = static_cast<int64_t>(report.points_checked);
            summary_out->bound_violations = static_cast<int64_t>(report.bounds.count);
            summary_out->residual_violations = static_cast<int64_t>(report.residual.count);
            summary_out->worst_bound_margin = report.bounds.worst.value_or(NAN);
            summary_out->worst_residual = report.residual.worst.value_or(NAN);
            summary_out->err1 = report.err1;
            summary_out->err_inf = report.err_inf;
        }
        if (report_json_out != nullptr) {
            *report_json_out = copy_string(lyapnet::make_verify_report_json(rc, report, seed));
        }
    });
}

lyn_status lyn_simulate(const lyn_net* net, const lyn_config* cfg, const double* x0, int32_t n,
                        double t_end, double dt, double slack, lyn_simulate_summary* summary_out,
                        char** csv_out) {
    return guarded([&] {
        require_arg(net != nullptr && cfg != nullptr && x0 != nullptr,
                    "net, cfg, and x0 must not be NULL");
        const lyapnet::RunConfig& rc = cfg->cfg;
        if (net->net.shape().n != config_dim(rc)) {
            lyapnet::raise(lyapnet::ErrorCode::shape_mismatch,
                           "checkpoint dimension does not match system dimension");
        }
        if (n != config_dim(rc)) {
            lyapnet::raise(lyapnet::ErrorCode::shape_mismatch,
                           "initial state length " + std::to_string(n) +
                               " does not match system dimension " + std::to_string(config_dim(rc)));
        }
        lyapnet::VectorField field = rc.make_field();
        const lyapnet::Trajectory traj = lyapnet::integrate(
            field, {x0, static_cast<std::size_t>(n)}, t_end, dt, &net->net);
        const lyapnet::DecreaseCheck check = lyapnet::check_decrease(traj, slack);
        if (summary_out != nullptr) {
            summary_out->monotone = check.monotone ? 1 : 0;
            summary_out->first_violation =
                check.first_violation ? static_cast<int64_t>(*check.first_violation) : -1;
            summary_out->samples = static_cast<int64_t>(traj.size());
            summary_out->w_initial = traj.w_values.front();
            summary_out->w_final = traj.w_values.back();
        }
        if (csv_out != nullptr) {
            *csv_out = copy_string(lyapnet::trajectory_csv(traj));
        }
    });
}

lyn_status lyn_export_slice(const lyn_net* net, const lyn_config* cfg, int32_t axis_i,
                            int32_t axis_j, double half_width, int32_t resolution,
                            char** csv_out) {
    return guarded([&] {
        require_arg(net != nullptr && cfg != nullptr && csv_out != nullptr,
                    "net, cfg, and csv_out must not be NULL");
        const lyapnet::RunConfig& rc = cfg->cfg;
        if (net->net.shape().n != config_dim(rc)) {
            lyapnet::raise(lyapnet::ErrorCode::shape_mismatch,
                           "checkpoint dimension does not match system dimension");
        }
        lyapnet::VectorField field = rc.make_field();
        *csv_out = copy_string(
            lyapnet::export_slice(net->net, field, axis_i - 1, axis_j - 1, half_width, resolution));
    });
}

}  // extern "C"
