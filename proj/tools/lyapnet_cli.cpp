// Command-line front end for the lyapnet shared library. Talks to the core
// exclusively through the C API in lyapnet.h.
//
// Exit codes: 0 success, 1 usage/config/IO error, 2 training did not
// converge, 3 verification or decrease violations.

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lyapnet.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitNotConverged = 2;
constexpr int kExitViolations = 3;

struct ConfigDeleter {
    void operator()(lyn_config* p) const { lyn_config_free(p); }
};
struct NetDeleter {
    void operator()(lyn_net* p) const { lyn_net_free(p); }
};
using ConfigPtr = std::unique_ptr<lyn_config, ConfigDeleter>;
using NetPtr = std::unique_ptr<lyn_net, NetDeleter>;

std::string take_string(char* s) {
    std::string out = s != nullptr ? s : "";
    lyn_string_free(s);
    return out;
}

[[noreturn]] void fail(lyn_status status) {
    std::cerr << "error (" << lyn_status_name(status) << "): " << lyn_last_error() << "\n";
    std::exit(kExitUsage);
}

void check(lyn_status status) {
    if (status != LYN_OK) fail(status);
}

ConfigPtr load_config(const std::string& path, const std::optional<std::uint64_t>& seed_override) {
    lyn_config* raw = nullptr;
    check(lyn_config_load_file(path.c_str(), &raw));
    ConfigPtr cfg(raw);
    if (seed_override) check(lyn_config_set_seed(cfg.get(), *seed_override));
    char* warnings = nullptr;
    check(lyn_config_warnings(cfg.get(), &warnings));
    const std::string warn_text = take_string(warnings);
    if (!warn_text.empty()) std::cerr << "warning: " << warn_text;
    return cfg;
}

NetPtr load_net(const std::string& path) {
    lyn_net* raw = nullptr;
    check(lyn_net_load_file(path.c_str(), &raw));
    return NetPtr(raw);
}

void write_file(const std::string& path, const std::string& content) {
    const std::filesystem::path p(path);
    if (p.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(p.parent_path(), ec);
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        std::cerr << "error: cannot open " << path << " for writing\n";
        std::exit(kExitUsage);
    }
    out << content;
    if (!out) {
        std::cerr << "error: failed writing " << path << "\n";
        std::exit(kExitUsage);
    }
}

void epoch_progress(int32_t epoch, double err1, double err_inf, void* /*user*/) {
    std::fprintf(stderr, "epoch %d: err1=%.9e err_inf=%.9e\n", epoch, err1, err_inf);
}

std::vector<double> parse_initial_state(const std::string& text) {
    std::vector<double> values;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            values.push_back(std::stod(item, &used));
            while (used < item.size() && std::isspace(static_cast<unsigned char>(item[used]))) ++used;
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            std::cerr << "error: cannot parse initial state entry '" << item << "'\n";
            std::exit(kExitUsage);
        }
    }
    if (values.empty()) {
        std::cerr << "error: --x0 must contain comma-separated numbers\n";
        std::exit(kExitUsage);
    }
    return values;
}

int cmd_train(const std::string& config_path, const std::optional<std::uint64_t>& seed_override) {
    ConfigPtr cfg = load_config(config_path, seed_override);

    lyn_net* net_raw = nullptr;
    int32_t converged = 0;
    char* report_raw = nullptr;
    check(lyn_train(cfg.get(), epoch_progress, nullptr, &net_raw, &converged, &report_raw));
    NetPtr net(net_raw);
    const std::string report = take_string(report_raw);

    char* ckpt_raw = nullptr;
    check(lyn_config_checkpoint_path(cfg.get(), &ckpt_raw));
    const std::string ckpt_path = take_string(ckpt_raw);
    char* report_path_raw = nullptr;
    check(lyn_config_report_path(cfg.get(), &report_path_raw));
    const std::string report_path = take_string(report_path_raw);

    const std::filesystem::path cp(ckpt_path);
    if (cp.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(cp.parent_path(), ec);
    }
    check(lyn_net_save_file(net.get(), ckpt_path.c_str()));
    write_file(report_path, report);

    std::cerr << (converged != 0 ? "converged" : "did not converge within max_epochs")
              << "; checkpoint: " << ckpt_path << ", report: " << report_path << "\n";
    return converged != 0 ? kExitOk : kExitNotConverged;
}

int cmd_params(const std::string& config_path) {
    ConfigPtr cfg = load_config(config_path, std::nullopt);
    int64_t count = 0;
    check(lyn_config_param_count(cfg.get(), &count));
    std::cout << count << "\n";
    return kExitOk;
}

int cmd_verify(const std::string& config_path, const std::string& checkpoint_path,
               std::int64_t samples, double r0, const std::optional<std::uint64_t>& seed_override,
               const std::string& report_out) {
    ConfigPtr cfg = load_config(config_path, std::nullopt);
    NetPtr net = load_net(checkpoint_path);

    std::uint64_t seed = 0;
    if (seed_override) {
        seed = *seed_override;
    } else {
        // fresh-sample default: offset from the training seed so the check
        // never reuses the training set
        check(lyn_config_seed(cfg.get(), &seed));
        seed += 1;
    }

    lyn_verify_summary summary{};
    char* report_raw = nullptr;
    check(lyn_verify(net.get(), cfg.get(), samples, r0, seed, &summary, &report_raw));
    const std::string report = take_string(report_raw);

    std::cout << report;
    if (!report_out.empty()) write_file(report_out, report);

    std::fprintf(stderr,
                 "checked %lld points (seed %llu, r0=%g): %lld bound violations, "
                 "%lld residual violations, err1=%.9e err_inf=%.9e\n",
                 static_cast<long long>(summary.points_checked),
                 static_cast<unsigned long long>(seed), r0,
                 static_cast<long long>(summary.bound_violations),
                 static_cast<long long>(summary.residual_violations), summary.err1,
                 summary.err_inf);
    return (summary.bound_violations == 0 && summary.residual_violations == 0) ? kExitOk
                                                                               : kExitViolations;
}

int cmd_simulate(const std::string& config_path, const std::string& checkpoint_path,
                 const std::vector<std::string>& x0_texts, double t_end, double dt, double slack,
                 const std::string& out_prefix) {
    ConfigPtr cfg = load_config(config_path, std::nullopt);
    NetPtr net = load_net(checkpoint_path);

    bool all_monotone = true;
    for (std::size_t i = 0; i < x0_texts.size(); ++i) {
        const std::vector<double> x0 = parse_initial_state(x0_texts[i]);
        lyn_simulate_summary summary{};
        char* csv_raw = nullptr;
        check(lyn_simulate(net.get(), cfg.get(), x0.data(), static_cast<int32_t>(x0.size()), t_end,
                           dt, slack, &summary, &csv_raw));
        const std::string csv = take_string(csv_raw);
        const std::string path = out_prefix + "_" + std::to_string(i) + ".csv";
        write_file(path, csv);
        if (summary.monotone != 0) {
            std::fprintf(stderr, "trajectory %zu: monotone decrease, W %.9e -> %.9e (%s)\n", i,
                         summary.w_initial, summary.w_final, path.c_str());
        } else {
            all_monotone = false;
            std::fprintf(stderr, "trajectory %zu: W increases at step %lld (%s)\n", i,
                         static_cast<long long>(summary.first_violation), path.c_str());
        }
    }
    return all_monotone ? kExitOk : kExitViolations;
}

int cmd_slice(const std::string& config_path, const std::string& checkpoint_path, int axis_i,
              int axis_j, double half_width, int resolution, const std::string& out_path) {
    ConfigPtr cfg = load_config(config_path, std::nullopt);
    NetPtr net = load_net(checkpoint_path);

    char* csv_raw = nullptr;
    check(lyn_export_slice(net.get(), cfg.get(), axis_i, axis_j, half_width, resolution, &csv_raw));
    const std::string csv = take_string(csv_raw);
    if (out_path.empty()) {
        std::cout << csv;
    } else {
        write_file(out_path, csv);
        std::cerr << "slice written to " << out_path << "\n";
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"train, verify, and inspect neural Lyapunov function candidates"};
    app.require_subcommand(1);

    std::string config_path;
    std::string checkpoint_path;
    std::optional<std::uint64_t> seed_override;

    auto* train = app.add_subcommand("train", "train a candidate from a run configuration");
    train->add_option("--config", config_path, "run configuration (JSON)")->required();
    train->add_option("--seed-override", seed_override, "replace train.seed from the config");

    auto* params = app.add_subcommand("params", "print the trainable parameter count");
    params->add_option("--config", config_path, "run configuration (JSON)")->required();

    std::int64_t samples = 100000;
    double r0 = 0.05;
    std::string report_out;
    auto* verify = app.add_subcommand("verify", "check a checkpoint on fresh uniform samples");
    verify->add_option("--config", config_path, "run configuration (JSON)")->required();
    verify->add_option("--checkpoint", checkpoint_path, "checkpoint file")->required();
    verify->add_option("--samples", samples, "number of fresh samples");
    verify->add_option("--r0", r0, "radius around the origin excluded from the residual check");
    verify->add_option("--seed-override", seed_override,
                       "sampling seed (default: config train.seed + 1)");
    verify->add_option("--report", report_out, "also write the JSON report to this file");

    std::vector<std::string> x0_texts;
    double t_end = 10.0;
    double dt = 1e-3;
    double slack = 1e-9;
    std::string out_prefix = "trajectory";
    auto* simulate = app.add_subcommand("simulate", "integrate trajectories and track W");
    simulate->add_option("--config", config_path, "run configuration (JSON)")->required();
    simulate->add_option("--checkpoint", checkpoint_path, "checkpoint file")->required();
    simulate->add_option("--x0", x0_texts, "initial state, comma-separated (repeatable)")
        ->required();
    simulate->add_option("--t-end", t_end, "integration horizon");
    simulate->add_option("--dt", dt, "integration step");
    simulate->add_option("--slack", slack, "allowed per-step increase of W");
    simulate->add_option("--out-prefix", out_prefix, "per-trajectory CSV path prefix");

    int axis_i = 1;
    int axis_j = 2;
    double half_width = 1.0;
    int resolution = 101;
    std::string slice_out;
    auto* slice = app.add_subcommand("slice", "export W and DW.f on a coordinate plane");
    slice->add_option("--config", config_path, "run configuration (JSON)")->required();
    slice->add_option("--checkpoint", checkpoint_path, "checkpoint file")->required();
    slice->add_option("--axis-i", axis_i, "first coordinate (1-based)")->required();
    slice->add_option("--axis-j", axis_j, "second coordinate (1-based)")->required();
    slice->add_option("--half-width", half_width, "plane half width");
    slice->add_option("--resolution", resolution, "grid points per axis");
    slice->add_option("--out", slice_out, "output CSV path (default: stdout)");

    CLI11_PARSE(app, argc, argv);

    if (train->parsed()) return cmd_train(config_path, seed_override);
    if (params->parsed()) return cmd_params(config_path);
    if (verify->parsed()) {
        return cmd_verify(config_path, checkpoint_path, samples, r0, seed_override, report_out);
    }
    if (simulate->parsed()) {
        return cmd_simulate(config_path, checkpoint_path, x0_texts, t_end, dt, slack, out_prefix);
    }
    if (slice->parsed()) {
        return cmd_slice(config_path, checkpoint_path, axis_i, axis_j, half_width, resolution,
                         slice_out);
    }
    return kExitUsage;
}
