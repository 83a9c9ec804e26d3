#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "field.hpp"
#include "loss.hpp"
#include "net.hpp"
#include "train.hpp"
#include "verify.hpp"

namespace lyapnet {

struct SystemConfig {
    std::optional<std::string> builtin;        // either a built-in name ...
    int n = 0;                                 // ... or dimension + expressions
    std::vector<std::string> expressions;
    std::optional<std::vector<double>> transform;  // row-major n*n
};

// Parsed run configuration. The JSON schema is strict: unknown fields are
// rejected and every diagnostic names the offending field.
struct RunConfig {
    SystemConfig system;
    NetShape net;  // net.n is derived from the system dimension
    LossSpec loss;
    TrainConfig train;
    std::string checkpoint_path;
    std::string report_path;

    static RunConfig parse_string(const std::string& text);
    static RunConfig parse_file(const std::string& path);

    [[nodiscard]] VectorField make_field() const;

    // Normalized form: defaults materialized, keys sorted.
    [[nodiscard]] std::string echo_json() const;
};

// Machine-readable documents written by the CLI. wall_time_seconds is the
// only run-dependent field in the train report.
std::string make_run_report_json(const RunConfig& cfg, const TrainReport& report);
std::string make_verify_report_json(const RunConfig& cfg, const VerifyReport& report,
                                    std::uint64_t seed);

}  // namespace lyapnet
