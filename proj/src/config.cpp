#include "config.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "error.hpp"

namespace lyapnet {

namespace {

using nlohmann::json;

[[noreturn]] void schema_fail(const std::string& path, const std::string& what) {
    raise(ErrorCode::schema, "config error at " + path + ": " + what);
}

void reject_unknown(const json& obj, const std::string& path,
                    std::initializer_list<const char*> allowed) {
    for (const auto& [key, value] : obj.items()) {
        bool known = false;
        for (const char* k : allowed) {
            if (key == k) {
                known = true;
                break;
            }
        }
        if (!known) schema_fail(path, "unknown field \"" + key + "\"");
    }
}

const json& require(const json& obj, const std::string& path, const char* key) {
    if (!obj.contains(key)) schema_fail(path + "." + key, "missing required field");
    return obj[key];
}

double get_number(const json& v, const std::string& path) {
    if (!v.is_number()) schema_fail(path, "expected a number");
    return v.get<double>();
}

std::int64_t get_integer(const json& v, const std::string& path) {
    if (!v.is_number_integer()) schema_fail(path, "expected an integer");
    return v.get<std::int64_t>();
}

std::string get_string(const json& v, const std::string& path) {
    if (!v.is_string()) schema_fail(path, "expected a string");
    return v.get<std::string>();
}

SystemConfig parse_system(const json& sys) {
    SystemConfig out;
    if (!sys.is_object()) schema_fail("system", "expected an object");
    if (sys.contains("builtin")) {
        reject_unknown(sys, "system", {"builtin"});
        out.builtin = get_string(sys["builtin"], "system.builtin");
        return out;
    }
    reject_unknown(sys, "system", {"n", "expressions", "transform"});
    out.n = static_cast<int>(get_integer(require(sys, "system", "n"), "system.n"));
    if (out.n < 1) schema_fail("system.n", "dimension must be at least 1");
    const json& exprs = require(sys, "system", "expressions");
    if (!exprs.is_array()) schema_fail("system.expressions", "expected an array of strings");
    for (std::size_t i = 0; i < exprs.size(); ++i) {
        out.expressions.push_back(
            get_string(exprs[i], "system.expressions[" + std::to_string(i) + "]"));
    }
    if (sys.contains("transform")) {
        const json& t = sys["transform"];
        if (!t.is_array()) schema_fail("system.transform", "expected an array (rows)");
        std::vector<double> entries;
        for (std::size_t r = 0; r < t.size(); ++r) {
            const json& row = t[r];
            if (!row.is_array()) {
                schema_fail("system.transform[" + std::to_string(r) + "]", "expected an array");
            }
            for (std::size_t c = 0; c < row.size(); ++c) {
                entries.push_back(get_number(row[c], "system.transform[" + std::to_string(r) +
                                                          "][" + std::to_string(c) + "]"));
            }
            if (row.size() != static_cast<std::size_t>(out.n)) {
                schema_fail("system.transform[" + std::to_string(r) + "]",
                            "expected " + std::to_string(out.n) + " entries");
            }
        }
        if (t.size() != static_cast<std::size_t>(out.n)) {
            schema_fail("system.transform", "expected " + std::to_string(out.n) + " rows");
        }
        out.transform = std::move(entries);
    }
    return out;
}

}  // namespace

RunConfig RunConfig::parse_string(const std::string& text) {
    json doc = json::parse(text, nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) {
        raise(ErrorCode::schema, "config error: document is not a JSON object");
    }
    reject_unknown(doc, "(top level)", {"system", "net", "loss", "train", "outputs"});

    RunConfig cfg;
    cfg.system = parse_system(require(doc, "(top level)", "system"));
    const int dim = cfg.system.builtin
                        ? (*cfg.system.builtin == "example_10d" ? 10
                           : *cfg.system.builtin == "example_2d" ? 2
                                                                 : 0)
                        : cfg.system.n;

    const json& net = require(doc, "(top level)", "net");
    if (!net.is_object()) schema_fail("net", "expected an object");
    reject_unknown(net, "net", {"n_sub", "d_max", "m_per"});
    cfg.net.n_sub = static_cast<int>(get_integer(require(net, "net", "n_sub"), "net.n_sub"));
    cfg.net.d_max = static_cast<int>(get_integer(require(net, "net", "d_max"), "net.d_max"));
    cfg.net.m_per = static_cast<int>(get_integer(require(net, "net", "m_per"), "net.m_per"));
    cfg.net.n = dim;

    const json& loss = require(doc, "(top level)", "loss");
    if (!loss.is_object()) schema_fail("loss", "expected an object");
    reject_unknown(loss, "loss", {"kind", "nu", "c1", "c2", "power"});
    const std::string kind = get_string(require(loss, "loss", "kind"), "loss.kind");
    if (kind == "pde") {
        cfg.loss.kind = LossKind::pde;
    } else if (kind == "pdi") {
        cfg.loss.kind = LossKind::pdi;
    } else {
        schema_fail("loss.kind", "expected \"pde\" or \"pdi\", got \"" + kind + "\"");
    }
    cfg.loss.nu = loss.contains("nu") ? get_number(loss["nu"], "loss.nu") : 1.0;
    cfg.loss.bounds.c1 = get_number(require(loss, "loss", "c1"), "loss.c1");
    cfg.loss.bounds.c2 = get_number(require(loss, "loss", "c2"), "loss.c2");
    cfg.loss.bounds.power = loss.contains("power") ? get_number(loss["power"], "loss.power") : 2.0;

    const json& train = require(doc, "(top level)", "train");
    if (!train.is_object()) schema_fail("train", "expected an object");
    reject_unknown(train, "train", {"m", "batch_size", "max_epochs", "tol", "seed"});
    const std::int64_t m = get_integer(require(train, "train", "m"), "train.m");
    if (m < 1) schema_fail("train.m", "must be at least 1");
    cfg.train.m = static_cast<std::size_t>(m);
    if (train.contains("batch_size")) {
        const std::int64_t bs = get_integer(train["batch_size"], "train.batch_size");
        if (bs < 1) schema_fail("train.batch_size", "must be at least 1");
        cfg.train.batch_size = static_cast<std::size_t>(bs);
    }
    const std::int64_t epochs = get_integer(require(train, "train", "max_epochs"), "train.max_epochs");
    if (epochs < 0) schema_fail("train.max_epochs", "must be nonnegative");
    cfg.train.max_epochs = static_cast<std::size_t>(epochs);
    if (train.contains("tol")) cfg.train.tol = get_number(train["tol"], "train.tol");
    const json& seed = require(train, "train", "seed");
    if (!seed.is_number_integer() && !seed.is_number_unsigned()) {
        schema_fail("train.seed", "expected an integer");
    }
    cfg.train.seed = seed.get<std::uint64_t>();

    const json& outputs = require(doc, "(top level)", "outputs");
    if (!outputs.is_object()) schema_fail("outputs", "expected an object");
    reject_unknown(outputs, "outputs", {"checkpoint", "report"});
    cfg.checkpoint_path = get_string(require(outputs, "outputs", "checkpoint"), "outputs.checkpoint");
    cfg.report_path = get_string(require(outputs, "outputs", "report"), "outputs.report");

    // Fail fast on semantic problems before any computation.
    if (cfg.system.builtin) {
        if (dim == 0) {
            schema_fail("system.builtin", "unknown built-in system \"" + *cfg.system.builtin + "\"");
        }
    } else if (cfg.system.expressions.size() != static_cast<std::size_t>(cfg.system.n)) {
        schema_fail("system.expressions", "expected " + std::to_string(cfg.system.n) +
                                              " entries, got " +
                                              std::to_string(cfg.system.expressions.size()));
    }
    validate_shape(cfg.net);
    cfg.loss.validate();
    cfg.train.validate();
    return cfg;
}

RunConfig RunConfig::parse_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) raise(ErrorCode::io, "cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_string(buf.str());
}

VectorField RunConfig::make_field() const {
    if (system.builtin) return VectorField::builtin(*system.builtin);
    std::string source;
    for (std::size_t i = 0; i < system.expressions.size(); ++i) {
        if (i > 0) source += ";\n";
        source += system.expressions[i];
    }
    VectorField vf = VectorField::from_source(source, system.n, "config");
    if (system.transform) {
        vf.attach_transform(Matrix(static_cast<std::size_t>(system.n),
                                   static_cast<std::size_t>(system.n), *system.transform));
    }
    return vf;
}

namespace {

json config_echo(const RunConfig& cfg) {
    json sys;
    if (cfg.system.builtin) {
        sys["builtin"] = *cfg.system.builtin;
    } else {
        sys["n"] = cfg.system.n;
        sys["expressions"] = cfg.system.expressions;
        if (cfg.system.transform) {
            json rows = json::array();
            for (int r = 0; r < cfg.system.n; ++r) {
                json row = json::array();
                for (int c = 0; c < cfg.system.n; ++c) {
                    row.push_back(
                        (*cfg.system.transform)[static_cast<std::size_t>(r * cfg.system.n + c)]);
                }
                rows.push_back(std::move(row));
            }
            sys["transform"] = std::move(rows);
        }
    }
    json doc;
    doc["system"] = std::move(sys);
    doc["net"] = {{"n_sub", cfg.net.n_sub}, {"d_max", cfg.net.d_max}, {"m_per", cfg.net.m_per}};
    doc["loss"] = {{"kind", cfg.loss.kind == LossKind::pde ? "pde" : "pdi"},
                   {"nu", cfg.loss.nu},
                   {"c1", cfg.loss.bounds.c1},
                   {"c2", cfg.loss.bounds.c2},
                   {"power", cfg.loss.bounds.power}};
    doc["train"] = {{"m", cfg.train.m},
                    {"batch_size", cfg.train.batch_size},
                    {"max_epochs", cfg.train.max_epochs},
                    {"tol", cfg.train.tol},
                    {"seed", cfg.train.seed}};
    doc["outputs"] = {{"checkpoint", cfg.checkpoint_path}, {"report", cfg.report_path}};
    return doc;
}

}  // namespace

std::string RunConfig::echo_json() const { return config_echo(*this).dump(2) + "\n"; }

std::string make_run_report_json(const RunConfig& cfg, const TrainReport& report) {
    json doc;
    doc["config"] = config_echo(cfg);
    doc["converged"] = report.converged;
    doc["epochs_run"] = report.epochs_run;
    json history = json::array();
    for (const BatchStats& h : report.history) {
        history.push_back(json::array({h.mean, h.max}));
    }
    doc["history"] = std::move(history);
    doc["checkpoint"] = report.checkpoint_path;
    doc["wall_time_seconds"] = report.wall_time_seconds;
    return doc.dump(2) + "\n";
}

namespace {

json violation_json(const ViolationStats& v) {
    json doc;
    doc["count"] = v.count;
    if (v.worst) {
        doc["worst"] = *v.worst;
        doc["witness"] = v.witness;
    } else {
        doc["worst"] = nullptr;
        doc["witness"] = nullptr;
    }
    return doc;
}

}  // namespace

std::string make_verify_report_json(const RunConfig& cfg, const VerifyReport& report,
                                    std::uint64_t seed) {
    json doc;
    doc["config"] = config_echo(cfg);
    doc["seed"] = seed;
    doc["points_checked"] = report.points_checked;
    doc["exclusion_radius"] = report.exclusion_radius;
    doc["bound_violations"] = violation_json(report.bounds);
    doc["residual_violations"] = violation_json(report.residual);
    doc["err1"] = report.err1;
    doc["err_inf"] = report.err_inf;
    return doc.dump(2) + "\n";
}

}  // namespace lyapnet
