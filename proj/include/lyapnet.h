/*
 * lyapnet - training and verification of neural Lyapunov function
 * candidates for nonlinear ODE systems.
 *
 * C API of the shared library. All functions return LYN_OK (0) on success
 * or a nonzero status; lyn_last_error() describes the most recent failure
 * on the calling thread. Objects are opaque handles released with the
 * matching *_free function. Strings returned through char** out-parameters
 * are heap-allocated and must be released with lyn_string_free().
 */

#ifndef LYAPNET_H
#define LYAPNET_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define LYN_API __declspec(dllexport)
#else
#define LYN_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef int32_t lyn_status;

enum {
    LYN_OK = 0,
    LYN_E_INVALID_ARGUMENT = 1,
    LYN_E_PARSE = 2,
    LYN_E_UNKNOWN_VARIABLE = 3,
    LYN_E_ARITY = 4,
    LYN_E_UNKNOWN_SYSTEM = 5,
    LYN_E_NON_FINITE = 6,
    LYN_E_SINGULAR_MATRIX = 7,
    LYN_E_SCHEMA = 8,
    LYN_E_SHAPE_MISMATCH = 9,
    LYN_E_IO = 10,
    LYN_E_INTERNAL = 11
};

typedef struct lyn_config lyn_config;  /* parsed run configuration */
typedef struct lyn_field lyn_field;    /* vector field f: R^n -> R^n */
typedef struct lyn_net lyn_net;        /* Lyapunov candidate W(x; theta) */

/* Message for the last failed call on this thread (never NULL). */
LYN_API const char* lyn_last_error(void);
LYN_API const char* lyn_status_name(lyn_status status);
LYN_API void lyn_string_free(char* text);

/* ---- configuration ----------------------------------------------------- */

LYN_API lyn_status lyn_config_load_file(const char* path, lyn_config** out);
LYN_API lyn_status lyn_config_load_string(const char* text, lyn_config** out);
LYN_API void lyn_config_free(lyn_config* cfg);

/* Replaces train.seed (command-line override). */
LYN_API lyn_status lyn_config_set_seed(lyn_config* cfg, uint64_t seed);

LYN_API lyn_status lyn_config_dim(const lyn_config* cfg, int32_t* out);
LYN_API lyn_status lyn_config_param_count(const lyn_config* cfg, int64_t* out);
LYN_API lyn_status lyn_config_seed(const lyn_config* cfg, uint64_t* out);
LYN_API lyn_status lyn_config_checkpoint_path(const lyn_config* cfg, char** out);
LYN_API lyn_status lyn_config_report_path(const lyn_config* cfg, char** out);

/* Normalized configuration (defaults materialized), as JSON text. */
LYN_API lyn_status lyn_config_echo(const lyn_config* cfg, char** json_out);

/* Non-fatal configuration advice, one warning per line; empty when clean. */
LYN_API lyn_status lyn_config_warnings(const lyn_config* cfg, char** text_out);

/* ---- vector fields ------------------------------------------------------ */

/* name is one of "example_2d", "example_10d". */
LYN_API lyn_status lyn_field_builtin(const char* name, lyn_field** out);

/* source holds n expressions over x1..xn separated by ';' or newlines. */
LYN_API lyn_status lyn_field_parse(const char* source, int32_t n, lyn_field** out);

LYN_API lyn_status lyn_field_from_config(const lyn_config* cfg, lyn_field** out);
LYN_API void lyn_field_free(lyn_field* field);
LYN_API int32_t lyn_field_dim(const lyn_field* field);

/* fx must hold lyn_field_dim(field) doubles. */
LYN_API lyn_status lyn_field_eval(const lyn_field* field, const double* x, double* fx);

/* ---- networks ----------------------------------------------------------- */

LYN_API lyn_status lyn_net_load_file(const char* path, lyn_net** out);
LYN_API lyn_status lyn_net_load_string(const char* text, lyn_net** out);
LYN_API lyn_status lyn_net_save_file(const lyn_net* net, const char* path);
LYN_API lyn_status lyn_net_serialize(const lyn_net* net, char** text_out);
LYN_API void lyn_net_free(lyn_net* net);
LYN_API int32_t lyn_net_input_dim(const lyn_net* net);
LYN_API int64_t lyn_net_param_count(const lyn_net* net);

/* W(x) and its gradient in x; buffers sized to the input dimension. */
LYN_API lyn_status lyn_net_value(const lyn_net* net, const double* x, double* w_out);
LYN_API lyn_status lyn_net_gradient(const lyn_net* net, const double* x, double* grad_out);

/* ---- training ----------------------------------------------------------- */

/* Called after every epoch with the mean and max pointwise loss. */
typedef void (*lyn_train_callback)(int32_t epoch, double err1, double err_inf, void* user);

/*
 * Runs the configured training. On success *net_out holds the trained
 * network, *converged_out is 1 when both error metrics fell below the
 * configured tolerance, and *report_json_out carries the run report
 * (config echo, per-epoch history, convergence flag, wall time). Outputs
 * are not written to disk by this call. cb and user may be NULL.
 */
LYN_API lyn_status lyn_train(const lyn_config* cfg, lyn_train_callback cb, void* user,
                             lyn_net** net_out, int32_t* converged_out, char** report_json_out);

/* ---- verification -------------------------------------------------------- */

typedef struct lyn_verify_summary {
    int64_t points_checked;
    int64_t bound_violations;    /* W outside [alpha1(|x|), alpha2(|x|)] */
    int64_t residual_violations; /* DW.f + |x|^2 > 0 with |x| >= r0 */
    double worst_bound_margin;   /* NaN when no points were checked */
    double worst_residual;       /* NaN when all points lie inside r0 */
    double err1;
    double err_inf;
} lyn_verify_summary;

/*
 * Samples `samples` fresh uniform points on [-1,1]^n with the given seed and
 * checks the trained candidate. The JSON report includes witness points.
 */
LYN_API lyn_status lyn_verify(const lyn_net* net, const lyn_config* cfg, int64_t samples,
                              double r0, uint64_t seed, lyn_verify_summary* summary_out,
                              char** report_json_out);

/* ---- trajectory simulation ----------------------------------------------- */

typedef struct lyn_simulate_summary {
    int32_t monotone;        /* 1 when W decreases (up to slack) along the path */
    int64_t first_violation; /* step index of the first increase, -1 if none */
    int64_t samples;         /* number of stored (t, W) rows */
    double w_initial;
    double w_final;
} lyn_simulate_summary;

/*
 * Integrates x' = f(x) from x0 (length n) with fixed-step RK4 over [0, t_end]
 * and records W along the way. *csv_out receives "t,W" rows.
 */
LYN_API lyn_status lyn_simulate(const lyn_net* net, const lyn_config* cfg, const double* x0,
                                int32_t n, double t_end, double dt, double slack,
                                lyn_simulate_summary* summary_out, char** csv_out);

/* ---- surface slices ------------------------------------------------------- */

/*
 * CSV grid of (xi, xj, W, DW.f) on the plane of two state coordinates
 * (1-based indices), all other coordinates zero.
 */
LYN_API lyn_status lyn_export_slice(const lyn_net* net, const lyn_config* cfg, int32_t axis_i,
                                    int32_t axis_j, double half_width, int32_t resolution,
                                    char** csv_out);

#ifdef __cplusplus
}
#endif

#endif /* LYAPNET_H */
