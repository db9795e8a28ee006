#ifndef ZXPERC_H
#define ZXPERC_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Initial state for entropy calculations.
 */
typedef enum ZxpInitialState {
  ZXP_INITIAL_STATE_BELL_PAIRS = 0,
  ZXP_INITIAL_STATE_PRODUCT = 1,
} ZxpInitialState;

/**
 * Rewrite order of the simplifier.
 */
typedef enum ZxpSchedule {
  ZXP_SCHEDULE_SWEEP = 0,
  ZXP_SCHEDULE_PARALLEL = 1,
} ZxpSchedule;

/**
 * Result of every fallible call.
 */
typedef enum ZxpStatus {
  ZXP_STATUS_OK = 0,
  ZXP_STATUS_NULL_POINTER = 1,
  ZXP_STATUS_INVALID_ARGUMENT = 2,
  ZXP_STATUS_PARSE = 3,
  ZXP_STATUS_CONFIG = 4,
  ZXP_STATUS_IO = 5,
  ZXP_STATUS_RUNTIME = 6,
  ZXP_STATUS_PANIC = 7,
} ZxpStatus;

/**
 * A sampled brickwork circuit.
 */
typedef struct ZxpCircuit ZxpCircuit;

/**
 * A ZX diagram.
 */
typedef struct ZxpDiagram ZxpDiagram;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message describing the last failure on this thread; empty after a
 * successful call. Valid until the next call into the library.
 */
const char *zxp_last_error(void);

/**
 * Library version as a static string.
 */
const char *zxp_version(void);

/**
 * Releases a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and not have been freed.
 */
void zxp_string_free(char *s);

/**
 * Samples a circuit. `depth_layers = 0` selects the default depth `4N`.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum ZxpStatus zxp_circuit_sample(double p,
                                  double r,
                                  size_t n_qubits,
                                  size_t depth_layers,
                                  uint64_t seed,
                                  struct ZxpCircuit **out);

/**
 * Parses a JSON circuit record.
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` valid for writes.
 */
enum ZxpStatus zxp_circuit_from_json(const char *json, struct ZxpCircuit **out);

/**
 * Serializes a circuit as a JSON record.
 *
 * # Safety
 * `c` must be a live handle; `out` valid for writes.
 */
enum ZxpStatus zxp_circuit_to_json(const struct ZxpCircuit *c, char **out);

/**
 * # Safety
 * `c` must be null or a handle from this library, not yet freed.
 */
void zxp_circuit_free(struct ZxpCircuit *c);

/**
 * Number of qubits and bricks of a circuit.
 *
 * # Safety
 * `c` must be a live handle; outputs valid for writes.
 */
enum ZxpStatus zxp_circuit_shape(const struct ZxpCircuit *c, size_t *n_qubits, size_t *n_bricks);

/**
 * Evolves the initial state through the circuit and returns I₂ of the
 * three equal thirds of the chain.
 *
 * # Safety
 * `c` must be a live handle; `out` valid for writes.
 */
enum ZxpStatus zxp_circuit_i2(const struct ZxpCircuit *c,
                              enum ZxpInitialState initial_state,
                              int64_t *out);

/**
 * Diagram of the circuit's linear map, with open inputs and outputs.
 *
 * # Safety
 * `c` must be a live handle; `out` valid for writes.
 */
enum ZxpStatus zxp_diagram_from_circuit(const struct ZxpCircuit *c, struct ZxpDiagram **out);

/**
 * Parses a diagram dump.
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` valid for writes.
 */
enum ZxpStatus zxp_diagram_from_json(const char *json, struct ZxpDiagram **out);

/**
 * # Safety
 * `d` must be a live handle; `out` valid for writes.
 */
enum ZxpStatus zxp_diagram_to_json(struct ZxpDiagram *d, char **out);

/**
 * # Safety
 * `d` must be null or a handle from this library, not yet freed.
 */
void zxp_diagram_free(struct ZxpDiagram *d);

/**
 * Converts the diagram to graph-like form in place.
 *
 * # Safety
 * `d` must be a live handle.
 */
enum ZxpStatus zxp_diagram_to_graph_like(struct ZxpDiagram *d);

/**
 * Clifford simplification in place. `steps` (may be null) receives the
 * number of passes in which a rule fired.
 *
 * # Safety
 * `d` must be a live handle; `steps` null or valid for writes.
 */
enum ZxpStatus zxp_diagram_simplify(struct ZxpDiagram *d,
                                    enum ZxpSchedule schedule,
                                    uint32_t *steps);

/**
 * Live spiders, boundary spiders included, and wires.
 *
 * # Safety
 * `d` must be a live handle; outputs valid for writes.
 */
enum ZxpStatus zxp_diagram_size(struct ZxpDiagram *d, size_t *spiders, size_t *wires);

/**
 * Whether any input connects to any output in the diagram's network.
 *
 * # Safety
 * `d` must be a live handle; `out` valid for writes.
 */
enum ZxpStatus zxp_diagram_is_percolating(struct ZxpDiagram *d, bool *out);

/**
 * `P_path` and its standard error at one parameter point.
 * `depth_layers = 0` selects `4N`.
 *
 * # Safety
 * Outputs must be valid for writes.
 */
enum ZxpStatus zxp_estimate_p_path(double p,
                                   double r,
                                   size_t n_qubits,
                                   size_t depth_layers,
                                   uint64_t master_seed,
                                   size_t n_realizations,
                                   double *p_path,
                                   double *stderr);

/**
 * Ensemble mean of I₂ and its standard error. `depth_layers = 0`
 * selects `4N`.
 *
 * # Safety
 * Outputs must be valid for writes.
 */
enum ZxpStatus zxp_measure_i2(double p,
                              double r,
                              size_t n_qubits,
                              size_t depth_layers,
                              uint64_t master_seed,
                              size_t n_realizations,
                              double *mean,
                              double *stderr);

/**
 * Runs an experiment from a JSON config and writes its files. A non-null
 * `output_dir` overrides the config's. `manifest` (may be null) receives
 * the manifest JSON.
 *
 * # Safety
 * Strings must be NUL-terminated; `manifest` null or valid for writes.
 */
enum ZxpStatus zxp_run_experiment(const char *config_json, const char *output_dir, char **manifest);

/**
 * Runs the oracle suites; `passed` receives whether all of them passed.
 *
 * # Safety
 * `passed` must be valid for writes.
 */
enum ZxpStatus zxp_selftest(uint64_t seed, bool *passed);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ZXPERC_H */
