#ifndef LEVYSPACE_H
#define LEVYSPACE_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

// Result of every fallible call.
typedef enum LsStatus {
  LS_STATUS_OK = 0,
  LS_STATUS_NULL_POINTER = 1,
  LS_STATUS_DOMAIN = 2,
  LS_STATUS_CONFIG = 3,
  LS_STATUS_INTEGRATION = 4,
  LS_STATUS_ESTIMATION = 5,
  LS_STATUS_MODEL = 6,
  LS_STATUS_IO = 7,
  LS_STATUS_PARSE = 8,
  LS_STATUS_INPUT = 9,
  LS_STATUS_PANIC = 10,
} LsStatus;

// Opaque normalized run configuration.
typedef struct LsConfig LsConfig;

// Opaque complex grid function.
typedef struct LsGrid LsGrid;

// Opaque periodic lattice.
typedef struct LsLattice LsLattice;

// Opaque Lévy measure.
typedef struct LsModel LsModel;

// Opaque scaling function w.
typedef struct LsScaling LsScaling;

// Opaque symbol ψ tabulated on a lattice.
typedef struct LsSymbol LsSymbol;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failing call on this thread, or null. Owned by the library.
const char *ls_last_error(void);

// Library version as a static NUL-terminated string.
const char *ls_version(void);

// Releases a string returned by the library.
//
// # Safety
// `s` must come from this library and not be freed twice.
void ls_string_free(char *s);

// α-stable measure. `weights` may be null with `n_weights` = 0 for the uniform angular part;
// otherwise [plus, minus] in 1-d or circle node weights in 2-d.
//
// # Safety
// `weights` must point to `n_weights` doubles; `out` must be writable.
enum LsStatus ls_model_stable(uintptr_t dim,
                              double alpha,
                              const double *weights,
                              uintptr_t n_weights,
                              struct LsModel **out_model);

// Subordinate Brownian measure from a Bernstein function of the given kind (1–4).
//
// # Safety
// `params` must point to `n_params` doubles; `out_model` must be writable.
enum LsStatus ls_model_bernstein(uintptr_t dim,
                                 uint8_t kind,
                                 const double *params,
                                 uintptr_t n_params,
                                 struct LsModel **out_model);

// Order of the measure.
//
// # Safety
// Handles must be valid or null.
enum LsStatus ls_model_order(const struct LsModel *model, double *out_order);

// ψ(ξ) at a single frequency (ξ₁ ignored in 1-d).
//
// # Safety
// Handles must be valid or null; outputs writable.
enum LsStatus ls_model_symbol(const struct LsModel *model,
                              double xi0,
                              double xi1,
                              double *out_re,
                              double *out_im);

// w(r) = r^α.
//
// # Safety
// `out_scaling` must be writable.
enum LsStatus ls_scaling_power(double alpha, struct LsScaling **out_scaling);

// Scaling function induced by a measure.
//
// # Safety
// Handles must be valid or null.
enum LsStatus ls_scaling_induced(const struct LsModel *model, struct LsScaling **out_scaling);

// w(r).
//
// # Safety
// Handles must be valid or null.
enum LsStatus ls_scaling_w(const struct LsScaling *sf, double r, double *out_w);

// Lattice of `points` nodes per axis on a box of side `box_len`.
//
// # Safety
// `out_lattice` must be writable.
enum LsStatus ls_lattice_new(uintptr_t dim,
                             double box_len,
                             uintptr_t points,
                             struct LsLattice **out_lattice);

// Total number of nodes (points^dim); 0 for a null handle.
//
// # Safety
// `lattice` must be valid or null.
uintptr_t ls_lattice_len(const struct LsLattice *lattice);

// Grid function from separate real and imaginary arrays of length `n` (imag may be null).
//
// # Safety
// Arrays must hold `n` doubles; handles valid or null.
enum LsStatus ls_grid_new(const struct LsLattice *lattice,
                          const double *re,
                          const double *im,
                          uintptr_t n,
                          struct LsGrid **out_grid);

// Copies values into caller arrays of length `n` (must equal the lattice size; imag may be null).
//
// # Safety
// Arrays must have room for `n` doubles.
enum LsStatus ls_grid_values(const struct LsGrid *grid, double *re, double *im, uintptr_t n);

// Loads a grid function (.csv text or binary block).
//
// # Safety
// `path` must be a NUL-terminated string.
enum LsStatus ls_grid_load(const char *path, struct LsGrid **out_grid);

// Saves a grid function; the format follows the extension.
//
// # Safety
// `path` must be a NUL-terminated string; handles valid or null.
enum LsStatus ls_grid_save(const struct LsGrid *grid, const char *path);

// ψ tabulated on every lattice frequency.
//
// # Safety
// Handles must be valid or null.
enum LsStatus ls_symbol_compute(const struct LsModel *model,
                                const struct LsLattice *lattice,
                                struct LsSymbol **out_symbol);

// L u.
//
// # Safety
// Handles must be valid or null.
enum LsStatus ls_apply_generator(const struct LsGrid *grid,
                                 const struct LsSymbol *sym,
                                 struct LsGrid **out_grid);

// L^κ u for κ ∈ [0, 2).
//
// # Safety
// Handles must be valid or null.
enum LsStatus ls_apply_fractional(const struct LsGrid *grid,
                                  const struct LsSymbol *sym,
                                  double kappa,
                                  struct LsGrid **out_grid);

// (aI − L)^{sign·κ} u with sign = ±1.
//
// # Safety
// Handles must be valid or null.
enum LsStatus ls_apply_resolvent_power(const struct LsGrid *grid,
                                       const struct LsSymbol *sym,
                                       double a,
                                       double kappa,
                                       int8_t sign,
                                       struct LsGrid **out_grid);

// |u|_{β,∞} with a dyadic bank of base N on the grid's lattice.
//
// # Safety
// Handles must be valid or null.
enum LsStatus ls_besov_norm(const struct LsGrid *grid,
                            const struct LsScaling *sf,
                            double base,
                            double beta,
                            double *out_norm);

// Solves ∂ₜu = Lu − λu + f, u(0) = 0, with constant f over `steps` steps and returns u(T).
//
// # Safety
// Handles must be valid or null.
enum LsStatus ls_solve(const struct LsGrid *forcing,
                       const struct LsSymbol *sym,
                       double lambda,
                       double t_end,
                       uintptr_t steps,
                       struct LsGrid **out_grid);

// ∫₀^∞ t^{−κ−1}(1 − e^{−t}) dt (`which` = 0) or ∫₀^∞ t^{κ−1}e^{−t} dt (`which` = 1).
//
// # Safety
// `out_value` must be writable.
enum LsStatus ls_subordination_constant(double kappa,
                                        uint32_t which,
                                        double *out_value);

// Parses and normalizes a TOML run configuration.
//
// # Safety
// `toml_text` must be a NUL-terminated string.
enum LsStatus ls_config_parse(const char *toml_text, struct LsConfig **out_config);

// Normalized TOML form; release with `ls_string_free`.
//
// # Safety
// Handles must be valid or null.
enum LsStatus ls_config_to_toml(const struct LsConfig *config, char **out_text);

// Runs the configured verification suite; the report is JSON, released with `ls_string_free`.
// `out_all_pass` receives 1 when every record passes.
//
// # Safety
// Handles must be valid or null.
enum LsStatus ls_verify(const struct LsConfig *config, char **out_json, int32_t *out_all_pass);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* LEVYSPACE_H */
