// SPDX-License-Identifier: Apache-2.0
//
// ramix - rotatable-antenna multi-cell mixed-field simulator
// Copyright (C) 2026 The ramix authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

/* C interface to the ramix simulator. All handles are opaque; every function
 * returns a ramix_status and reports details through ramix_last_error(). */

#ifndef RAMIX_H
#define RAMIX_H

#include <stddef.h>
#include <stdint.h>

#if defined(RAMIX_BUILDING_LIBRARY)
#define RAMIX_API __attribute__((visibility("default")))
#else
#define RAMIX_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ramix_status
{
    RAMIX_OK = 0,
    RAMIX_INVALID_ARGUMENT = 1,
    RAMIX_DEGENERATE_GEOMETRY = 2,
    RAMIX_DOMAIN = 3,
    RAMIX_INFEASIBLE = 4,
    RAMIX_SOLVER = 5,
    RAMIX_IO = 6,
    RAMIX_PARSE = 7,
    RAMIX_UNSUPPORTED = 8,
    RAMIX_INTERNAL = 99
} ramix_status;

/* Message of the last failing call on this thread; "" after a success. */
RAMIX_API const char *ramix_last_error(void);
RAMIX_API const char *ramix_status_string(ramix_status status);
RAMIX_API const char *ramix_version(void);

/* Array parameters for the analysis functions. spacing_m <= 0 selects lambda/2. */
typedef struct ramix_array_params
{
    double carrier_frequency_hz;
    int antenna_count;
    double spacing_m;
} ramix_array_params;

RAMIX_API void ramix_array_params_default(ramix_array_params *params);

RAMIX_API ramix_status ramix_fresnel(double x, double *c, double *s);
/* upsilon sin^2(theta) 2 D^2 / lambda; theta = pi/2 with upsilon = 1 gives the classic 2 D^2 / lambda. */
RAMIX_API ramix_status ramix_rayleigh_distance(double aperture_m, double carrier_frequency_hz, double theta,
                                               double upsilon, double *out);
RAMIX_API ramix_status ramix_rho_exact(const ramix_array_params *params, double psi, double theta, double r,
                                       double phi, double *out);
RAMIX_API ramix_status ramix_rho_approx(const ramix_array_params *params, double psi, double theta, double r,
                                        double phi, double *out);
RAMIX_API ramix_status ramix_optimal_rotation(const ramix_array_params *params, double psi, double theta, double r,
                                              double phi_min, double phi_max, double *out);

/* ---- scenarios ------------------------------------------------------- */

typedef struct ramix_scenario ramix_scenario;

typedef struct ramix_scenario_info
{
    int cell_count;
    int users_per_cell;
    int antenna_count;
    double carrier_frequency_hz;
    double power_w;
    double noise_w;
    double rayleigh_distance_m;
} ramix_scenario_info;

RAMIX_API ramix_status ramix_scenario_load(const char *path, ramix_scenario **out);
RAMIX_API ramix_status ramix_scenario_from_string(const char *json, ramix_scenario **out);
RAMIX_API void ramix_scenario_free(ramix_scenario *scenario);
RAMIX_API ramix_status ramix_scenario_info_get(const ramix_scenario *scenario, ramix_scenario_info *info);

/* Places users for `drop` and runs one scheme (e.g. "RA+BF") with small swarms when
 * `small` is non-zero. rotations receives cell_count values when non-NULL. */
RAMIX_API ramix_status ramix_scenario_run_scheme(const ramix_scenario *scenario, const char *scheme, uint64_t seed,
                                                 int drop, int small, double *sum_rate, double *rotations,
                                                 size_t rotations_len);

/* ---- experiments ----------------------------------------------------- */

typedef struct ramix_experiment ramix_experiment;

typedef struct ramix_result_row
{
    const char *scheme;
    const char *sweep_var;
    double sweep_value;
    int drops;
    int failed;
    double mean;
    double std;
    double min;
    double max;
    double wall_time_s;
} ramix_result_row;

RAMIX_API ramix_status ramix_experiment_create(const char *preset, ramix_experiment **out);
RAMIX_API void ramix_experiment_free(ramix_experiment *experiment);
RAMIX_API ramix_status ramix_experiment_set_scenario_file(ramix_experiment *experiment, const char *path);
/* Comma-separated scheme names; NULL or "" restores the preset default. */
RAMIX_API ramix_status ramix_experiment_set_schemes(ramix_experiment *experiment, const char *schemes);
RAMIX_API ramix_status ramix_experiment_set_drops(ramix_experiment *experiment, int drops);
RAMIX_API ramix_status ramix_experiment_set_seed(ramix_experiment *experiment, uint64_t seed);
RAMIX_API ramix_status ramix_experiment_set_output_dir(ramix_experiment *experiment, const char *dir);
RAMIX_API ramix_status ramix_experiment_set_small(ramix_experiment *experiment, int small);
RAMIX_API ramix_status ramix_experiment_set_threads(ramix_experiment *experiment, int threads);
/* Runs the sweep. Per-drop failures do not fail the call; see failures. */
RAMIX_API ramix_status ramix_experiment_run(ramix_experiment *experiment);
RAMIX_API ramix_status ramix_experiment_failures(const ramix_experiment *experiment, int *failures,
                                                 int *roundtrip_mismatches);
RAMIX_API ramix_status ramix_experiment_row_count(const ramix_experiment *experiment, size_t *count);
/* Strings in `row` stay valid until the experiment is run again or freed. */
RAMIX_API ramix_status ramix_experiment_row(const ramix_experiment *experiment, size_t index, ramix_result_row *row);

/* ---- analysis presets -------------------------------------------------- */

/* Writes analysis.csv into `output_dir` for fresnel_verify, two_cell_angle,
 * two_cell_range or corollary; rows receives the row count when non-NULL. */
RAMIX_API ramix_status ramix_analyze(const char *preset, const ramix_array_params *params, const char *output_dir,
                                     size_t *rows);

/* NULL-terminated preset name lists. */
RAMIX_API const char *const *ramix_simulate_presets(void);
RAMIX_API const char *const *ramix_analyze_presets(void);

#ifdef __cplusplus
}
#endif

#endif
