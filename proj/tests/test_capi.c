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

#include "ramix/ramix.h"

#include <math.h>
#include <stdio.h>
#include <stdlib.h>
#include <string.h>

static int failures = 0;

#define CHECK(cond)                                                                                                  \
    do                                                                                                               \
    {                                                                                                                \
        if (!(cond))                                                                                                 \
        {                                                                                                            \
            fprintf(stderr, "%s:%d: CHECK(%s) failed; last error: %s\n", __FILE__, __LINE__, #cond,                \
                    ramix_last_error());                                                                             \
            ++failures;                                                                                              \
        }                                                                                                            \
    } while (0)

static const char *kScenario = "{\"carrier_frequency_ghz\": 28, \"antenna_count\": 17,"
                               " \"cells\": [{}, {}], \"users_per_cell\": 2,"
                               " \"user_region\": {\"range_frac\": [0.1, 1.0], \"angle_deg\": [60, 120]},"
                               " \"power_dbm\": 30, \"noise_dbm\": -80, \"nlos_paths\": 1, \"seed\": 1}";

static void test_analysis(void)
{
    const double pi = 3.14159265358979323846;
    double c = 0.0, s = 0.0, v = 0.0;
    CHECK(ramix_fresnel(1.0, &c, &s) == RAMIX_OK);
    CHECK(fabs(c - 0.77989340037682282947) < 1e-13);
    CHECK(fabs(s - 0.43825914739035476608) < 1e-13);
    CHECK(ramix_fresnel(1.0, NULL, &s) == RAMIX_INVALID_ARGUMENT);
    CHECK(strlen(ramix_last_error()) > 0);

    CHECK(ramix_rayleigh_distance(1.0, 28e9, pi / 2, 1.0, &v) == RAMIX_OK);
    CHECK(v > 186.0 && v < 188.0);
    CHECK(strlen(ramix_last_error()) == 0);

    ramix_array_params p;
    ramix_array_params_default(&p);
    CHECK(p.antenna_count == 129);
    double exact = 0.0, approx = 0.0;
    CHECK(ramix_rho_exact(&p, 0.4 * pi, 0.4 * pi, 10.0, 0.1, &exact) == RAMIX_OK);
    CHECK(ramix_rho_approx(&p, 0.4 * pi, 0.4 * pi, 10.0, 0.1, &approx) == RAMIX_OK);
    CHECK(fabs(exact - approx) < 0.05);
    CHECK(ramix_rho_approx(&p, 1.0, 0.3, 10.0, 0.3, &approx) == RAMIX_DEGENERATE_GEOMETRY);
    CHECK(ramix_optimal_rotation(&p, 0.4 * pi, 0.4 * pi, 10.0, -pi / 6, pi / 6, &v) == RAMIX_OK);
    CHECK(fabs(v + 0.1 * pi) < 1e-12);
    p.antenna_count = 64;
    CHECK(ramix_rho_exact(&p, 1.0, 1.0, 10.0, 0.0, &exact) == RAMIX_INVALID_ARGUMENT);
    CHECK(strcmp(ramix_status_string(RAMIX_PARSE), "parse error") == 0);
    CHECK(strlen(ramix_version()) > 0);
}

static void test_scenario(void)
{
    ramix_scenario *sc = NULL;
    CHECK(ramix_scenario_from_string("{", &sc) == RAMIX_PARSE);
    CHECK(sc == NULL);
    CHECK(ramix_scenario_load("/nonexistent.json", &sc) == RAMIX_IO);
    CHECK(ramix_scenario_from_string(kScenario, &sc) == RAMIX_OK);
    ramix_scenario_info info;
    CHECK(ramix_scenario_info_get(sc, &info) == RAMIX_OK);
    CHECK(info.cell_count == 2);
    CHECK(info.antenna_count == 17);
    CHECK(fabs(info.power_w - 1.0) < 1e-12);

    double fa = 0.0, ra = 0.0, rot[2] = {1.0, 1.0};
    CHECK(ramix_scenario_run_scheme(sc, "FA+ZF", 3, 0, 1, &fa, rot, 2) == RAMIX_OK);
    CHECK(rot[0] == 0.0 && rot[1] == 0.0);
    CHECK(ramix_scenario_run_scheme(sc, "RA+ZF", 3, 0, 1, &ra, rot, 2) == RAMIX_OK);
    CHECK(ra >= fa - 1e-9);
    CHECK(ramix_scenario_run_scheme(sc, "bogus", 3, 0, 1, &ra, NULL, 0) == RAMIX_INVALID_ARGUMENT);
    ramix_scenario_free(sc);
    ramix_scenario_free(NULL);
}

static void test_experiment(void)
{
    const char *path = "/tmp/ramix_capi_scenario.json";
    FILE *f = fopen(path, "w");
    CHECK(f != NULL);
    if (!f)
        return;
    fputs(kScenario, f);
    fclose(f);

    ramix_experiment *ex = NULL;
    CHECK(ramix_experiment_create("no_such_preset", &ex) == RAMIX_INVALID_ARGUMENT);
    CHECK(ramix_experiment_create("power_sweep", &ex) == RAMIX_OK);
    CHECK(ramix_experiment_set_scenario_file(ex, path) == RAMIX_OK);
    CHECK(ramix_experiment_set_schemes(ex, "FA+ZF,UpperBound") == RAMIX_OK);
    CHECK(ramix_experiment_set_schemes(ex, "FA+ZF,nope") == RAMIX_INVALID_ARGUMENT);
    CHECK(ramix_experiment_set_drops(ex, 2) == RAMIX_OK);
    CHECK(ramix_experiment_set_drops(ex, 0) == RAMIX_INVALID_ARGUMENT);
    CHECK(ramix_experiment_set_seed(ex, 9) == RAMIX_OK);
    CHECK(ramix_experiment_set_small(ex, 1) == RAMIX_OK);
    CHECK(ramix_experiment_set_threads(ex, 2) == RAMIX_OK);
    CHECK(ramix_experiment_set_output_dir(ex, "/tmp/ramix_capi_out") == RAMIX_OK);
    CHECK(ramix_experiment_run(ex) == RAMIX_OK);
    int failed = -1, mismatches = -1;
    CHECK(ramix_experiment_failures(ex, &failed, &mismatches) == RAMIX_OK);
    CHECK(failed == 0 && mismatches == 0);
    size_t n = 0;
    CHECK(ramix_experiment_row_count(ex, &n) == RAMIX_OK);
    CHECK(n == 8);
    for (size_t i = 0; i < n; ++i)
    {
        ramix_result_row row;
        CHECK(ramix_experiment_row(ex, i, &row) == RAMIX_OK);
        CHECK(row.drops == 2);
        CHECK(row.min <= row.mean && row.mean <= row.max);
        CHECK(strcmp(row.sweep_var, "power_dbm") == 0);
    }
    ramix_result_row row;
    CHECK(ramix_experiment_row(ex, n, &row) == RAMIX_INVALID_ARGUMENT);
    ramix_experiment_free(ex);
    remove(path);

    FILE *csv = fopen("/tmp/ramix_capi_out/results.csv", "r");
    CHECK(csv != NULL);
    if (csv)
        fclose(csv);
}

static void test_presets(void)
{
    int count = 0;
    for (const char *const *p = ramix_simulate_presets(); *p; ++p)
        ++count;
    CHECK(count == 5);
    count = 0;
    for (const char *const *p = ramix_analyze_presets(); *p; ++p)
        ++count;
    CHECK(count == 4);
    size_t rows = 0;
    CHECK(ramix_analyze("fresnel_verify", NULL, "/tmp/ramix_capi_analysis", &rows) == RAMIX_OK);
    CHECK(rows > 0);
    CHECK(ramix_analyze("nope", NULL, "/tmp/ramix_capi_analysis", &rows) == RAMIX_INVALID_ARGUMENT);
}

int main(void)
{
    test_analysis();
    test_scenario();
    test_experiment();
    test_presets();
    if (failures)
    {
        fprintf(stderr, "%d check(s) failed\n", failures);
        return EXIT_FAILURE;
    }
    printf("C API: all checks passed\n");
    return EXIT_SUCCESS;
}
