/* cc examples/smoke.c -Iinclude ../../target/release/libdegbeam_ffi.a -lm -lpthread -ldl */
#include <stdio.h>
#include "degbeam.h"

int main(void) {
    db_coefficient *c = NULL;
    db_discretization *d = NULL;
    db_trace *t = NULL;
    char msg[256];
    if (db_coefficient_new(0.5, 0.0, &c) != DB_STATUS_OK) goto fail;
    double k, a1, c_hp;
    db_coefficient_info(c, &k, &a1, NULL);
    if (db_coefficient_hardy(c, 256, &c_hp) != DB_STATUS_OK) goto fail;
    db_constants m;
    if (db_stability_constants(k, a1, c_hp, 1.0, 1.0, 0.0 / 0.0, &m) != DB_STATUS_OK) goto fail;
    if (db_discretization_new(c, 32, 1.0, 1.0, 2.0, &d) != DB_STATUS_OK) goto fail;
    if (db_simulate(d, "x2", 1.0, "zero", 0.0, 1e-2, 5.0, &t) != DB_STATUS_OK) goto fail;
    db_decay r;
    if (db_verify_decay(t, &m, &r) != DB_STATUS_OK) goto fail;
    printf("degbeam %s: K=%g c_hp=%.6f M=%.4g decay_ok=%d rate=%.4f\n",
           db_version(), k, c_hp, m.m, r.ok, r.fitted_rate);
    db_trace_free(t);
    db_discretization_free(d);
    db_coefficient_free(c);
    return r.ok ? 0 : 1;
fail:
    db_last_error_message(msg, sizeof msg);
    fprintf(stderr, "error: %s\n", msg);
    return 2;
}
