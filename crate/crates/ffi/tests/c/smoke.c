#include <stdio.h>
#include "opo_sideband.h"

int main(void) {
    OpoConfigHandle *cfg = opo_config_reference();
    OpoSolution *sol = NULL;
    if (opo_solve(cfg, &sol) != OPO_STATUS_OK) {
        char msg[256];
        opo_last_error(msg, sizeof msg);
        fprintf(stderr, "solve failed: %s\n", msg);
        return 1;
    }
    double v[144], purity = 0.0;
    if (opo_solution_covariance(sol, v, 144) != OPO_STATUS_OK) return 2;
    if (opo_solution_purity(sol, &purity) != OPO_STATUS_OK) return 3;
    printf("%zu %.17g %.17g\n", opo_solution_dim(sol), v[0], purity);
    opo_solution_free(sol);

    opo_config_set_sigma(cfg, 1.0);
    opo_config_set_omega_hz(cfg, 0.0);
    int boundary = opo_solve(cfg, &sol);
    opo_config_free(cfg);
    return boundary == OPO_STATUS_PHYSICS_BOUNDARY ? 0 : 4;
}
