#include <math.h>
#include <stdio.h>

#include "duopoly.h"

#define CHECK(cond)                                            \
    do {                                                       \
        if (!(cond)) {                                         \
            fprintf(stderr, "%s:%d: %s\n", __FILE__, __LINE__, #cond); \
            return 1;                                          \
        }                                                      \
    } while (0)

int main(void) {
    DuopolyParams params = {0.3, 40.0, 0.16, 0.2, 2.0};
    DuopolySpeeds speeds = {0.05, 0.01, 0.05, 0.01};
    DuopolyModel *model = NULL;
    CHECK(duopoly_model_new(&params, &speeds, &model) == DUOPOLY_STATUS_OK);

    DuopolyEquilibrium eq;
    CHECK(duopoly_model_equilibrium(model, &eq) == DUOPOLY_STATUS_OK);
    CHECK(fabs(eq.state.x1 - 0.34710) < 1e-4);
    CHECK(eq.feasible);

    DuopolyHopf hopf;
    CHECK(duopoly_model_hopf(model, &hopf) == DUOPOLY_STATUS_OK);
    CHECK(hopf.classification == DUOPOLY_CLASSIFICATION_STABLE_UNTIL_TAU0);
    CHECK(hopf.has_crossing && hopf.tau0 > 0.0);

    DuopolyTrajectory *traj = NULL;
    CHECK(duopoly_model_simulate(model, &eq.state, 10.0, 0.05, 20.0, &traj) == DUOPOLY_STATUS_OK);
    CHECK(duopoly_trajectory_len(traj) == 401);
    double t;
    DuopolyState s;
    CHECK(duopoly_trajectory_get(traj, 400, &t, &s) == DUOPOLY_STATUS_OK);
    CHECK(fabs(t - 20.0) < 1e-9 && fabs(s.x1 - eq.state.x1) < 1e-12);
    duopoly_trajectory_free(traj);

    params.q = 0.0;
    DuopolyModel *bad = NULL;
    CHECK(duopoly_model_new(&params, &speeds, &bad) == DUOPOLY_STATUS_INVALID_PARAMETER);
    char msg[256];
    CHECK(duopoly_last_error_message(msg, sizeof msg) > 0);

    duopoly_model_free(model);
    printf("ok %s\n", duopoly_version());
    return 0;
}
