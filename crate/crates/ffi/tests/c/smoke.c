#include <math.h>
#include <stdio.h>
#include "locc.h"

int main(void) {
    LoccEnsemble *e = NULL;
    if (locc_ensemble_four(&e) != LOCC_STATUS_OK) return 1;
    double value = 0, angle = 0;
    if (locc_optimize_projective(e, &value, &angle) != LOCC_STATUS_OK) return 2;
    size_t dim = 0;
    LoccVerdict verdict;
    if (locc_feasibility(e, LOCC_PARTY_ALICE, &dim, &verdict) != LOCC_STATUS_OK) return 3;
    locc_ensemble_free(e);
    if (dim != 1 || verdict != LOCC_VERDICT_NO_PROGRESS) return 4;
    if (fabs(value - (0.5 + 0.5 / sqrt(2.0))) > 1e-9) return 5;
    if (locc_ensemble_four_general(2.0, &e) != LOCC_STATUS_INVALID_ARGUMENT) return 6;
    printf("%.12f %s\n", value, locc_last_error_message());
    return 0;
}
