/* Minimal C consumer: load the dyadic system, run a forward/inverse round
 * trip at N = 4, and print the operation count.
 *
 * Build (from the workspace root, after `cargo build --release`):
 *   cc crates/fractal-fft-ffi/examples/c/demo.c \
 *      -I crates/fractal-fft-ffi/include \
 *      target/release/libfractal_fft_ffi.a -lm -o demo
 */
#include <stdio.h>
#include <stdlib.h>
#include <math.h>

#include "fractal_fft.h"

static const char *DYADIC_JSON =
    "{\"dim\":1,\"K\":2,\"a_inverse\":[[2]],"
    "\"b\":[[0],[1]],\"c\":[[0],[1]],\"m1_class\":\"hadamard\"}";

int main(void) {
    FractalFftSystem *system = NULL;
    if (fractal_fft_system_from_json(DYADIC_JSON, &system) != FractalFftStatus_Ok) {
        fprintf(stderr, "system: %s\n", fractal_fft_last_error_message());
        return 1;
    }

    FractalFftPlan *plan = NULL;
    if (fractal_fft_plan_build(system, 4, FractalFftOrdering_Obverse, &plan) !=
        FractalFftStatus_Ok) {
        fprintf(stderr, "plan: %s\n", fractal_fft_last_error_message());
        return 1;
    }

    size_t len = fractal_fft_plan_length(plan);
    double *input = calloc(2 * len, sizeof(double));
    double *mid = calloc(2 * len, sizeof(double));
    double *back = calloc(2 * len, sizeof(double));
    for (size_t i = 0; i < len; i++) {
        input[2 * i] = cos(0.37 * (double)i);
        input[2 * i + 1] = sin(0.11 * (double)i);
    }

    FractalFftOpCounts counts = {0, 0};
    fractal_fft_plan_forward(plan, input, mid, len, &counts);
    fractal_fft_plan_inverse(plan, mid, back, len, NULL);

    double worst = 0.0;
    for (size_t i = 0; i < 2 * len; i++) {
        double dev = fabs(input[i] - back[i]);
        if (dev > worst) worst = dev;
    }
    printf("samples=%zu muls=%llu adds=%llu roundtrip=%.3e\n", len,
           (unsigned long long)counts.multiplications,
           (unsigned long long)counts.additions, worst);

    free(input);
    free(mid);
    free(back);
    fractal_fft_plan_free(plan);
    fractal_fft_system_free(system);
    return worst < 1e-10 ? 0 : 2;
}
