/* 16-tap FIR filter. Data: N + 15 samples (-128..127), then 16 taps
 * (-64..63). */
#include "kernel_io.h"

#ifndef N
#define N 64
#endif
#define TAPS 16

void _start(void) {
    const int32_t *x = kernel_data();
    const int32_t *h = x + N + TAPS - 1;
    for (int i = 0; i < N; i++) {
        int32_t acc = 0;
        for (int t = 0; t < TAPS; t++)
            acc += x[i + t] * h[t];
        emit(acc);
    }
    halt();
}
