/* N x N integer matrix product C = A B. Data: A row-major, then B
 * row-major (values 0..255). */
#include "kernel_io.h"

#ifndef N
#define N 8
#endif

void _start(void) {
    const int32_t *a = kernel_data();
    const int32_t *b = a + N * N;
    for (int i = 0; i < N; i++)
        for (int j = 0; j < N; j++) {
            int32_t acc = 0;
            for (int k = 0; k < N; k++)
                acc += a[i * N + k] * b[k * N + j];
            emit(acc);
        }
    halt();
}
