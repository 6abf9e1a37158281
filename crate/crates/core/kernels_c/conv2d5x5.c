/* 5x5 valid convolution of an N x N image (values 0..255) with a
 * 5x5 kernel (values -16..16). Data: image row-major, then kernel. */
#include "kernel_io.h"

#ifndef N
#define N 16
#endif
#define K 5

void _start(void) {
    const int32_t *img = kernel_data();
    const int32_t *w = img + N * N;
    for (int r = 0; r <= N - K; r++)
        for (int c = 0; c <= N - K; c++) {
            int32_t acc = 0;
            for (int ky = 0; ky < K; ky++)
                for (int kx = 0; kx < K; kx++)
                    acc += img[(r + ky) * N + c + kx] * w[ky * K + kx];
            emit(acc);
        }
    halt();
}
