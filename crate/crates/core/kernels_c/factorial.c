/* Emits 1!, 2!, ..., N! with 32-bit wrapping multiplication. No input data. */
#include "kernel_io.h"

#ifndef N
#define N 12
#endif

void _start(void) {
    for (int i = 1; i <= N; i++) {
        int32_t f = 1;
        for (int j = 1; j <= i; j++)
            f *= j;
        emit(f);
    }
    halt();
}
