/* Memory-mapped I/O shared by the reference kernels.
 *
 * Inputs are placed at DATA_BASE by the loader, in the order each kernel
 * documents. Every result is written to the output port; a store to the halt
 * port stops the simulator. Build with an RV32EM toolchain, e.g.
 *   riscv32-unknown-elf-gcc -march=rv32em -mabi=ilp32e -O2 -fwrapv -nostdlib
 */
#ifndef KERNEL_IO_H
#define KERNEL_IO_H

#include <stdint.h>

#define DATA_BASE 0x4000u
#define MMIO_OUTPUT (*(volatile int32_t *)0xF0000000u)
#define MMIO_HALT (*(volatile int32_t *)0xF0000004u)

static inline const int32_t *kernel_data(void) { return (const int32_t *)DATA_BASE; }
static inline void emit(int32_t v) { MMIO_OUTPUT = v; }
static inline void halt(void) { MMIO_HALT = 0; }

#endif
