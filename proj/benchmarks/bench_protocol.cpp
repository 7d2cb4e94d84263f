// registered in bench_kernels for now
static int unused_bench_protocol = 0;
