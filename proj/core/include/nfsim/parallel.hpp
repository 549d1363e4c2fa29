#pragma once

namespace nfsim {

/// Number of workers used for row-partitioned loops. 1 when built without
/// OpenMP.
int worker_count() noexcept;
/// n <= 0 restores the runtime default.
void set_worker_count(int n) noexcept;

}  // namespace nfsim

#if defined(NFSIM_HAVE_OPENMP)
#define NFSIM_PARALLEL_FOR _Pragma("omp parallel for schedule(static)")
#else
#define NFSIM_PARALLEL_FOR
#endif
