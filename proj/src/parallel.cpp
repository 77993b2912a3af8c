#include "sentibt/parallel.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace sentibt {

namespace {
bool g_force_serial = false;
}

ExecMode default_exec_mode() {
#ifdef _OPENMP
    return g_force_serial ? ExecMode::serial : ExecMode::parallel;
#else
    return ExecMode::serial;
#endif
}

void configure_threads(int threads) {
    if (threads == 1) {
        g_force_serial = true;
        return;
    }
    g_force_serial = false;
#ifdef _OPENMP
    if (threads > 1) omp_set_num_threads(threads);
#endif
}

} // namespace sentibt
