#pragma once

namespace sentibt {

// Every data-parallel kernel takes an ExecMode: `serial` is the plain-loop
// reference implementation, `parallel` the OpenMP one. Both must produce
// byte-identical results; the unit tests hold them to that.
enum class ExecMode { serial, parallel };

ExecMode default_exec_mode();

// 0 leaves the OpenMP default alone; 1 forces serial execution everywhere.
void configure_threads(int threads);

} // namespace sentibt
