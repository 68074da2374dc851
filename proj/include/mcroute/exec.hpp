#ifndef MCROUTE_EXEC_HPP
#define MCROUTE_EXEC_HPP

namespace mcroute {

// Switch between the serial reference path and the OpenMP path of a kernel.
// Both must produce bit-identical results; `parallel` silently degrades to
// serial when the build has no OpenMP support.
enum class Exec { serial, parallel };

}  // namespace mcroute

#endif  // MCROUTE_EXEC_HPP
