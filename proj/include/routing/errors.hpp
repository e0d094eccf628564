#pragma once

#include <stdexcept>

namespace routing {

// File/format failures while reading or writing instances, traces, or reports.
struct io_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A solve hit its iteration budget before certifying the requested gap.
struct convergence_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace routing
