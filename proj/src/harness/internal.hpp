#pragma once

#include "fixpoint/harness.hpp"

namespace fixpoint::detail {

// Locates a common solution point by cyclic projection over the problem's
// solution-set pieces; used when a config omits the witness.
Point find_witness(const ProblemSpec& problem);

}  // namespace fixpoint::detail
