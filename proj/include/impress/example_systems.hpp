#pragma once

#include <string>
#include <vector>

#include "impress/flows.hpp"
#include "impress/impulsive.hpp"

namespace impress {

// Shipped example systems with documented dynamics:
//   rotation_circle      unit-speed rotation, no impulses (isometry)
//   impulsive_circle     rotation with trigger 0.5 relocated to 0
//   suspension_doubling  doubling-map suspension under a constant roof
//   translation_interval absorbing drift on [0, 1] with one transient jump
ImpulsiveSystem make_example(const std::string& id);

const std::vector<std::string>& example_ids();

}  // namespace impress
