#pragma once

#include "marlin/core/scenario.hpp"

namespace marlin {

// Built-in experiment world: a pool of up to 12 datacenters across four
// regions with diurnal carbon-intensity and electricity-price series. The
// first four DCs are deliberately contrasted so that each is the unique
// winner of exactly one objective; DCs added beyond the first four are
// progressively greener and water-lighter, so widening the fleet opens real
// headroom on carbon and water.
Scenario default_scenario(int num_datacenters = 8, int epochs = 96);

// Two-DC microworld for objective-seeking checks: DC 0 is strictly best on
// the given objective (0 ttft, 1 carbon, 2 water, 3 cost) and strictly worse
// on every other, so the optimal routing is unambiguous.
Scenario contrast_scenario(int objective, int epochs = 96);

}  // namespace marlin
