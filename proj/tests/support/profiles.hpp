#pragma once

#include <vector>

#include "rankone/radial.hpp"

namespace rankone::testing {

// Twelve profiles on [0, R] satisfying the Lipschitz band, with rho(0) = 0 and
// enough decay at the origin for every p <= 4 used by the tests. The splines
// interpolate r/(1+r) and sin r.
inline std::vector<RadialProfile> energy_profiles(Orientation o) {
  return {
      RadialProfile::power(1.0, 1.0, 1.0, o),
      RadialProfile::power(1.0, 0.6, 1.0, o),
      RadialProfile::power(1.0, 0.8, 1.0, o),
      RadialProfile::power(2.0, 0.6, 2.0, o),
      RadialProfile::power(1.0, 0.95, 1.5, o),
      RadialProfile::power(0.7, 0.7, 3.0, o),
      RadialProfile::polynomial({1.0, -0.3}, 1.0, o),
      RadialProfile::polynomial({1.0, 0.0, -0.2}, 1.0, o),
      RadialProfile::polynomial({2.0, -0.5, 0.1}, 1.5, o),
      RadialProfile::polynomial({1.0, -0.2}, 2.0, o),
      RadialProfile::spline({0.0, 0.4, 1}, {0.0, 0.285714, 0.5}, {1, 0.510204, 0.25}, o),
      RadialProfile::spline({0.0, 0.3, 0.7, 1.2}, {0.0, 0.29552, 0.644218, 0.932039}, {1, 0.955336, 0.764842, 0.362358}, o),
  };
}

}  // namespace rankone::testing
