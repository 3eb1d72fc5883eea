#pragma once

#include <string>
#include <vector>

#include "gmm.hpp"

namespace gdlab {

// Built-in priors: "doublewell2d" (equal-weight bivariate pair forming a
// double well along coordinate 0) and "gauss1d" (standard normal).
GaussianMixture preset_gmm(const std::string& name);

std::vector<std::string> preset_names();

}  // namespace gdlab
