#include "presets.hpp"

#include "errors.hpp"

namespace gdlab {

GaussianMixture preset_gmm(const std::string& name) {
  if (name == "doublewell2d") {
    // Standard deviations (0.5, 0.6) and (0.3, 0.45), stored as variances.
    std::vector<GmmComponent> comps{
        {0.5, {-2.0, 2.4}, {0.25, 0.36}},
        {0.5, {1.5, 0.0}, {0.09, 0.2025}},
    };
    return GaussianMixture(2, std::move(comps));
  }
  if (name == "gauss1d") {
    std::vector<GmmComponent> comps{{1.0, {0.0}, {1.0}}};
    return GaussianMixture(1, std::move(comps));
  }
  throw ConfigError("prior: unknown preset '" + name + "'");
}

std::vector<std::string> preset_names() { return {"doublewell2d", "gauss1d"}; }

}  // namespace gdlab
