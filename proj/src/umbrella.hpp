#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "gmm.hpp"
#include "guidance.hpp"
#include "sampler.hpp"
#include "schedule.hpp"

namespace gdlab {

// Harmonic bias windows along coordinate 0. Each window is the noisy
// inpainting measurement y = (c_k, 0, ...) with mask (1, 0, ...) and noise
// level sigma_y, which sets the window width.
struct WindowSet {
  std::vector<double> centers;  // strictly increasing
  double sigma_y = 0.0;
  std::size_t samples_per_window = 0;
};

// Binned -log marginal along one coordinate, min-shifted to 0 over covered
// bins. Uncovered bins carry NaN and coverage 0.
struct FreeEnergyProfile {
  std::vector<double> bin_edges;
  std::vector<double> f;
  std::vector<std::size_t> coverage;

  std::size_t bins() const { return f.size(); }
  double bin_center(std::size_t b) const { return 0.5 * (bin_edges[b] + bin_edges[b + 1]); }
};

// Exact -log of the 1-D marginal of a diagonal mixture along `axis`,
// evaluated at bin centers.
FreeEnergyProfile ground_truth_profile(const GaussianMixture& gmm, std::size_t axis,
                                       std::vector<double> bin_edges);

// Guided sampling at every window center; returns the coordinate-0 values of
// the final samples, one vector per window. Window seeds derive from
// (master_seed, window index); jobs > 1 parallelizes trajectories.
std::vector<std::vector<double>> run_umbrella(const GaussianMixture& gmm,
                                              const WindowSet& windows,
                                              const GuidanceSpec& guidance,
                                              const NoiseSchedule& schedule,
                                              std::uint64_t master_seed, unsigned jobs = 1);

/*
 * Weighted histogram analysis in the unit-temperature convention with bias
 * B_k(x) = (x - c_k)^2 / (2 sigma_y^2). Self-consistent iteration:
 *
 *   P(b)  = sum_k n_k(b) / sum_k N_k exp(f_k - B_k(x_b))
 *   f_k   = -log sum_b P(b) exp(-B_k(x_b))
 *
 * until max |delta f_k| < tol or max_iter. Returns -log P min-shifted over
 * covered bins. Fails when the window overlap graph is disconnected (offsets
 * undetermined) or the iteration does not converge.
 */
FreeEnergyProfile wham(const std::vector<std::vector<double>>& per_window_samples,
                       const WindowSet& windows, std::vector<double> bin_edges, double tol,
                       std::size_t max_iter,
                       const std::vector<double>* initial_f = nullptr,
                       std::vector<double>* out_window_f = nullptr);

// Root-mean-square difference over bins covered by both profiles with
// estimate coverage >= min_count.
double profile_rmse(const FreeEnergyProfile& estimate, const FreeEnergyProfile& truth,
                    std::size_t min_count);

}  // namespace gdlab
