#include "umbrella.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "errors.hpp"
#include "rng.hpp"

namespace gdlab {

namespace {

constexpr double kLog2Pi = 1.8378770664093454835606594728112;
constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

void check_bin_edges(const std::vector<double>& edges) {
  if (edges.size() < 2) throw std::invalid_argument("need at least 2 bin edges");
  for (std::size_t i = 1; i < edges.size(); ++i)
    if (!(edges[i] > edges[i - 1]))
      throw std::invalid_argument("bin edges must be strictly increasing");
}

void min_shift(FreeEnergyProfile& p) {
  double fmin = std::numeric_limits<double>::infinity();
  for (double v : p.f)
    if (std::isfinite(v)) fmin = std::min(fmin, v);
  if (!std::isfinite(fmin)) return;
  for (double& v : p.f)
    if (std::isfinite(v)) v -= fmin;
}

// Log-sum-exp over a small fixed-size scratch.
double lse(const std::vector<double>& v) {
  double m = -std::numeric_limits<double>::infinity();
  for (double t : v) m = std::max(m, t);
  if (!std::isfinite(m)) return m;
  double s = 0.0;
  for (double t : v) s += std::exp(t - m);
  return m + std::log(s);
}

}  // namespace

FreeEnergyProfile ground_truth_profile(const GaussianMixture& gmm, std::size_t axis,
                                       std::vector<double> bin_edges) {
  if (axis >= gmm.dim()) throw std::invalid_argument("ground_truth_profile: axis out of range");
  check_bin_edges(bin_edges);
  FreeEnergyProfile p;
  const std::size_t nb = bin_edges.size() - 1;
  p.f.resize(nb);
  p.coverage.assign(nb, 0);
  for (std::size_t b = 0; b < nb; ++b) {
    const double x = 0.5 * (bin_edges[b] + bin_edges[b + 1]);
    std::vector<double> lt(gmm.components().size());
    for (std::size_t i = 0; i < gmm.components().size(); ++i) {
      const auto& c = gmm.components()[i];
      const double v = c.var[axis];
      const double d = x - c.mean[axis];
      lt[i] = std::log(c.weight) - 0.5 * (kLog2Pi + std::log(v)) - 0.5 * d * d / v;
    }
    p.f[b] = -lse(lt);
  }
  p.bin_edges = std::move(bin_edges);
  min_shift(p);
  return p;
}

std::vector<std::vector<double>> run_umbrella(const GaussianMixture& gmm,
                                              const WindowSet& windows,
                                              const GuidanceSpec& guidance,
                                              const NoiseSchedule& schedule,
                                              std::uint64_t master_seed, unsigned jobs) {
  if (windows.centers.empty()) throw std::invalid_argument("run_umbrella: no window centers");
  for (std::size_t k = 1; k < windows.centers.size(); ++k)
    if (!(windows.centers[k] > windows.centers[k - 1]))
      throw std::invalid_argument("run_umbrella: centers must be strictly increasing");
  if (!(windows.sigma_y > 0.0)) throw std::invalid_argument("run_umbrella: sigma_y must be > 0");
  if (windows.samples_per_window == 0)
    throw std::invalid_argument("run_umbrella: samples_per_window must be >= 1");

  std::vector<int> mask(gmm.dim(), 0);
  mask[0] = 1;

  std::vector<std::vector<double>> coord0(windows.centers.size());
  for (std::size_t k = 0; k < windows.centers.size(); ++k) {
    Measurement m;
    m.op = LinearOperator::mask(mask);
    m.sigma_y = windows.sigma_y;
    m.y.assign(gmm.dim(), 0.0);
    m.y[0] = windows.centers[k];

    const auto finals = sample_batch(gmm, schedule, guidance, &m, derive_seed(master_seed, k),
                                     windows.samples_per_window, jobs);
    coord0[k].resize(finals.size());
    for (std::size_t i = 0; i < finals.size(); ++i) coord0[k][i] = finals[i][0];
  }
  return coord0;
}

FreeEnergyProfile wham(const std::vector<std::vector<double>>& per_window_samples,
                       const WindowSet& windows, std::vector<double> bin_edges, double tol,
                       std::size_t max_iter, const std::vector<double>* initial_f,
                       std::vector<double>* out_window_f) {
  check_bin_edges(bin_edges);
  const std::size_t nw = windows.centers.size();
  if (per_window_samples.size() != nw)
    throw std::invalid_argument("wham: sample sets and window count differ");
  if (!(tol > 0.0)) throw std::invalid_argument("wham: tol must be positive");
  const std::size_t nb = bin_edges.size() - 1;

  // Histogram per window; samples outside the binned range are dropped.
  std::vector<std::vector<double>> counts(nw, std::vector<double>(nb, 0.0));
  std::vector<double> window_total(nw, 0.0);
  for (std::size_t k = 0; k < nw; ++k) {
    for (double x : per_window_samples[k]) {
      if (x < bin_edges.front() || x >= bin_edges.back()) continue;
      const auto it = std::upper_bound(bin_edges.begin(), bin_edges.end(), x);
      const std::size_t b = static_cast<std::size_t>(it - bin_edges.begin()) - 1;
      counts[k][b] += 1.0;
      window_total[k] += 1.0;
    }
  }

  // The free-energy offsets are only determined within groups of windows that
  // share sampled bins; detect disconnected groups up front.
  {
    std::vector<std::size_t> group(nw);
    std::iota(group.begin(), group.end(), 0);
    std::function<std::size_t(std::size_t)> find = [&](std::size_t i) {
      while (group[i] != i) i = group[i] = group[group[i]];
      return i;
    };
    for (std::size_t b = 0; b < nb; ++b) {
      std::size_t first = nw;
      for (std::size_t k = 0; k < nw; ++k) {
        if (counts[k][b] == 0.0) continue;
        if (first == nw)
          first = k;
        else
          group[find(k)] = find(first);
      }
    }
    std::vector<std::vector<std::size_t>> clusters(nw);
    for (std::size_t k = 0; k < nw; ++k)
      if (window_total[k] > 0.0) clusters[find(k)].push_back(k);
    std::size_t populated = 0;
    for (const auto& c : clusters) populated += c.empty() ? 0 : 1;
    if (populated > 1) {
      std::ostringstream msg;
      msg << "wham: disconnected window groups:";
      for (const auto& c : clusters) {
        if (c.empty()) continue;
        msg << " {";
        for (std::size_t i = 0; i < c.size(); ++i) msg << (i ? "," : "") << c[i];
        msg << "}";
      }
      throw NumericError(msg.str());
    }
  }

  std::vector<double> total_counts(nb, 0.0);
  for (std::size_t b = 0; b < nb; ++b)
    for (std::size_t k = 0; k < nw; ++k) total_counts[b] += counts[k][b];

  // Precompute bias values at bin centers.
  std::vector<double> centers(nb);
  for (std::size_t b = 0; b < nb; ++b) centers[b] = 0.5 * (bin_edges[b] + bin_edges[b + 1]);
  const double two_var = 2.0 * windows.sigma_y * windows.sigma_y;
  std::vector<std::vector<double>> bias(nw, std::vector<double>(nb));
  for (std::size_t k = 0; k < nw; ++k)
    for (std::size_t b = 0; b < nb; ++b) {
      const double d = centers[b] - windows.centers[k];
      bias[k][b] = d * d / two_var;
    }

  std::vector<double> f(nw, 0.0);
  if (initial_f != nullptr) {
    if (initial_f->size() != nw) throw std::invalid_argument("wham: initial_f size mismatch");
    f = *initial_f;
  }

  std::vector<double> log_p(nb, -std::numeric_limits<double>::infinity());
  std::vector<double> scratch(nw), scratch_b(nb);
  double residual = std::numeric_limits<double>::infinity();
  for (std::size_t iter = 0; iter < max_iter; ++iter) {
    // log P(b) = log sum_k n_k(b) - LSE_k(log N_k + f_k - B_k(b))
    for (std::size_t b = 0; b < nb; ++b) {
      if (total_counts[b] == 0.0) {
        log_p[b] = -std::numeric_limits<double>::infinity();
        continue;
      }
      for (std::size_t k = 0; k < nw; ++k)
        scratch[k] = window_total[k] > 0.0 ? std::log(window_total[k]) + f[k] - bias[k][b]
                                           : -std::numeric_limits<double>::infinity();
      log_p[b] = std::log(total_counts[b]) - lse(scratch);
    }
    // Normalize P (absorbed by the f_k at the fixed point; improves scaling).
    {
      double z = lse(log_p);
      for (double& v : log_p) v -= z;
    }
    residual = 0.0;
    for (std::size_t k = 0; k < nw; ++k) {
      for (std::size_t b = 0; b < nb; ++b)
        scratch_b[b] = std::isfinite(log_p[b]) ? log_p[b] - bias[k][b]
                                               : -std::numeric_limits<double>::infinity();
      const double fk = -lse(scratch_b);
      residual = std::max(residual, std::abs(fk - f[k]));
      f[k] = fk;
    }
    if (residual < tol) {
      if (out_window_f != nullptr) *out_window_f = f;
      FreeEnergyProfile p;
      p.bin_edges = std::move(bin_edges);
      p.f.resize(nb);
      p.coverage.resize(nb);
      for (std::size_t b = 0; b < nb; ++b) {
        p.coverage[b] = static_cast<std::size_t>(total_counts[b]);
        p.f[b] = total_counts[b] > 0.0 ? -log_p[b] : kNan;
      }
      min_shift(p);
      return p;
    }
  }
  std::ostringstream msg;
  msg << "wham: no convergence after " << max_iter << " iterations, residual " << residual
      << " (tol " << tol << ")";
  throw NumericError(msg.str());
}

double profile_rmse(const FreeEnergyProfile& estimate, const FreeEnergyProfile& truth,
                    std::size_t min_count) {
  if (estimate.bins() != truth.bins())
    throw std::invalid_argument("profile_rmse: bin layouts differ");
  double acc = 0.0;
  std::size_t n = 0;
  for (std::size_t b = 0; b < estimate.bins(); ++b) {
    if (estimate.coverage[b] < min_count) continue;
    if (!std::isfinite(estimate.f[b]) || !std::isfinite(truth.f[b])) continue;
    const double d = estimate.f[b] - truth.f[b];
    acc += d * d;
    ++n;
  }
  if (n == 0) throw NumericError("profile_rmse: no bins meet the coverage threshold");
  return std::sqrt(acc / static_cast<double>(n));
}

}  // namespace gdlab
