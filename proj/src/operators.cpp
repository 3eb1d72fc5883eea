#include "operators.hpp"

#include <cmath>
#include <stdexcept>

#include "rng.hpp"

namespace gdlab {

LinearOperator LinearOperator::identity() {
  LinearOperator op;
  op.kind_ = OperatorKind::Identity;
  return op;
}

LinearOperator LinearOperator::mask(std::vector<int> m) {
  if (m.empty()) throw std::invalid_argument("mask operator needs at least one entry");
  for (int v : m)
    if (v != 0 && v != 1) throw std::invalid_argument("mask entries must be 0 or 1");
  LinearOperator op;
  op.kind_ = OperatorKind::Mask;
  op.mask_ = std::move(m);
  return op;
}

LinearOperator LinearOperator::diagonal(std::vector<double> d) {
  if (d.empty()) throw std::invalid_argument("diagonal operator needs at least one entry");
  for (double v : d)
    if (v == 0.0 || !std::isfinite(v))
      throw std::invalid_argument("diagonal operator entries must be nonzero and finite");
  LinearOperator op;
  op.kind_ = OperatorKind::Diagonal;
  op.diag_ = std::move(d);
  return op;
}

std::size_t LinearOperator::dim_or_zero() const {
  switch (kind_) {
    case OperatorKind::Identity: return 0;
    case OperatorKind::Mask: return mask_.size();
    case OperatorKind::Diagonal: return diag_.size();
  }
  return 0;
}

double LinearOperator::entry(std::size_t i) const {
  switch (kind_) {
    case OperatorKind::Identity: return 1.0;
    case OperatorKind::Mask: return static_cast<double>(mask_[i]);
    case OperatorKind::Diagonal: return diag_[i];
  }
  return 1.0;
}

std::vector<double> LinearOperator::apply(std::span<const double> x) const {
  const std::size_t d = dim_or_zero();
  if (d != 0 && x.size() != d) throw std::invalid_argument("operator dimension mismatch");
  std::vector<double> r(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) r[i] = entry(i) * x[i];
  return r;
}

std::vector<double> LinearOperator::apply_transpose(std::span<const double> x) const {
  return apply(x);  // diagonal operators are self-transpose
}

Measurement forward_model(std::span<const double> x0, const LinearOperator& op, double sigma_y,
                          std::uint64_t seed) {
  const std::size_t d = op.dim_or_zero();
  if (d != 0 && x0.size() != d) throw std::invalid_argument("forward_model: dimension mismatch");
  if (!(sigma_y >= 0.0)) throw std::invalid_argument("forward_model: sigma_y must be >= 0");
  Rng rng(seed);
  Measurement m;
  m.op = op;
  m.sigma_y = sigma_y;
  m.y.resize(x0.size());
  for (std::size_t i = 0; i < x0.size(); ++i) {
    const bool observed = op.kind() != OperatorKind::Mask || op.mask_values()[i] == 1;
    if (observed)
      m.y[i] = op.entry(i) * x0[i] + sigma_y * rng.normal();
    else
      m.y[i] = 0.0;
  }
  return m;
}

}  // namespace gdlab
