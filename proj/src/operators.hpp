#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace gdlab {

enum class OperatorKind { Identity, Mask, Diagonal };

// Structural representation of a diagonal measurement operator: identity,
// a 0/1 mask, or an invertible diagonal. Never materialized as a dense
// matrix. All three are self-transpose.
class LinearOperator {
public:
  LinearOperator() = default;  // identity

  static LinearOperator identity();
  static LinearOperator mask(std::vector<int> m);
  static LinearOperator diagonal(std::vector<double> d);

  OperatorKind kind() const { return kind_; }
  const std::vector<int>& mask_values() const { return mask_; }
  const std::vector<double>& diagonal_values() const { return diag_; }
  // 0 for identity (any dimension), the vector length otherwise.
  std::size_t dim_or_zero() const;

  std::vector<double> apply(std::span<const double> x) const;
  std::vector<double> apply_transpose(std::span<const double> x) const;
  // Diagonal entry as a double (1/0 for masks, 1 for identity).
  double entry(std::size_t i) const;

private:
  OperatorKind kind_ = OperatorKind::Identity;
  std::vector<int> mask_;
  std::vector<double> diag_;
};

struct Measurement {
  std::vector<double> y;
  LinearOperator op;
  double sigma_y = 0.0;
};

// y = A x0 + sigma_y * eta with eta ~ N(0, I). For mask operators the noise
// is applied only on observed coordinates and masked coordinates are set to
// exactly 0 (canonical form).
Measurement forward_model(std::span<const double> x0, const LinearOperator& op, double sigma_y,
                          std::uint64_t seed);

}  // namespace gdlab
