#pragma once

#include "prefd/types.hpp"

#include <span>
#include <vector>

namespace prefd {

/// Polyharmonic spline phi(r) = r^k (odd k) or r^k log r (even k).
struct PhsBasis {
  int k = 3;
};

double phs_eval(const PhsBasis& basis, double r);

/// Laplacian of the spline as a function of the radius, in `dim` dimensions.
/// Finite at r = 0 only for k >= 3.
double phs_laplacian(const PhsBasis& basis, int dim, double r);

/// Number of monomials of total degree <= degree in `dim` variables.
long long monomial_count(int degree, int dim);

/// Differential operators supported by the stencil machinery.
enum class OperatorTag { Identity, Laplacian };

/// Monomials of total degree <= degree in graded lexicographic order:
/// by degree first, within a degree by descending leading exponents.
/// Index 0 is the constant, indices 1..dim are the linear terms.
class MonomialBasis {
 public:
  MonomialBasis(int degree, int dim);

  int degree() const { return degree_; }
  int dim() const { return dim_; }
  int size() const { return static_cast<int>(exponents_.size()); }
  std::span<const int> exponent(int j) const { return exponents_[static_cast<std::size_t>(j)]; }

 private:
  int degree_;
  int dim_;
  std::vector<std::vector<int>> exponents_;
};

/// prod_j p[j]^alpha[j] with the convention 0^0 = 1.
double monomial_eval(std::span<const int> alpha, const Vector& p);

/// The operator applied to the monomial, evaluated at p. For the Laplacian
/// this is sum_j alpha_j (alpha_j - 1) p^(alpha - 2 e_j).
double monomial_apply(OperatorTag op, std::span<const int> alpha, const Vector& p);

}  // namespace prefd
