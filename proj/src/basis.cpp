#include "prefd/basis.hpp"

#include <cmath>
#include <functional>
#include <stdexcept>

namespace prefd {

namespace {

double int_pow(double x, int e) {
  double v = 1.0;
  for (int i = 0; i < e; ++i) v *= x;
  return v;
}

void check_phs(const PhsBasis& basis) {
  if (basis.k < 1) throw std::invalid_argument("PhsBasis: exponent k must be >= 1");
}

}  // namespace

double phs_eval(const PhsBasis& basis, double r) {
  check_phs(basis);
  if (!(r >= 0.0)) throw std::invalid_argument("phs_eval: radius must be nonnegative");
  if (basis.k % 2 == 1) return int_pow(r, basis.k);
  if (r == 0.0) return 0.0;  // r^k log r -> 0
  return int_pow(r, basis.k) * std::log(r);
}

double phs_laplacian(const PhsBasis& basis, int dim, double r) {
  check_phs(basis);
  if (dim < 1) throw std::invalid_argument("phs_laplacian: dimension must be >= 1");
  if (!(r >= 0.0)) throw std::invalid_argument("phs_laplacian: radius must be nonnegative");
  const int k = basis.k;
  if (r == 0.0) {
    if (k <= 2) throw std::invalid_argument("phs_laplacian: singular at r = 0 for k <= 2");
    return 0.0;
  }
  const double radial = static_cast<double>(k) * static_cast<double>(k + dim - 2);
  if (k % 2 == 1) return radial * int_pow(r, k - 2);
  return int_pow(r, k - 2) * (radial * std::log(r) + 2.0 * k + dim - 2.0);
}

long long monomial_count(int degree, int dim) {
  if (degree < 0) throw std::invalid_argument("monomial_count: degree must be >= 0");
  if (dim < 1) throw std::invalid_argument("monomial_count: dimension must be >= 1");
  long long c = 1;
  for (int i = 1; i <= dim; ++i) c = c * (degree + i) / i;
  return c;
}

MonomialBasis::MonomialBasis(int degree, int dim) : degree_(degree), dim_(dim) {
  exponents_.reserve(static_cast<std::size_t>(monomial_count(degree, dim)));
  std::vector<int> alpha(static_cast<std::size_t>(dim), 0);
  std::function<void(int, int)> emit = [&](int pos, int rem) {
    if (pos == dim - 1) {
      alpha[static_cast<std::size_t>(pos)] = rem;
      exponents_.push_back(alpha);
      return;
    }
    for (int e = rem; e >= 0; --e) {
      alpha[static_cast<std::size_t>(pos)] = e;
      emit(pos + 1, rem - e);
    }
  };
  for (int g = 0; g <= degree; ++g) emit(0, g);
}

double monomial_eval(std::span<const int> alpha, const Vector& p) {
  if (static_cast<Eigen::Index>(alpha.size()) != p.size()) {
    throw std::invalid_argument("monomial_eval: dimension mismatch");
  }
  double v = 1.0;
  for (std::size_t j = 0; j < alpha.size(); ++j) {
    if (alpha[j] < 0) throw std::invalid_argument("monomial_eval: negative exponent");
    v *= int_pow(p[static_cast<Eigen::Index>(j)], alpha[j]);
  }
  return v;
}

double monomial_apply(OperatorTag op, std::span<const int> alpha, const Vector& p) {
  if (op == OperatorTag::Identity) return monomial_eval(alpha, p);
  if (static_cast<Eigen::Index>(alpha.size()) != p.size()) {
    throw std::invalid_argument("monomial_apply: dimension mismatch");
  }
  double sum = 0.0;
  for (std::size_t j = 0; j < alpha.size(); ++j) {
    if (alpha[j] < 2) continue;
    double term = static_cast<double>(alpha[j]) * (alpha[j] - 1);
    for (std::size_t i = 0; i < alpha.size(); ++i) {
      const int e = alpha[i] - (i == j ? 2 : 0);
      term *= int_pow(p[static_cast<Eigen::Index>(i)], e);
    }
    sum += term;
  }
  return sum;
}

}  // namespace prefd
