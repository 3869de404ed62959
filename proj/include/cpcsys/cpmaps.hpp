#pragma once

#include <functional>

#include "cpcsys/fdcstar.hpp"

// Linear maps between finite-dimensional C*-algebras stored as dense action
// matrices in the matrix-unit bases, with Choi-matrix complete-positivity
// verification and matrix amplification.

namespace cpcsys {

constexpr double kCpTol = 1e-10;

struct CpVerdict {
  double min_choi_eigenvalue = 0.0;
  bool is_cp = false;
};

// A linear map domain -> codomain. The action matrix has shape
// codomain.coeff_dim() x domain.coeff_dim() over the row-major coefficient
// vectorization. Instances are immutable after construction.
class CpMap {
 public:
  CpMap(FiniteDimCstar domain, FiniteDimCstar codomain, Eigen::MatrixXcd action);

  static CpMap identity(const FiniteDimCstar& a);

  // Columns from images of matrix units: fn(block, row, col) must return an
  // element of the codomain.
  static CpMap from_unit_images(const FiniteDimCstar& domain, const FiniteDimCstar& codomain,
                                const std::function<AlgElement(int, int, int)>& fn);

  const FiniteDimCstar& domain() const { return domain_; }
  const FiniteDimCstar& codomain() const { return codomain_; }
  const Eigen::MatrixXcd& action() const { return action_; }

  AlgElement apply(const AlgElement& x) const;

 private:
  FiniteDimCstar domain_;
  FiniteDimCstar codomain_;
  Eigen::MatrixXcd action_;
};

// g after f; domains must chain.
CpMap compose(const CpMap& g, const CpMap& f);

// Entrywise amplification to M_r: cell (p, q) of the domain is mapped by f
// into cell (p, q) of the codomain.
CpMap amplify(const CpMap& f, int r);

// Complete positivity via Choi matrices, one per (domain block, codomain
// block) pair in the unnormalized convention C = sum_{ab} E_{ab} (x) f(E_{ab}).
// Each Choi matrix is decomposed into connected components of its nonzero
// pattern before the eigensolve, so block-structured maps verify in time
// proportional to their true coupling, not their dimension. The reported
// minimum eigenvalue is exact across all pairs; is_cp additionally requires
// the Choi matrices to be Hermitian within tol.
CpVerdict verify_cp(const CpMap& f, double tol = kCpTol);

// norm(f(unit)) <= 1 + tol. Requires a completely positive map: when a
// precomputed verdict is not supplied, verify_cp runs first, and a non-cp map
// raises std::invalid_argument.
bool verify_contractive(const CpMap& f, double tol, const CpVerdict* precomputed = nullptr);

// norm(f(xy))^2 - norm(f(xx*)) * norm(f(y*y)); nonpositive (up to roundoff)
// for completely positive f. Same cp precondition as verify_contractive.
double cauchy_schwarz_defect(const CpMap& f, const AlgElement& x, const AlgElement& y,
                             const CpVerdict* precomputed = nullptr);

}  // namespace cpcsys
