#pragma once

#include <complex>
#include <map>

#include "cpcsys/groups.hpp"

// Finitely supported elements of the group algebra C[G] with convolution,
// involution, and a certified enclosure of the reduced-C*-norm (the operator
// norm under the left regular representation).

namespace cpcsys {

// Coefficients with modulus below this are dropped from supports.
constexpr double kCoeffPruneTol = 1e-15;

constexpr int kDefaultGridFactor = 64;

// Certified two-sided bound: lower <= true norm <= upper.
struct NormEnclosure {
  double lower = 0.0;
  double upper = 0.0;
};

class GroupAlgebraElement {
 public:
  using CoeffMap = std::map<GroupElement, std::complex<double>>;

  explicit GroupAlgebraElement(Group group);

  static GroupAlgebraElement zero(const Group& g);
  // Coefficient 1 at s (lambda_s as an algebra element).
  static GroupAlgebraElement delta(const Group& g, const GroupElement& s);
  // delta at the group identity: the convolution unit.
  static GroupAlgebraElement unit(const Group& g);

  const Group& group() const { return group_; }
  const CoeffMap& coeffs() const { return coeffs_; }
  std::size_t support_size() const { return coeffs_.size(); }

  // Zero for elements outside the support.
  std::complex<double> coeff(const GroupElement& s) const;
  // Inserts, overwrites, or (for moduli below kCoeffPruneTol) erases.
  void set_coeff(const GroupElement& s, std::complex<double> c);
  void add_coeff(const GroupElement& s, std::complex<double> c);

 private:
  Group group_;
  CoeffMap coeffs_;
};

GroupAlgebraElement operator+(const GroupAlgebraElement& a, const GroupAlgebraElement& b);
GroupAlgebraElement operator-(const GroupAlgebraElement& a, const GroupAlgebraElement& b);
GroupAlgebraElement operator*(std::complex<double> c, const GroupAlgebraElement& a);

// (a * b)(g) = sum_h a(h) b(h^{-1} g).
GroupAlgebraElement convolve(const GroupAlgebraElement& a, const GroupAlgebraElement& b);

// a*(g) = conj(a(g^{-1})); an isometry of the reduced norm.
GroupAlgebraElement involute(const GroupAlgebraElement& a);

// Certified enclosure of the reduced-C*-norm.
//
// Integer lattices: the norm is the sup over the torus of the trigonometric
// polynomial p(theta) = sum_g c_g e^{i g.theta}. The lower bound is the max of
// |p| over a uniform grid with M = max(16, grid_factor * N) points per axis;
// the upper bound is lower / (1 - d*pi*N/M), valid because Bernstein's
// inequality bounds each partial derivative of p by N * sup|p|. N is the
// translation-minimal degree per axis (|p| is invariant under translating the
// support, so N_j = ceil(diameter_j / 2)); in particular singleton supports
// have N = 0 and certify exactly.
//
// Finite groups: exact spectral norm of the |G| x |G| left-regular-
// representation matrix; lower = upper.
//
// Throws std::invalid_argument when grid_factor leaves d*pi*N/M >= 1 (the
// Bernstein bound then certifies nothing).
NormEnclosure reduced_norm(const GroupAlgebraElement& a, int grid_factor = kDefaultGridFactor);

// reduced_norm(a - b).
NormEnclosure distance(const GroupAlgebraElement& a, const GroupAlgebraElement& b,
                       int grid_factor = kDefaultGridFactor);

}  // namespace cpcsys
