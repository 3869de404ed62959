#include "cpcsys/groupalg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <utility>
#include <vector>

#include "cpcsys/fdcstar.hpp"

namespace cpcsys {

GroupAlgebraElement::GroupAlgebraElement(Group group) : group_(std::move(group)) {}

GroupAlgebraElement GroupAlgebraElement::zero(const Group& g) { return GroupAlgebraElement(g); }

GroupAlgebraElement GroupAlgebraElement::delta(const Group& g, const GroupElement& s) {
  g.require_element(s, "delta");
  GroupAlgebraElement a(g);
  a.coeffs_.emplace(s, std::complex<double>(1.0, 0.0));
  return a;
}

GroupAlgebraElement GroupAlgebraElement::unit(const Group& g) { return delta(g, g.identity()); }

std::complex<double> GroupAlgebraElement::coeff(const GroupElement& s) const {
  auto it = coeffs_.find(s);
  return it == coeffs_.end() ? std::complex<double>(0.0, 0.0) : it->second;
}

void GroupAlgebraElement::set_coeff(const GroupElement& s, std::complex<double> c) {
  group_.require_element(s, "set_coeff");
  if (std::abs(c) < kCoeffPruneTol) {
    coeffs_.erase(s);
  } else {
    coeffs_[s] = c;
  }
}

void GroupAlgebraElement::add_coeff(const GroupElement& s, std::complex<double> c) {
  set_coeff(s, coeff(s) + c);
}

namespace {

void require_same_group(const GroupAlgebraElement& a, const GroupAlgebraElement& b,
                        const char* where) {
  if (!(a.group() == b.group())) {
    throw std::invalid_argument(std::string(where) + ": elements live over different groups");
  }
}

}  // namespace

GroupAlgebraElement operator+(const GroupAlgebraElement& a, const GroupAlgebraElement& b) {
  require_same_group(a, b, "operator+");
  GroupAlgebraElement out = a;
  for (const auto& [g, c] : b.coeffs()) out.add_coeff(g, c);
  return out;
}

GroupAlgebraElement operator-(const GroupAlgebraElement& a, const GroupAlgebraElement& b) {
  require_same_group(a, b, "operator-");
  GroupAlgebraElement out = a;
  for (const auto& [g, c] : b.coeffs()) out.add_coeff(g, -c);
  return out;
}

GroupAlgebraElement operator*(std::complex<double> c, const GroupAlgebraElement& a) {
  GroupAlgebraElement out = GroupAlgebraElement::zero(a.group());
  for (const auto& [g, v] : a.coeffs()) out.set_coeff(g, c * v);
  return out;
}

GroupAlgebraElement convolve(const GroupAlgebraElement& a, const GroupAlgebraElement& b) {
  require_same_group(a, b, "convolve");
  GroupAlgebraElement out = GroupAlgebraElement::zero(a.group());
  const Group& grp = a.group();
  for (const auto& [g, ca] : a.coeffs()) {
    for (const auto& [h, cb] : b.coeffs()) {
      out.add_coeff(grp.multiply(g, h), ca * cb);
    }
  }
  return out;
}

GroupAlgebraElement involute(const GroupAlgebraElement& a) {
  GroupAlgebraElement out = GroupAlgebraElement::zero(a.group());
  for (const auto& [g, c] : a.coeffs()) {
    out.set_coeff(a.group().inverse(g), std::conj(c));
  }
  return out;
}

namespace {

NormEnclosure lattice_norm(const GroupAlgebraElement& a, int grid_factor) {
  const int d = a.group().lattice_dim();

  // Translation-minimal degree per axis: translating the support multiplies
  // p by a unimodular character, so |p| and the norm are unchanged while the
  // Bernstein degree drops to ceil(diameter / 2).
  std::vector<std::int64_t> lo(static_cast<std::size_t>(d)), hi(static_cast<std::size_t>(d));
  bool first = true;
  for (const auto& [g, c] : a.coeffs()) {
    (void)c;
    for (int j = 0; j < d; ++j) {
      const std::int64_t v = g[static_cast<std::size_t>(j)];
      if (first) {
        lo[static_cast<std::size_t>(j)] = v;
        hi[static_cast<std::size_t>(j)] = v;
      } else {
        lo[static_cast<std::size_t>(j)] = std::min(lo[static_cast<std::size_t>(j)], v);
        hi[static_cast<std::size_t>(j)] = std::max(hi[static_cast<std::size_t>(j)], v);
      }
    }
    first = false;
  }
  std::int64_t degree = 0;
  for (int j = 0; j < d; ++j) {
    const std::int64_t diam = hi[static_cast<std::size_t>(j)] - lo[static_cast<std::size_t>(j)];
    degree = std::max(degree, (diam + 1) / 2);
  }

  const std::int64_t m =
      std::max<std::int64_t>(16, static_cast<std::int64_t>(grid_factor) * degree);
  const double slack_arg =
      static_cast<double>(d) * std::numbers::pi * static_cast<double>(degree) /
      static_cast<double>(m);
  if (slack_arg >= 1.0) {
    throw std::invalid_argument(
        "reduced_norm: grid_factor too small for this support (d*pi*N/M >= 1); "
        "increase grid_factor");
  }

  // Max of |p| over the uniform grid, odometer over d axes.
  const double step = 2.0 * std::numbers::pi / static_cast<double>(m);
  std::vector<std::int64_t> idx(static_cast<std::size_t>(d), 0);
  double grid_max = 0.0;
  while (true) {
    std::complex<double> p(0.0, 0.0);
    for (const auto& [g, c] : a.coeffs()) {
      double phase = 0.0;
      for (int j = 0; j < d; ++j) {
        phase += static_cast<double>(g[static_cast<std::size_t>(j)]) *
                 (static_cast<double>(idx[static_cast<std::size_t>(j)]) * step);
      }
      p += c * std::polar(1.0, phase);
    }
    grid_max = std::max(grid_max, std::abs(p));

    int axis = 0;
    while (axis < d) {
      if (++idx[static_cast<std::size_t>(axis)] < m) break;
      idx[static_cast<std::size_t>(axis)] = 0;
      ++axis;
    }
    if (axis == d) break;
  }

  return {grid_max, grid_max / (1.0 - slack_arg)};
}

NormEnclosure finite_norm(const GroupAlgebraElement& a) {
  const int n = a.group().order();
  Eigen::MatrixXcd rep = Eigen::MatrixXcd::Zero(n, n);
  const Group& grp = a.group();
  // Column j of lambda(g) sends e_j to e_{g.j}: entry (i, j) is the
  // coefficient at the element i * j^{-1}.
  for (const auto& [g, c] : a.coeffs()) {
    for (int j = 0; j < n; ++j) {
      const GroupElement gj = grp.multiply(g, GroupElement{j});
      rep(gj[0], j) += c;
    }
  }
  const double norm = operator_norm(rep);
  return {norm, norm};
}

}  // namespace

NormEnclosure reduced_norm(const GroupAlgebraElement& a, int grid_factor) {
  if (grid_factor < 1) {
    throw std::invalid_argument("reduced_norm: grid_factor must be >= 1");
  }
  if (a.coeffs().empty()) return {0.0, 0.0};
  if (a.group().is_lattice()) return lattice_norm(a, grid_factor);
  return finite_norm(a);
}

NormEnclosure distance(const GroupAlgebraElement& a, const GroupAlgebraElement& b,
                       int grid_factor) {
  require_same_group(a, b, "distance");
  return reduced_norm(a - b, grid_factor);
}

}  // namespace cpcsys
