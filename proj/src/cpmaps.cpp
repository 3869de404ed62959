#include "cpcsys/cpmaps.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <utility>
#include <vector>

namespace cpcsys {

namespace {

constexpr double kChoiZero = 0.0;  // exact-zero test on action entries

// Union-find over component indices.
class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n) {
    std::iota(parent_.begin(), parent_.end(), std::size_t{0});
  }

  std::size_t find(std::size_t a) {
    while (parent_[a] != a) {
      parent_[a] = parent_[parent_[a]];
      a = parent_[a];
    }
    return a;
  }

  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent_[a] = b;
  }

 private:
  std::vector<std::size_t> parent_;
};

}  // namespace

CpMap::CpMap(FiniteDimCstar domain, FiniteDimCstar codomain, Eigen::MatrixXcd action)
    : domain_(std::move(domain)), codomain_(std::move(codomain)), action_(std::move(action)) {
  if (action_.rows() != codomain_.coeff_dim() || action_.cols() != domain_.coeff_dim()) {
    throw std::invalid_argument("CpMap: action matrix shape does not match the algebras");
  }
}

CpMap CpMap::identity(const FiniteDimCstar& a) {
  return CpMap(a, a, Eigen::MatrixXcd::Identity(a.coeff_dim(), a.coeff_dim()));
}

CpMap CpMap::from_unit_images(const FiniteDimCstar& domain, const FiniteDimCstar& codomain,
                              const std::function<AlgElement(int, int, int)>& fn) {
  Eigen::MatrixXcd action = Eigen::MatrixXcd::Zero(codomain.coeff_dim(), domain.coeff_dim());
  Eigen::Index col = 0;
  for (int blk = 0; blk < domain.block_count(); ++blk) {
    const int d = domain.block_dims()[blk];
    for (int row = 0; row < d; ++row) {
      for (int c = 0; c < d; ++c) {
        action.col(col++) = fn(blk, row, c).to_coeffs();
      }
    }
  }
  return CpMap(domain, codomain, std::move(action));
}

AlgElement CpMap::apply(const AlgElement& x) const {
  if (!(x.algebra() == domain_)) {
    throw std::invalid_argument("CpMap::apply: element lives in a different algebra");
  }
  return AlgElement::from_coeffs(codomain_, action_ * x.to_coeffs());
}

CpMap compose(const CpMap& g, const CpMap& f) {
  if (!(g.domain() == f.codomain())) {
    throw std::invalid_argument("compose: inner algebras do not match");
  }
  return CpMap(f.domain(), g.codomain(), g.action() * f.action());
}

CpMap amplify(const CpMap& f, int r) {
  if (r < 1) throw std::invalid_argument("amplify: r must be >= 1");
  const FiniteDimCstar amp_dom = amplify_algebra(f.domain(), r);
  const FiniteDimCstar amp_cod = amplify_algebra(f.codomain(), r);
  Eigen::MatrixXcd amp_action = Eigen::MatrixXcd::Zero(amp_cod.coeff_dim(), amp_dom.coeff_dim());

  const auto& dom_dims = f.domain().block_dims();
  const auto& cod_dims = f.codomain().block_dims();
  const Eigen::MatrixXcd& action = f.action();

  // Scatter each nonzero of the base action into all r*r cells. Column index
  // decodes as (domain block i, entry (a, b)); row index as (codomain block
  // j, entry (rr, cc)).
  for (Eigen::Index col = 0; col < action.cols(); ++col) {
    int i = 0;
    Eigen::Index rem_c = col;
    while (rem_c >= static_cast<Eigen::Index>(dom_dims[i]) * dom_dims[i]) {
      rem_c -= static_cast<Eigen::Index>(dom_dims[i]) * dom_dims[i];
      ++i;
    }
    const int d = dom_dims[i];
    const int a = static_cast<int>(rem_c) / d;
    const int b = static_cast<int>(rem_c) % d;
    for (Eigen::Index row = 0; row < action.rows(); ++row) {
      const std::complex<double> v = action(row, col);
      if (v == std::complex<double>(0.0, 0.0)) continue;
      int j = 0;
      Eigen::Index rem_r = row;
      while (rem_r >= static_cast<Eigen::Index>(cod_dims[j]) * cod_dims[j]) {
        rem_r -= static_cast<Eigen::Index>(cod_dims[j]) * cod_dims[j];
        ++j;
      }
      const int c = cod_dims[j];
      const int rr = static_cast<int>(rem_r) / c;
      const int cc = static_cast<int>(rem_r) % c;
      for (int p = 0; p < r; ++p) {
        for (int q = 0; q < r; ++q) {
          const Eigen::Index amp_row = amp_cod.coeff_offset(j) +
                                       static_cast<Eigen::Index>(p * c + rr) * (r * c) +
                                       (q * c + cc);
          const Eigen::Index amp_col = amp_dom.coeff_offset(i) +
                                       static_cast<Eigen::Index>(p * d + a) * (r * d) +
                                       (q * d + b);
          amp_action(amp_row, amp_col) = v;
        }
      }
    }
  }
  return CpMap(amp_dom, amp_cod, std::move(amp_action));
}

CpVerdict verify_cp(const CpMap& f, double tol) {
  const auto& dom_dims = f.domain().block_dims();
  const auto& cod_dims = f.codomain().block_dims();
  const Eigen::MatrixXcd& action = f.action();

  double min_eig = std::numeric_limits<double>::infinity();
  double hermiticity_defect = 0.0;

  for (int i = 0; i < f.domain().block_count(); ++i) {
    const int d = dom_dims[i];
    const Eigen::Index dom_off = f.domain().coeff_offset(i);
    for (int j = 0; j < f.codomain().block_count(); ++j) {
      const int c = cod_dims[j];
      const Eigen::Index cod_off = f.codomain().coeff_offset(j);
      const Eigen::Index dim = static_cast<Eigen::Index>(d) * c;

      // Choi(a*c + r, b*c + t) = action(cod_off + r*c + t, dom_off + a*d + b):
      // the (r, t) entry of f(E_ab). Gather the nonzero entries and group the
      // touched indices into connected components; the zero pattern is an
      // exact property of the map, so components are invariant subspaces and
      // the per-component eigensolves reproduce the full spectrum (indices
      // never touched contribute exact zero eigenvalues).
      struct Entry {
        Eigen::Index row, col;
        std::complex<double> v;
      };
      std::vector<Entry> entries;
      for (int a = 0; a < d; ++a) {
        for (int b = 0; b < d; ++b) {
          const Eigen::Index col_idx = dom_off + static_cast<Eigen::Index>(a) * d + b;
          for (int r = 0; r < c; ++r) {
            for (int t = 0; t < c; ++t) {
              const std::complex<double> v =
                  action(cod_off + static_cast<Eigen::Index>(r) * c + t, col_idx);
              if (std::abs(v.real()) <= kChoiZero && std::abs(v.imag()) <= kChoiZero) continue;
              entries.push_back({static_cast<Eigen::Index>(a) * c + r,
                                 static_cast<Eigen::Index>(b) * c + t, v});
            }
          }
        }
      }
      if (entries.empty()) {  // zero Choi block: eigenvalues all 0
        min_eig = std::min(min_eig, 0.0);
        continue;
      }

      DisjointSets sets(static_cast<std::size_t>(dim));
      std::vector<char> touched(static_cast<std::size_t>(dim), 0);
      for (const Entry& e : entries) {
        sets.unite(static_cast<std::size_t>(e.row), static_cast<std::size_t>(e.col));
        touched[static_cast<std::size_t>(e.row)] = 1;
        touched[static_cast<std::size_t>(e.col)] = 1;
      }
      bool any_untouched = false;
      for (Eigen::Index k = 0; k < dim; ++k) {
        if (!touched[static_cast<std::size_t>(k)]) {
          any_untouched = true;
          break;
        }
      }
      if (any_untouched) min_eig = std::min(min_eig, 0.0);

      // Index the components and map global indices to local positions.
      std::vector<std::size_t> comp_of(static_cast<std::size_t>(dim));
      std::vector<std::vector<Eigen::Index>> members;
      {
        std::vector<std::ptrdiff_t> comp_id(static_cast<std::size_t>(dim), -1);
        for (Eigen::Index k = 0; k < dim; ++k) {
          if (!touched[static_cast<std::size_t>(k)]) continue;
          const std::size_t root = sets.find(static_cast<std::size_t>(k));
          if (comp_id[root] < 0) {
            comp_id[root] = static_cast<std::ptrdiff_t>(members.size());
            members.emplace_back();
          }
          comp_of[static_cast<std::size_t>(k)] = static_cast<std::size_t>(comp_id[root]);
          members[static_cast<std::size_t>(comp_id[root])].push_back(k);
        }
      }
      std::vector<Eigen::Index> local(static_cast<std::size_t>(dim), 0);
      for (const auto& m : members) {
        for (std::size_t pos = 0; pos < m.size(); ++pos) {
          local[static_cast<std::size_t>(m[pos])] = static_cast<Eigen::Index>(pos);
        }
      }

      std::vector<Eigen::MatrixXcd> blocks;
      blocks.reserve(members.size());
      for (const auto& m : members) {
        blocks.emplace_back(Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(m.size()),
                                                   static_cast<Eigen::Index>(m.size())));
      }
      for (const Entry& e : entries) {
        const std::size_t comp = comp_of[static_cast<std::size_t>(e.row)];
        blocks[comp](local[static_cast<std::size_t>(e.row)],
                     local[static_cast<std::size_t>(e.col)]) = e.v;
      }

      for (const Eigen::MatrixXcd& block : blocks) {
        const double defect = (block - block.adjoint()).cwiseAbs().maxCoeff();
        hermiticity_defect = std::max(hermiticity_defect, defect);
        const Eigen::MatrixXcd herm = 0.5 * (block + block.adjoint());
        if (herm.rows() == 1) {
          min_eig = std::min(min_eig, herm(0, 0).real());
          continue;
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(herm, Eigen::EigenvaluesOnly);
        if (solver.info() != Eigen::Success) {
          throw std::runtime_error("verify_cp: eigensolver failed to converge");
        }
        min_eig = std::min(min_eig, solver.eigenvalues().minCoeff());
      }
    }
  }

  if (!std::isfinite(min_eig)) min_eig = 0.0;  // degenerate: no block pairs

  CpVerdict verdict;
  verdict.min_choi_eigenvalue = min_eig;
  verdict.is_cp = (min_eig >= -tol) && (hermiticity_defect <= tol);
  return verdict;
}

bool verify_contractive(const CpMap& f, double tol, const CpVerdict* precomputed) {
  CpVerdict verdict = precomputed ? *precomputed : verify_cp(f);
  if (!verdict.is_cp) {
    throw std::invalid_argument(
        "verify_contractive: map is not completely positive (min Choi eigenvalue " +
        std::to_string(verdict.min_choi_eigenvalue) + ")");
  }
  return operator_norm(f.apply(AlgElement::unit(f.domain()))) <= 1.0 + tol;
}

double cauchy_schwarz_defect(const CpMap& f, const AlgElement& x, const AlgElement& y,
                             const CpVerdict* precomputed) {
  CpVerdict verdict = precomputed ? *precomputed : verify_cp(f);
  if (!verdict.is_cp) {
    throw std::invalid_argument("cauchy_schwarz_defect: map is not completely positive");
  }
  const double lhs = operator_norm(f.apply(x * y));
  const double n1 = operator_norm(f.apply(x * x.adjoint()));
  const double n2 = operator_norm(f.apply(y.adjoint() * y));
  return lhs * lhs - n1 * n2;
}

}  // namespace cpcsys
