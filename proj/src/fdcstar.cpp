#include "cpcsys/fdcstar.hpp"

#include <sstream>
#include <stdexcept>

namespace cpcsys {

FiniteDimCstar::FiniteDimCstar(std::vector<int> block_dims) : dims_(std::move(block_dims)) {
  if (dims_.empty()) throw std::invalid_argument("FiniteDimCstar: no blocks");
  offsets_.reserve(dims_.size());
  for (int d : dims_) {
    if (d < 1) throw std::invalid_argument("FiniteDimCstar: block dims must be >= 1");
    offsets_.push_back(coeff_dim_);
    coeff_dim_ += d * d;
  }
}

std::string FiniteDimCstar::describe() const {
  std::ostringstream os;
  for (std::size_t i = 0; i < dims_.size(); ++i) {
    if (i) os << " (+) ";
    os << "M_" << dims_[i];
  }
  return os.str();
}

AlgElement::AlgElement(FiniteDimCstar algebra, std::vector<Eigen::MatrixXcd> blocks)
    : algebra_(std::move(algebra)), blocks_(std::move(blocks)) {
  if (static_cast<int>(blocks_.size()) != algebra_.block_count())
    throw std::invalid_argument("AlgElement: wrong number of blocks");
  for (int b = 0; b < algebra_.block_count(); ++b) {
    const int d = algebra_.block_dim(b);
    if (blocks_[static_cast<std::size_t>(b)].rows() != d ||
        blocks_[static_cast<std::size_t>(b)].cols() != d)
      throw std::invalid_argument("AlgElement: block shape mismatch");
  }
}

AlgElement AlgElement::zero(const FiniteDimCstar& a) {
  std::vector<Eigen::MatrixXcd> blocks;
  blocks.reserve(static_cast<std::size_t>(a.block_count()));
  for (int b = 0; b < a.block_count(); ++b)
    blocks.emplace_back(Eigen::MatrixXcd::Zero(a.block_dim(b), a.block_dim(b)));
  return AlgElement(a, std::move(blocks));
}

AlgElement AlgElement::unit(const FiniteDimCstar& a) {
  std::vector<Eigen::MatrixXcd> blocks;
  blocks.reserve(static_cast<std::size_t>(a.block_count()));
  for (int b = 0; b < a.block_count(); ++b)
    blocks.emplace_back(Eigen::MatrixXcd::Identity(a.block_dim(b), a.block_dim(b)));
  return AlgElement(a, std::move(blocks));
}

AlgElement AlgElement::matrix_unit(const FiniteDimCstar& a, int block, int row, int col) {
  if (block < 0 || block >= a.block_count())
    throw std::out_of_range("matrix_unit: block out of range");
  const int d = a.block_dim(block);
  if (row < 0 || row >= d || col < 0 || col >= d)
    throw std::out_of_range("matrix_unit: entry out of range");
  AlgElement x = zero(a);
  x.block(block)(row, col) = 1.0;
  return x;
}

AlgElement AlgElement::adjoint() const {
  std::vector<Eigen::MatrixXcd> blocks;
  blocks.reserve(blocks_.size());
  for (const auto& m : blocks_) blocks.emplace_back(m.adjoint());
  return AlgElement(algebra_, std::move(blocks));
}

Eigen::VectorXcd AlgElement::to_coeffs() const {
  Eigen::VectorXcd v(algebra_.coeff_dim());
  for (int b = 0; b < algebra_.block_count(); ++b) {
    const int d = algebra_.block_dim(b);
    const int off = algebra_.coeff_offset(b);
    const auto& m = blocks_[static_cast<std::size_t>(b)];
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) v(off + i * d + j) = m(i, j);
  }
  return v;
}

AlgElement AlgElement::from_coeffs(const FiniteDimCstar& a, const Eigen::VectorXcd& v) {
  if (v.size() != a.coeff_dim()) throw std::invalid_argument("from_coeffs: wrong length");
  AlgElement x = zero(a);
  for (int b = 0; b < a.block_count(); ++b) {
    const int d = a.block_dim(b);
    const int off = a.coeff_offset(b);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) x.block(b)(i, j) = v(off + i * d + j);
  }
  return x;
}

namespace {

void require_same_algebra(const AlgElement& x, const AlgElement& y, const char* op) {
  if (x.algebra() != y.algebra())
    throw std::invalid_argument(std::string(op) + ": algebra mismatch");
}

}  // namespace

AlgElement operator+(const AlgElement& x, const AlgElement& y) {
  require_same_algebra(x, y, "operator+");
  std::vector<Eigen::MatrixXcd> blocks;
  blocks.reserve(static_cast<std::size_t>(x.algebra().block_count()));
  for (int b = 0; b < x.algebra().block_count(); ++b) blocks.emplace_back(x.block(b) + y.block(b));
  return AlgElement(x.algebra(), std::move(blocks));
}

AlgElement operator-(const AlgElement& x, const AlgElement& y) {
  require_same_algebra(x, y, "operator-");
  std::vector<Eigen::MatrixXcd> blocks;
  blocks.reserve(static_cast<std::size_t>(x.algebra().block_count()));
  for (int b = 0; b < x.algebra().block_count(); ++b) blocks.emplace_back(x.block(b) - y.block(b));
  return AlgElement(x.algebra(), std::move(blocks));
}

AlgElement operator*(const AlgElement& x, const AlgElement& y) {
  require_same_algebra(x, y, "operator*");
  std::vector<Eigen::MatrixXcd> blocks;
  blocks.reserve(static_cast<std::size_t>(x.algebra().block_count()));
  for (int b = 0; b < x.algebra().block_count(); ++b) blocks.emplace_back(x.block(b) * y.block(b));
  return AlgElement(x.algebra(), std::move(blocks));
}

AlgElement operator*(std::complex<double> c, const AlgElement& x) {
  std::vector<Eigen::MatrixXcd> blocks;
  blocks.reserve(static_cast<std::size_t>(x.algebra().block_count()));
  for (int b = 0; b < x.algebra().block_count(); ++b) blocks.emplace_back(c * x.block(b));
  return AlgElement(x.algebra(), std::move(blocks));
}

double operator_norm(const Eigen::MatrixXcd& m) {
  if (m.rows() == 0 || m.cols() == 0) return 0.0;
  if (m.rows() == 1 && m.cols() == 1) return std::abs(m(0, 0));
  // Largest singular value via the Gram matrix; cheaper than a full SVD and
  // exact enough at the tolerances used here.
  Eigen::MatrixXcd gram = m.adjoint() * m;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(gram, Eigen::EigenvaluesOnly);
  const double top = es.eigenvalues()(gram.rows() - 1);
  return top <= 0.0 ? 0.0 : std::sqrt(top);
}

double operator_norm(const AlgElement& x) {
  double worst = 0.0;
  for (int b = 0; b < x.algebra().block_count(); ++b)
    worst = std::max(worst, operator_norm(x.block(b)));
  return worst;
}

double min_hermitian_eigenvalue(const AlgElement& x) {
  double lo = std::numeric_limits<double>::infinity();
  for (int b = 0; b < x.algebra().block_count(); ++b) {
    Eigen::MatrixXcd h = 0.5 * (x.block(b) + x.block(b).adjoint());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h, Eigen::EigenvaluesOnly);
    lo = std::min(lo, es.eigenvalues()(0));
  }
  return lo;
}

bool is_positive(const AlgElement& x, double tol) {
  if (operator_norm(x - x.adjoint()) > tol) return false;
  return min_hermitian_eigenvalue(x) >= -tol;
}

FiniteDimCstar amplify_algebra(const FiniteDimCstar& a, int r) {
  if (r < 1) throw std::invalid_argument("amplify_algebra: r must be >= 1");
  std::vector<int> dims;
  dims.reserve(static_cast<std::size_t>(a.block_count()));
  for (int d : a.block_dims()) dims.push_back(r * d);
  return FiniteDimCstar(std::move(dims));
}

AlgElement amplify_elem(const AlgElement& x, int r, const Eigen::MatrixXcd& pattern) {
  if (r < 1) throw std::invalid_argument("amplify_elem: r must be >= 1");
  if (pattern.rows() != r || pattern.cols() != r)
    throw std::invalid_argument("amplify_elem: pattern must be r x r");
  FiniteDimCstar amp = amplify_algebra(x.algebra(), r);
  AlgElement out = AlgElement::zero(amp);
  for (int b = 0; b < x.algebra().block_count(); ++b) {
    const int d = x.algebra().block_dim(b);
    for (int p = 0; p < r; ++p)
      for (int q = 0; q < r; ++q)
        out.block(b).block(p * d, q * d, d, d) = pattern(p, q) * x.block(b);
  }
  return out;
}

AlgElement amplify_elem(const AlgElement& x, int r) {
  return amplify_elem(x, r, Eigen::MatrixXcd::Identity(r, r));
}

AlgElement assemble_amplified(const FiniteDimCstar& base, int r,
                              const std::vector<std::vector<AlgElement>>& cells) {
  if (r < 1) throw std::invalid_argument("assemble_amplified: r must be >= 1");
  if (static_cast<int>(cells.size()) != r)
    throw std::invalid_argument("assemble_amplified: grid must be r x r");
  FiniteDimCstar amp = amplify_algebra(base, r);
  AlgElement out = AlgElement::zero(amp);
  for (int p = 0; p < r; ++p) {
    if (static_cast<int>(cells[static_cast<std::size_t>(p)].size()) != r)
      throw std::invalid_argument("assemble_amplified: grid must be r x r");
    for (int q = 0; q < r; ++q) {
      const AlgElement& cell = cells[static_cast<std::size_t>(p)][static_cast<std::size_t>(q)];
      if (cell.algebra() != base)
        throw std::invalid_argument("assemble_amplified: cell algebra mismatch");
      for (int b = 0; b < base.block_count(); ++b) {
        const int d = base.block_dim(b);
        out.block(b).block(p * d, q * d, d, d) = cell.block(b);
      }
    }
  }
  return out;
}

std::vector<std::vector<AlgElement>> amplified_cells(const FiniteDimCstar& base, int r,
                                                     const AlgElement& x) {
  if (x.algebra() != amplify_algebra(base, r))
    throw std::invalid_argument("amplified_cells: element is not in M_r(base)");
  std::vector<std::vector<AlgElement>> cells(
      static_cast<std::size_t>(r), std::vector<AlgElement>(static_cast<std::size_t>(r), AlgElement::zero(base)));
  for (int p = 0; p < r; ++p)
    for (int q = 0; q < r; ++q)
      for (int b = 0; b < base.block_count(); ++b) {
        const int d = base.block_dim(b);
        cells[static_cast<std::size_t>(p)][static_cast<std::size_t>(q)].block(b) =
            x.block(b).block(p * d, q * d, d, d);
      }
  return cells;
}

}  // namespace cpcsys
