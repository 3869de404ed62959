#include "cpcsys/folner_system.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>
#include <utility>

namespace cpcsys {

namespace {

std::vector<FiniteDimCstar> stage_algebras(const std::vector<FolnerSet>& stages) {
  std::vector<FiniteDimCstar> out;
  out.reserve(stages.size());
  for (const FolnerSet& f : stages) {
    out.emplace_back(std::vector<int>{static_cast<int>(f.size())});
  }
  return out;
}

}  // namespace

ApproximationSystem::ApproximationSystem(Group group, std::vector<FolnerSet> stages,
                                         std::optional<SummabilityCertificate> certificate)
    : group_(std::move(group)),
      stages_(std::move(stages)),
      algebras_(stage_algebras(stages_)),
      certificate_(std::move(certificate)) {
  if (stages_.empty()) {
    throw std::invalid_argument("ApproximationSystem: at least one stage is required");
  }
}

ApproximationSystem ApproximationSystem::from_certified(const FolnerSequence& seq,
                                                        SummabilityCertificate certificate) {
  std::vector<FolnerSet> stages;
  stages.reserve(certificate.indices.size());
  for (std::size_t idx : certificate.indices) {
    if (idx >= seq.sets.size()) {
      throw std::out_of_range("from_certified: certificate index beyond the sequence");
    }
    stages.push_back(seq.sets[idx]);
  }
  return ApproximationSystem(seq.group, std::move(stages), std::move(certificate));
}

ApproximationSystem ApproximationSystem::from_sequence(const FolnerSequence& seq) {
  return ApproximationSystem(seq.group, seq.sets);
}

ApproximationSystem ApproximationSystem::full_group_stages(const Group& finite_group,
                                                           std::size_t stage_count) {
  if (finite_group.is_lattice()) {
    throw std::invalid_argument("full_group_stages: group must be finite");
  }
  if (stage_count == 0) {
    throw std::invalid_argument("full_group_stages: need at least one stage");
  }
  std::vector<GroupElement> all;
  all.reserve(static_cast<std::size_t>(finite_group.order()));
  for (int i = 0; i < finite_group.order(); ++i) all.push_back(GroupElement{i});
  FolnerSet full(finite_group, all);
  return ApproximationSystem(finite_group, std::vector<FolnerSet>(stage_count, full));
}

const FolnerSet& ApproximationSystem::stage(std::size_t n) const {
  if (n >= stages_.size()) throw std::out_of_range("ApproximationSystem: stage out of range");
  return stages_[n];
}

const FiniteDimCstar& ApproximationSystem::algebra(std::size_t n) const {
  if (n >= algebras_.size()) throw std::out_of_range("ApproximationSystem: stage out of range");
  return algebras_[n];
}

std::string ApproximationSystem::describe() const {
  std::ostringstream os;
  if (group_.is_lattice()) {
    os << "Folner system over Z^" << group_.lattice_dim();
  } else {
    os << "Folner system over a finite group of order " << group_.order();
  }
  os << ", " << stages_.size() << " stages, top window " << stages_.back().size();
  return os.str();
}

AlgElement psi(const ApproximationSystem& sys, std::size_t n, const GroupAlgebraElement& a) {
  if (!(a.group() == sys.group())) {
    throw std::invalid_argument("psi: element lives over a different group");
  }
  const FolnerSet& f = sys.stage(n);
  const Eigen::Index dim = static_cast<Eigen::Index>(f.size());
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
  // psi_n(lambda_s) = sum_{r in F cap sF} e_{r, s^{-1}r}: place coefficient
  // a(s) at entry (index(s h), index(h)); the writes are collision-free
  // because s is determined by the entry's row and column.
  for (const auto& [s, c] : a.coeffs()) {
    for (std::size_t j = 0; j < f.size(); ++j) {
      const GroupElement r = sys.group().multiply(s, f.element(j));
      if (auto i = f.index_of(r)) {
        m(static_cast<Eigen::Index>(*i), static_cast<Eigen::Index>(j)) += c;
      }
    }
  }
  return AlgElement(sys.algebra(n), {std::move(m)});
}

GroupAlgebraElement phi(const ApproximationSystem& sys, std::size_t n, const AlgElement& x) {
  const FolnerSet& f = sys.stage(n);
  if (!(x.algebra() == sys.algebra(n))) {
    throw std::invalid_argument("phi: element lives in a different algebra");
  }
  // Sum entries per quotient g h^{-1} first; a single division by |F| keeps
  // integer-weighted sums (unit, psi(delta_s)) exact.
  std::unordered_map<GroupElement, std::complex<double>, GroupElementHash> acc;
  const Eigen::MatrixXcd& m = x.block(0);
  for (std::size_t i = 0; i < f.size(); ++i) {
    for (std::size_t j = 0; j < f.size(); ++j) {
      const std::complex<double> v =
          m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      if (v == std::complex<double>(0.0, 0.0)) continue;
      acc[sys.group().multiply(f.element(i), sys.group().inverse(f.element(j)))] += v;
    }
  }
  GroupAlgebraElement out = GroupAlgebraElement::zero(sys.group());
  const double card = static_cast<double>(f.size());
  for (const auto& [s, total] : acc) out.set_coeff(s, total / card);
  return out;
}

double phi_psi_scalar(const ApproximationSystem& sys, std::size_t m, const GroupElement& s) {
  sys.group().require_element(s, "phi_psi_scalar");
  const FolnerSet& f = sys.stage(m);
  std::size_t overlap = 0;
  for (const GroupElement& h : f.elements()) {
    if (f.contains(sys.group().multiply(s, h))) ++overlap;
  }
  return static_cast<double>(overlap) / static_cast<double>(f.size());
}

CpMap rho_step(const ApproximationSystem& sys, std::size_t n) {
  const FolnerSet& dom_f = sys.stage(n);
  const FolnerSet& cod_f = sys.stage(n + 1);
  const FiniteDimCstar& dom = sys.algebra(n);
  const FiniteDimCstar& cod = sys.algebra(n + 1);
  const std::size_t d = dom_f.size();
  const std::size_t cd = cod_f.size();
  Eigen::MatrixXcd action = Eigen::MatrixXcd::Zero(cod.coeff_dim(), dom.coeff_dim());
  const double weight = 1.0 / static_cast<double>(d);
  for (std::size_t a = 0; a < d; ++a) {
    for (std::size_t b = 0; b < d; ++b) {
      const Eigen::Index col = static_cast<Eigen::Index>(a * d + b);
      const GroupElement s =
          sys.group().multiply(dom_f.element(a), sys.group().inverse(dom_f.element(b)));
      const GroupElement s_inv = sys.group().inverse(s);
      for (std::size_t rj = 0; rj < cd; ++rj) {
        const GroupElement t = sys.group().multiply(s_inv, cod_f.element(rj));
        if (auto tj = cod_f.index_of(t)) {
          action(static_cast<Eigen::Index>(rj * cd + *tj), col) = weight;
        }
      }
    }
  }
  return CpMap(dom, cod, std::move(action));
}

AlgElement apply_rho_step(const ApproximationSystem& sys, std::size_t n, const AlgElement& x) {
  return psi(sys, n + 1, phi(sys, n, x));
}

AlgElement psi_embedding(const ApproximationSystem& sys, const GroupAlgebraElement& a,
                         std::size_t n) {
  return psi(sys, n, a);
}

CpcSystem::CpcSystem(std::vector<FiniteDimCstar> algebras, std::vector<CpMap> steps)
    : algebras_(std::move(algebras)),
      steps_(std::move(steps)),
      memo_mutex_(std::make_unique<std::mutex>()),
      prefix_memo_(algebras_.size()) {}

const FiniteDimCstar& CpcSystem::algebra(std::size_t n) const {
  if (n >= algebras_.size()) throw std::out_of_range("CpcSystem: stage out of range");
  return algebras_[n];
}

const CpMap& CpcSystem::step(std::size_t n) const {
  if (n >= steps_.size()) throw std::out_of_range("CpcSystem: step out of range");
  return steps_[n];
}

CpMap CpcSystem::rho(std::size_t m, std::size_t n) const {
  if (m >= algebras_.size()) throw std::out_of_range("CpcSystem: stage out of range");
  if (n > m) throw std::invalid_argument("CpcSystem::rho: requires n <= m");
  if (n == m) return CpMap::identity(algebras_[n]);
  if (n == 0) {
    std::lock_guard<std::mutex> lock(*memo_mutex_);
    if (!prefix_memo_[0]) prefix_memo_[0] = CpMap::identity(algebras_[0]);
    std::size_t first_missing = 1;
    while (first_missing <= m && prefix_memo_[first_missing]) ++first_missing;
    for (std::size_t i = first_missing; i <= m; ++i) {
      prefix_memo_[i] = compose(steps_[i - 1], *prefix_memo_[i - 1]);
    }
    return *prefix_memo_[m];
  }
  CpMap acc = steps_[n];
  for (std::size_t i = n + 1; i < m; ++i) acc = compose(steps_[i], acc);
  return acc;
}

AlgElement CpcSystem::apply_rho(std::size_t m, std::size_t n, const AlgElement& x) const {
  if (m >= algebras_.size()) throw std::out_of_range("CpcSystem: stage out of range");
  if (n > m) throw std::invalid_argument("CpcSystem::apply_rho: requires n <= m");
  AlgElement y = x;
  for (std::size_t i = n; i < m; ++i) y = steps_[i].apply(y);
  return y;
}

std::string CpcSystem::describe() const {
  std::ostringstream os;
  os << "cpc system";
  for (std::size_t i = 0; i < algebras_.size(); ++i) {
    os << (i == 0 ? " " : " -> ") << algebras_[i].describe();
    if (i >= 4 && algebras_.size() > 6) {
      os << " -> ... -> " << algebras_.back().describe();
      break;
    }
  }
  return os.str();
}

CpcSystem build_cpc_from_maps(std::vector<FiniteDimCstar> algebras, std::vector<CpMap> steps) {
  if (algebras.empty()) {
    throw std::invalid_argument("build_cpc_from_maps: need at least one algebra");
  }
  if (steps.size() + 1 != algebras.size()) {
    throw std::invalid_argument("build_cpc_from_maps: need exactly one step between stages");
  }
  for (std::size_t n = 0; n < steps.size(); ++n) {
    if (!(steps[n].domain() == algebras[n]) || !(steps[n].codomain() == algebras[n + 1])) {
      throw std::invalid_argument("build_cpc_from_maps: step " + std::to_string(n) +
                                  " does not connect stage " + std::to_string(n) + " to " +
                                  std::to_string(n + 1));
    }
    const CpVerdict verdict = verify_cp(steps[n], kStepVerifyTol);
    if (!verdict.is_cp) {
      throw std::invalid_argument(
          "build_cpc_from_maps: step " + std::to_string(n) +
          " is not completely positive (min Choi eigenvalue " +
          std::to_string(verdict.min_choi_eigenvalue) + ")");
    }
    if (!verify_contractive(steps[n], kStepVerifyTol, &verdict)) {
      throw std::invalid_argument("build_cpc_from_maps: step " + std::to_string(n) +
                                  " is not contractive");
    }
  }
  return CpcSystem(std::move(algebras), std::move(steps));
}

CpcSystem build_cpc(const ApproximationSystem& sys, std::optional<std::size_t> max_stage) {
  std::size_t count = sys.stage_count();
  if (max_stage) count = std::min(count, *max_stage + 1);
  std::vector<FiniteDimCstar> algebras;
  std::vector<CpMap> steps;
  algebras.reserve(count);
  steps.reserve(count - 1);
  for (std::size_t n = 0; n < count; ++n) algebras.push_back(sys.algebra(n));
  for (std::size_t n = 0; n + 1 < count; ++n) steps.push_back(rho_step(sys, n));
  return build_cpc_from_maps(std::move(algebras), std::move(steps));
}

CpcSystem af_doubling_system(std::size_t stage_count) {
  if (stage_count == 0) {
    throw std::invalid_argument("af_doubling_system: need at least one stage");
  }
  std::vector<FiniteDimCstar> algebras;
  algebras.reserve(stage_count);
  int dim = 1;
  for (std::size_t n = 0; n < stage_count; ++n) {
    algebras.emplace_back(std::vector<int>{dim});
    if (n + 1 < stage_count) dim *= 2;
  }
  std::vector<CpMap> steps;
  steps.reserve(stage_count - 1);
  for (std::size_t n = 0; n + 1 < stage_count; ++n) {
    const FiniteDimCstar& dom = algebras[n];
    const FiniteDimCstar& cod = algebras[n + 1];
    const int d = dom.block_dims()[0];
    steps.push_back(CpMap::from_unit_images(dom, cod, [&](int, int row, int col) {
      AlgElement img = AlgElement::zero(cod);
      img.block(0)(row, col) = 1.0;
      img.block(0)(d + row, d + col) = 1.0;
      return img;
    }));
  }
  return build_cpc_from_maps(std::move(algebras), std::move(steps));
}

SystemHandle::SystemHandle(std::shared_ptr<const ApproximationSystem> sys)
    : approx_(std::move(sys)) {
  if (!approx_) throw std::invalid_argument("SystemHandle: null system");
}

SystemHandle::SystemHandle(std::shared_ptr<const CpcSystem> sys) : cpc_(std::move(sys)) {
  if (!cpc_) throw std::invalid_argument("SystemHandle: null system");
}

SystemHandle SystemHandle::view(const ApproximationSystem& sys) {
  return SystemHandle(std::shared_ptr<const ApproximationSystem>(
      std::shared_ptr<const ApproximationSystem>(), &sys));
}

SystemHandle SystemHandle::view(const CpcSystem& sys) {
  return SystemHandle(
      std::shared_ptr<const CpcSystem>(std::shared_ptr<const CpcSystem>(), &sys));
}

std::size_t SystemHandle::stage_count() const {
  return approx_ ? approx_->stage_count() : cpc_->stage_count();
}

const FiniteDimCstar& SystemHandle::algebra(std::size_t n) const {
  return approx_ ? approx_->algebra(n) : cpc_->algebra(n);
}

AlgElement SystemHandle::apply_rho(std::size_t m, std::size_t n, const AlgElement& x) const {
  if (m >= stage_count()) throw std::out_of_range("SystemHandle: stage out of range");
  if (n > m) throw std::invalid_argument("SystemHandle::apply_rho: requires n <= m");
  if (cpc_) return cpc_->apply_rho(m, n, x);
  AlgElement y = x;
  for (std::size_t i = n; i < m; ++i) y = apply_rho_step(*approx_, i, y);
  return y;
}

AlgElement SystemHandle::apply_rho_amplified(std::size_t m, std::size_t n,
                                             const AlgElement& x_amp, int r) const {
  if (r < 1) throw std::invalid_argument("apply_rho_amplified: r must be >= 1");
  if (r == 1) return apply_rho(m, n, x_amp);
  const FiniteDimCstar& dom = algebra(n);
  const FiniteDimCstar& cod = algebra(m);
  std::vector<std::vector<AlgElement>> cells = amplified_cells(dom, r, x_amp);
  std::vector<std::vector<AlgElement>> images(
      static_cast<std::size_t>(r),
      std::vector<AlgElement>(static_cast<std::size_t>(r), AlgElement::zero(cod)));
  for (int p = 0; p < r; ++p) {
    for (int q = 0; q < r; ++q) {
      images[static_cast<std::size_t>(p)][static_cast<std::size_t>(q)] =
          apply_rho(m, n, cells[static_cast<std::size_t>(p)][static_cast<std::size_t>(q)]);
    }
  }
  return assemble_amplified(cod, r, images);
}

std::string SystemHandle::describe() const {
  return approx_ ? approx_->describe() : cpc_->describe();
}

SummabilityReport check_summable(const ApproximationSystem& sys,
                                 const std::vector<std::size_t>& indices,
                                 const std::vector<double>& eps,
                                 std::optional<int> grid_factor) {
  if (indices.size() != eps.size()) {
    throw std::invalid_argument("check_summable: indices and eps must have equal length");
  }
  for (std::size_t i = 0; i < indices.size(); ++i) {
    if (indices[i] >= sys.stage_count()) {
      throw std::out_of_range("check_summable: index beyond stages");
    }
    if (i > 0 && indices[i] <= indices[i - 1]) {
      throw std::invalid_argument("check_summable: indices must be strictly increasing");
    }
    if (!(eps[i] > 0.0)) {
      throw std::invalid_argument("check_summable: eps entries must be positive");
    }
  }

  SummabilityReport report;
  for (std::size_t k = 1; k < indices.size(); ++k) {
    for (std::size_t j = 0; j < k; ++j) {
      const std::size_t n = indices[j];
      const std::size_t m = indices[k];
      SummabilityPair pair;
      pair.n_stage = n;
      pair.m_stage = m;
      pair.eps = eps[k];
      pair.combinatorial_bound = summability_lhs(sys.group(), sys.stage(n), sys.stage(m));

      if (grid_factor) {
        // The same estimate evaluated through the maps themselves: sweep the
        // matrix-unit basis of M_{F_n}, push each phi_n(e_{g,h}) through
        // psi_m and phi_m, and certify the difference in reduced norm. One
        // evaluation per distinct quotient g h^{-1} suffices.
        const FolnerSet& f_n = sys.stage(n);
        const double card_n = static_cast<double>(f_n.size());
        std::unordered_set<GroupElement, GroupElementHash> seen;
        double worst = 0.0;
        for (std::size_t a = 0; a < f_n.size(); ++a) {
          for (std::size_t b = 0; b < f_n.size(); ++b) {
            const GroupElement s = sys.group().multiply(
                f_n.element(a), sys.group().inverse(f_n.element(b)));
            if (!seen.insert(s).second) continue;
            const AlgElement unit_ab =
                AlgElement::matrix_unit(sys.algebra(n), 0, static_cast<int>(a),
                                        static_cast<int>(b));
            const GroupAlgebraElement phi_img = phi(sys, n, unit_ab);
            const GroupAlgebraElement round_trip = phi(sys, m, psi(sys, m, phi_img));
            worst = std::max(worst, distance(phi_img, round_trip, *grid_factor).upper);
          }
        }
        pair.reduced_bound = card_n * card_n * worst;
      }

      double best = pair.combinatorial_bound;
      if (pair.reduced_bound) best = std::min(best, *pair.reduced_bound);
      pair.pass = best < pair.eps;
      report.all_pass = report.all_pass && pair.pass;
      report.pairs.push_back(std::move(pair));
    }
  }
  return report;
}

ALimitResult a_limit(const ApproximationSystem& sys, std::size_t k, const AlgElement& x,
                     std::size_t n_max, int grid_factor) {
  if (n_max >= sys.stage_count()) throw std::out_of_range("a_limit: n_max beyond stages");
  if (k > n_max) throw std::invalid_argument("a_limit: requires k <= n_max");
  if (!(x.algebra() == sys.algebra(k))) {
    throw std::invalid_argument("a_limit: element lives in a different algebra");
  }
  AlgElement y = x;
  GroupAlgebraElement prev = phi(sys, k, y);
  std::vector<double> increments;
  increments.reserve(n_max - k);
  for (std::size_t n = k; n < n_max; ++n) {
    y = apply_rho_step(sys, n, y);
    GroupAlgebraElement cur = phi(sys, n + 1, y);
    increments.push_back(distance(cur, prev, grid_factor).upper);
    prev = std::move(cur);
  }
  return {std::move(prev), std::move(increments)};
}

}  // namespace cpcsys
