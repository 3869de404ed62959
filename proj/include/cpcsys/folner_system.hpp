#pragma once

#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "cpcsys/cpmaps.hpp"
#include "cpcsys/fdcstar.hpp"
#include "cpcsys/groupalg.hpp"
#include "cpcsys/groups.hpp"

// The Folner-window approximation machinery: compressions psi_n onto matrix
// algebras over Folner sets, the coefficient-averaging maps phi_n back into
// the group algebra, the induced c.p.c. steps rho_{n+1,n} = psi_{n+1} o
// phi_n, and the generic verified c.p.c.-system container.

namespace cpcsys {

// Tolerance at which system steps must pass complete-positivity and
// contractivity checks when a CpcSystem is built.
constexpr double kStepVerifyTol = 1e-9;

// A sequence of Folner windows in one group, each carrying the full matrix
// algebra M_{|F_n|}. Stage labels are positions in the chosen subsequence
// (system-relative), not indices into any ambient sequence.
class ApproximationSystem {
 public:
  ApproximationSystem(Group group, std::vector<FolnerSet> stages,
                      std::optional<SummabilityCertificate> certificate = std::nullopt);

  // Stages taken from seq at the certified indices, relabeled 0, 1, 2, ...
  static ApproximationSystem from_certified(const FolnerSequence& seq,
                                            SummabilityCertificate certificate);
  // Every set of seq as a stage (stage = position in seq).
  static ApproximationSystem from_sequence(const FolnerSequence& seq);
  // A finite group with F_n = G at every stage.
  static ApproximationSystem full_group_stages(const Group& finite_group,
                                               std::size_t stage_count);

  const Group& group() const { return group_; }
  std::size_t stage_count() const { return stages_.size(); }
  const FolnerSet& stage(std::size_t n) const;
  const FiniteDimCstar& algebra(std::size_t n) const;
  const std::optional<SummabilityCertificate>& certificate() const { return certificate_; }
  std::string describe() const;

 private:
  Group group_;
  std::vector<FolnerSet> stages_;
  std::vector<FiniteDimCstar> algebras_;
  std::optional<SummabilityCertificate> certificate_;
};

// Compression of a group-algebra element into M_{|F_n|}: entries
// (psi_n(a))_{g,h} = a(g h^{-1}), equivalently the linear extension of
// psi_n(lambda_s) = sum_{r in F_n cap sF_n} e_{r, s^{-1} r}.
AlgElement psi(const ApproximationSystem& sys, std::size_t n, const GroupAlgebraElement& a);

// Coefficient averaging back into the group algebra: the linear extension of
// phi_n(e_{g,h}) = (1/|F_n|) lambda_{g h^{-1}}. Entry sums are accumulated
// first and divided by |F_n| once, so phi(unit) = delta_identity exactly and
// phi(psi(delta_s)) matches phi_psi_scalar bitwise.
GroupAlgebraElement phi(const ApproximationSystem& sys, std::size_t n, const AlgElement& x);

// |F_m cap sF_m| / |F_m|: the scalar with phi_m(psi_m(delta_s)) = scalar *
// delta_s exactly.
double phi_psi_scalar(const ApproximationSystem& sys, std::size_t m, const GroupElement& s);

// The step rho_{n+1,n} = psi_{n+1} o phi_n as an explicit CpMap, built from
// the matrix-unit formula rho(e_{g,h}) = (1/|F_n|) sum_{r in F_{n+1} cap
// gh^{-1}F_{n+1}} e_{r, hg^{-1}r}.
CpMap rho_step(const ApproximationSystem& sys, std::size_t n);

// Functional application of the same step without materializing its action
// matrix; exact agreement with rho_step(sys, n).apply(x).
AlgElement apply_rho_step(const ApproximationSystem& sys, std::size_t n, const AlgElement& x);

// The stage-n representative psi_n(a) of the embedding a -> [(psi_n(a))_n].
AlgElement psi_embedding(const ApproximationSystem& sys, const GroupAlgebraElement& a,
                         std::size_t n);

// A verified c.p.c. system: every step passed verify_cp and
// verify_contractive at kStepVerifyTol when the system was built. Composed
// transition maps rho(m, n) memoize the prefix compositions rho(m, 0).
class CpcSystem {
 public:
  std::size_t stage_count() const { return algebras_.size(); }
  const std::vector<FiniteDimCstar>& algebras() const { return algebras_; }
  const FiniteDimCstar& algebra(std::size_t n) const;
  // Step n: algebra n -> algebra n+1.
  const CpMap& step(std::size_t n) const;
  std::size_t step_count() const { return steps_.size(); }

  // rho_{m,n} = step_{m-1} o ... o step_n; rho_{n,n} = identity. Requires
  // n <= m < stage_count.
  CpMap rho(std::size_t m, std::size_t n) const;

  // Applies rho_{m,n} to x by stepping, without composing action matrices.
  AlgElement apply_rho(std::size_t m, std::size_t n, const AlgElement& x) const;

  std::string describe() const;

 private:
  friend CpcSystem build_cpc_from_maps(std::vector<FiniteDimCstar> algebras,
                                       std::vector<CpMap> steps);
  CpcSystem(std::vector<FiniteDimCstar> algebras, std::vector<CpMap> steps);

  std::vector<FiniteDimCstar> algebras_;
  std::vector<CpMap> steps_;
  mutable std::unique_ptr<std::mutex> memo_mutex_;
  mutable std::vector<std::optional<CpMap>> prefix_memo_;  // rho(m, 0)
};

// Generic constructor: verifies every step (complete positivity, then
// contractivity) at kStepVerifyTol and rejects with the failing Choi
// eigenvalue in the message.
CpcSystem build_cpc_from_maps(std::vector<FiniteDimCstar> algebras, std::vector<CpMap> steps);

// The c.p.c. system associated with an approximation system. max_stage (when
// given) truncates to stages 0..max_stage, keeping large tails usable through
// the functional route while the materialized prefix stays verifiable.
CpcSystem build_cpc(const ApproximationSystem& sys,
                    std::optional<std::size_t> max_stage = std::nullopt);

// AF tower C -> M_2 -> M_4 -> ... with unital *-homomorphism steps
// x -> diag(x, x); every audit defect vanishes on it.
CpcSystem af_doubling_system(std::size_t stage_count);

// Uniform view over the two system representations, so audits can apply
// transition maps to elements without caring whether steps are materialized
// action matrices (CpcSystem) or evaluated functionally (ApproximationSystem,
// which scales to windows far beyond dense-matrix reach).
class SystemHandle {
 public:
  explicit SystemHandle(std::shared_ptr<const ApproximationSystem> sys);
  explicit SystemHandle(std::shared_ptr<const CpcSystem> sys);

  // Non-owning views; the referenced system must outlive the handle.
  static SystemHandle view(const ApproximationSystem& sys);
  static SystemHandle view(const CpcSystem& sys);

  std::size_t stage_count() const;
  const FiniteDimCstar& algebra(std::size_t n) const;
  AlgElement apply_rho(std::size_t m, std::size_t n, const AlgElement& x) const;

  // Entrywise amplified application: x_amp lives in M_r(algebra(n)); each of
  // the r x r cells is mapped by rho_{m,n} independently (the definition of
  // the amplified map's action).
  AlgElement apply_rho_amplified(std::size_t m, std::size_t n, const AlgElement& x_amp,
                                 int r) const;

  const ApproximationSystem* approximation() const { return approx_.get(); }
  const CpcSystem* cpc() const { return cpc_.get(); }
  std::string describe() const;

 private:
  std::shared_ptr<const ApproximationSystem> approx_;
  std::shared_ptr<const CpcSystem> cpc_;
};

// One (n, m) pair of a summability check: the combinatorial bound is
// summability_lhs(F_n, F_m); the reduced bound (present when a grid factor
// was supplied) evaluates the same estimate through phi/psi images and
// certified reduced norms. The verdict compares the tightest bound against
// eps strictly.
struct SummabilityPair {
  std::size_t n_stage = 0;
  std::size_t m_stage = 0;
  double combinatorial_bound = 0.0;
  std::optional<double> reduced_bound;
  double eps = 0.0;
  bool pass = false;
};

struct SummabilityReport {
  std::vector<SummabilityPair> pairs;
  bool all_pass = true;
};

// Checks ||phi_n - phi_m o psi_m o phi_n|| < eps[k] for every pair of listed
// stages (n = indices[j], m = indices[k], j < k) via the estimate
// |F_n|^2 max_{g,h} ||phi_n(e_{g,h}) - phi_m psi_m phi_n(e_{g,h})||.
// indices must be strictly increasing positions into sys stages; eps has one
// entry per index. grid_factor switches on the reduced-norm route.
SummabilityReport check_summable(const ApproximationSystem& sys,
                                 const std::vector<std::size_t>& indices,
                                 const std::vector<double>& eps,
                                 std::optional<int> grid_factor = std::nullopt);

// Finite-stage probe of a_x = lim_n phi_n(rho_{n,k}(x)): the value at n_max
// and the Cauchy increments upper(||phi_{n+1}(rho_{n+1,k}x) -
// phi_n(rho_{n,k}x)||) for k <= n < n_max. No tolerance verdict: the limit
// exists under summability but with no usable rate, so callers calibrate.
struct ALimitResult {
  GroupAlgebraElement value;
  std::vector<double> increments;
};

ALimitResult a_limit(const ApproximationSystem& sys, std::size_t k, const AlgElement& x,
                     std::size_t n_max, int grid_factor = kDefaultGridFactor);

}  // namespace cpcsys
