#pragma once

// Numerical audit of the encoding conditions of a c.p.c. system. Every
// operation here evaluates one finite-stage inequality defect: comparison of
// two composite routes through the system (Stinespring-style), associativity
// of staged products, the amplified C*-identity, multiplicativity, the group
// side's psi-multiplicativity, and the bullet-product estimator with its
// convolution oracle. Defects are plain doubles; run_audit wraps them in
// structured, deterministic reports.

#include <complex>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cpcsys/folner_system.hpp"

namespace cpcsys {

struct AuditConfig;  // defined in config.hpp

// One evaluation point of a staged condition. Singles use n; pairs use
// (n, m); triples use (j, n, m).
struct StageTuple {
  std::size_t j = 0;
  std::size_t n = 0;
  std::size_t m = 0;
};

// A finite stand-in for the "for all m > n > j beyond some threshold"
// quantifiers: the audit evaluates each condition on a list of stage tuples
// and reports the defect curve, never a limit statement.
class StageSchedule {
 public:
  StageSchedule(int arity, std::vector<StageTuple> tuples);

  // Tuples (j, 2j, 4j), (2j, 4j, 8j), ... with the base doubling between
  // consecutive tuples; lower-arity schedules drop the leading entries, so
  // arity 2 yields (j, 2j) and arity 1 yields (j).
  static StageSchedule doubling(std::size_t start, std::size_t count, int arity);

  int arity() const { return arity_; }
  const std::vector<StageTuple>& tuples() const { return tuples_; }
  bool empty() const { return tuples_.empty(); }

  // Throws std::invalid_argument on an ordering violation inside any tuple
  // and std::out_of_range if a stage is not below stage_count.
  void validate(std::size_t stage_count) const;

 private:
  int arity_;
  std::vector<StageTuple> tuples_;
};

// || rho_{m,n}(rho_{n,k}(x) rho_{n,k}(y)) - rho_{m,j}(rho_{j,k}(x) rho_{j,k}(y)) ||
// for x, y in the stage-k algebra; requires k <= j < n < m.
double defect_stinespring(const SystemHandle& sys, std::size_t k, const AlgElement& x,
                          const AlgElement& y, std::size_t j, std::size_t n,
                          std::size_t m);

// || rho_{m,n}(rho_{n,j}(rho_{j,k}(x) rho_{j,k}(y)) rho_{n,k}(z))
//    - rho_{m,n}(rho_{n,k}(x) rho_{n,j}(rho_{j,k}(y) rho_{j,k}(z))) ||
double defect_associativity(const SystemHandle& sys, std::size_t k, const AlgElement& x,
                            const AlgElement& y, const AlgElement& z, std::size_t j,
                            std::size_t n, std::size_t m);

// Signed one-sided defect of the amplified C*-identity:
//   || rho^(r)_{m,n}( (rho^(r)_{n,k} X)^* rho^(r)_{n,k} X ) || - || rho^(r)_{m,k} X ||^2
// where X = pattern (x) x scatters x into the r x r cells (default pattern:
// the identity, i.e. diag(x, ..., x)). The identity holds at tolerance eps
// iff the returned value is below eps. Requires r >= 1, a pattern of shape
// r x r when supplied, and k <= n < m.
double defect_cstar_identity(const SystemHandle& sys, std::size_t k, const AlgElement& x,
                             int r, std::size_t n, std::size_t m,
                             const std::optional<Eigen::MatrixXcd>& pattern = std::nullopt);

// || rho_{m,n}(rho_{n,k}(x) rho_{n,k}(y)) - rho_{m,k}(x) rho_{m,k}(y) ||.
// Small values witness asymptotic multiplicativity; the window construction
// over the integers keeps this bounded away from zero.
double defect_multiplicative(const SystemHandle& sys, std::size_t k, const AlgElement& x,
                             const AlgElement& y, std::size_t n, std::size_t m);

// Two-sided absolute version of defect_cstar_identity: the finite-stage proxy
// for the norm-limit equality || lim rho^(r)(...) || = || rho^(r)_k(x) ||^2.
double norm_limit_check(const SystemHandle& sys, std::size_t k, const AlgElement& x,
                        int r, std::size_t n, std::size_t m,
                        const std::optional<Eigen::MatrixXcd>& pattern = std::nullopt);

// || psi_n(a * b) - psi_n(a) psi_n(b) || with a * b the convolution product.
// Exact operator norms throughout; no certified-enclosure parameter is
// needed because no group-algebra norm is evaluated.
double psi_mult_defect(const ApproximationSystem& sys, std::size_t n,
                       const GroupAlgebraElement& a, const GroupAlgebraElement& b);

// Named r x r scatter patterns for amplified elements: "diag" is the
// identity pattern diag(x, ..., x); "offdiag" places x on the sub- and
// superdiagonal cells. Unknown names throw std::invalid_argument.
Eigen::MatrixXcd amplification_pattern(const std::string& name, int r);

// Finite-stage estimator of the limit product: the representative is
// rho_{m,n}(rho_{n,k}(x) rho_{n,k}(y)) at the largest (m, n) in the schedule,
// and the diagnostics are the Stinespring-comparison defects across the
// schedule (arity 3, nonempty).
struct BulletProduct {
  AlgElement representative;
  StageTuple top;  // the (j, n, m) tuple the representative was taken at
  std::vector<double> diagnostics;
};

BulletProduct bullet_product(const SystemHandle& sys, std::size_t k, const AlgElement& x,
                             const AlgElement& y, const StageSchedule& schedule);

// || rho_{m,n}(rho_{n,k}(x) rho_{n,k}(y)) - psi_m(a_x a_y) || where a_x, a_y
// are the stage-n convolution-limit probes of x and y and a_x a_y is their
// convolution. Requires k <= n < m.
double product_vs_oracle(const ApproximationSystem& sys, std::size_t k,
                         const AlgElement& x, const AlgElement& y, std::size_t n,
                         std::size_t m, int grid_factor = kDefaultGridFactor);

// Almost-multiplicative-domain check at stage n: eta is calibrated from the
// certified distances d_i = upper(distance(phi_n(psi_n(a^i)), a^i)), i = 1, 2,
// as eta = sqrt(3 max_i d_i), and the claim
//   upper(distance(phi_n(psi_n(a) b), phi_n(psi_n(a)) * phi_n(b))) < eta ||b||
// is evaluated with a small additive guard for the exact case. a must be
// self-adjoint (enclosure of ||a - a*|| below 1e-12), else
// std::invalid_argument.
struct StinespringLemmaResult {
  double eta = 0.0;
  double lhs = 0.0;
  bool pass = false;
};

StinespringLemmaResult stinespring_lemma_check(const ApproximationSystem& sys,
                                               std::size_t n, const GroupAlgebraElement& a,
                                               const AlgElement& b,
                                               int grid_factor = kDefaultGridFactor);

// --- report plumbing ---------------------------------------------------

struct TupleDefect {
  StageTuple stages;
  double value = 0.0;
};

// One audited condition: which inequality, on which system, with which
// elements and schedule, the defect per tuple, and the verdict against the
// configured tolerance. Signed conditions (the one-sided C*-identity) may
// legitimately go negative; every other defect is a norm and must be >= 0.
struct DefectReport {
  std::string condition;
  std::string system;
  std::size_t k = 0;
  int r = 1;
  std::vector<std::string> elements;
  std::vector<StageTuple> schedule;
  std::vector<TupleDefect> defects;
  double tolerance = 0.0;
  bool is_signed = false;
  std::string verdict;
  std::uint64_t seed = 0;
  double wall_ms = 0.0;
};

// Stage count per evaluation tuple for a condition id ("stinespring" -> 3,
// "multiplicative" -> 2, "psi_mult" -> 1, ...); unknown ids throw.
int condition_arity(const std::string& condition);

// Evaluates every condition in the config against the configured system.
// Reports come back in config order; a failure inside one condition is
// captured as verdict "error: ..." without aborting the batch. Identical
// configs produce identical reports except for wall_ms.
std::vector<DefectReport> run_audit(const AuditConfig& config);

}  // namespace cpcsys
