#include "cpcsys/audit.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <utility>

#include "cpcsys/config.hpp"
#include "cpcsys/expr.hpp"

namespace cpcsys {

namespace {

void require_ordered_triple(std::size_t k, std::size_t j, std::size_t n, std::size_t m,
                            std::size_t stage_count) {
  if (!(k <= j && j < n && n < m)) {
    std::ostringstream msg;
    msg << "stage tuple must satisfy k <= j < n < m, got k=" << k << " j=" << j
        << " n=" << n << " m=" << m;
    throw std::invalid_argument(msg.str());
  }
  if (m >= stage_count) {
    std::ostringstream msg;
    msg << "stage " << m << " out of range for a system with " << stage_count
        << " stages";
    throw std::out_of_range(msg.str());
  }
}

void require_ordered_pair(std::size_t k, std::size_t n, std::size_t m,
                          std::size_t stage_count) {
  if (!(k <= n && n < m)) {
    std::ostringstream msg;
    msg << "stage pair must satisfy k <= n < m, got k=" << k << " n=" << n
        << " m=" << m;
    throw std::invalid_argument(msg.str());
  }
  if (m >= stage_count) {
    std::ostringstream msg;
    msg << "stage " << m << " out of range for a system with " << stage_count
        << " stages";
    throw std::out_of_range(msg.str());
  }
}

Eigen::MatrixXcd resolve_pattern(int r, const std::optional<Eigen::MatrixXcd>& pattern) {
  if (r < 1) throw std::invalid_argument("amplification rank must be >= 1");
  if (!pattern.has_value()) {
    return Eigen::MatrixXcd::Identity(r, r);
  }
  if (pattern->rows() != r || pattern->cols() != r) {
    throw std::invalid_argument("amplification pattern shape does not match rank");
  }
  return *pattern;
}

}  // namespace

StageSchedule::StageSchedule(int arity, std::vector<StageTuple> tuples)
    : arity_(arity), tuples_(std::move(tuples)) {
  if (arity_ < 1 || arity_ > 3) {
    throw std::invalid_argument("schedule arity must be 1, 2, or 3");
  }
}

StageSchedule StageSchedule::doubling(std::size_t start, std::size_t count, int arity) {
  if (start == 0) throw std::invalid_argument("doubling schedule must start at stage >= 1");
  std::vector<StageTuple> tuples;
  tuples.reserve(count);
  std::size_t base = start;
  for (std::size_t i = 0; i < count; ++i) {
    StageTuple t;
    if (arity == 3) {
      t.j = base;
      t.n = 2 * base;
      t.m = 4 * base;
    } else if (arity == 2) {
      t.n = base;
      t.m = 2 * base;
    } else {
      t.n = base;
    }
    tuples.push_back(t);
    base *= 2;
  }
  return StageSchedule(arity, std::move(tuples));
}

void StageSchedule::validate(std::size_t stage_count) const {
  for (const StageTuple& t : tuples_) {
    const std::size_t top = (arity_ == 1) ? t.n : t.m;
    if (top >= stage_count) {
      std::ostringstream msg;
      msg << "schedule stage " << top << " out of range for a system with "
          << stage_count << " stages";
      throw std::out_of_range(msg.str());
    }
    if (arity_ == 3 && !(t.j < t.n && t.n < t.m)) {
      throw std::invalid_argument("schedule triples must be strictly increasing");
    }
    if (arity_ == 2 && !(t.n < t.m)) {
      throw std::invalid_argument("schedule pairs must be strictly increasing");
    }
  }
}

double defect_stinespring(const SystemHandle& sys, std::size_t k, const AlgElement& x,
                          const AlgElement& y, std::size_t j, std::size_t n,
                          std::size_t m) {
  require_ordered_triple(k, j, n, m, sys.stage_count());
  const AlgElement via_n =
      sys.apply_rho(m, n, sys.apply_rho(n, k, x) * sys.apply_rho(n, k, y));
  const AlgElement via_j =
      sys.apply_rho(m, j, sys.apply_rho(j, k, x) * sys.apply_rho(j, k, y));
  return operator_norm(via_n - via_j);
}

double defect_associativity(const SystemHandle& sys, std::size_t k, const AlgElement& x,
                            const AlgElement& y, const AlgElement& z, std::size_t j,
                            std::size_t n, std::size_t m) {
  require_ordered_triple(k, j, n, m, sys.stage_count());
  const AlgElement xj = sys.apply_rho(j, k, x);
  const AlgElement yj = sys.apply_rho(j, k, y);
  const AlgElement zj = sys.apply_rho(j, k, z);
  const AlgElement left =
      sys.apply_rho(m, n, sys.apply_rho(n, j, xj * yj) * sys.apply_rho(n, k, z));
  const AlgElement right =
      sys.apply_rho(m, n, sys.apply_rho(n, k, x) * sys.apply_rho(n, j, yj * zj));
  return operator_norm(left - right);
}

double defect_cstar_identity(const SystemHandle& sys, std::size_t k, const AlgElement& x,
                             int r, std::size_t n, std::size_t m,
                             const std::optional<Eigen::MatrixXcd>& pattern) {
  const Eigen::MatrixXcd pat = resolve_pattern(r, pattern);
  require_ordered_pair(k, n, m, sys.stage_count());
  const AlgElement x_amp = amplify_elem(x, r, pat);
  const AlgElement xn = sys.apply_rho_amplified(n, k, x_amp, r);
  const AlgElement inner = xn.adjoint() * xn;
  const double limit_term = operator_norm(sys.apply_rho_amplified(m, n, inner, r));
  const double direct = operator_norm(sys.apply_rho_amplified(m, k, x_amp, r));
  return limit_term - direct * direct;
}

double defect_multiplicative(const SystemHandle& sys, std::size_t k, const AlgElement& x,
                             const AlgElement& y, std::size_t n, std::size_t m) {
  require_ordered_pair(k, n, m, sys.stage_count());
  const AlgElement staged =
      sys.apply_rho(m, n, sys.apply_rho(n, k, x) * sys.apply_rho(n, k, y));
  const AlgElement direct = sys.apply_rho(m, k, x) * sys.apply_rho(m, k, y);
  return operator_norm(staged - direct);
}

double norm_limit_check(const SystemHandle& sys, std::size_t k, const AlgElement& x,
                        int r, std::size_t n, std::size_t m,
                        const std::optional<Eigen::MatrixXcd>& pattern) {
  return std::abs(defect_cstar_identity(sys, k, x, r, n, m, pattern));
}

double psi_mult_defect(const ApproximationSystem& sys, std::size_t n,
                       const GroupAlgebraElement& a, const GroupAlgebraElement& b) {
  const AlgElement product_image = psi(sys, n, convolve(a, b));
  const AlgElement image_product = psi(sys, n, a) * psi(sys, n, b);
  return operator_norm(product_image - image_product);
}

Eigen::MatrixXcd amplification_pattern(const std::string& name, int r) {
  if (r < 1) throw std::invalid_argument("amplification rank must be >= 1");
  if (name == "diag") {
    return Eigen::MatrixXcd::Identity(r, r);
  }
  if (name == "offdiag") {
    if (r < 2) {
      throw std::invalid_argument("offdiag amplification pattern needs rank >= 2");
    }
    Eigen::MatrixXcd pat = Eigen::MatrixXcd::Zero(r, r);
    for (int p = 0; p + 1 < r; ++p) {
      pat(p, p + 1) = 1.0;
      pat(p + 1, p) = 1.0;
    }
    return pat;
  }
  throw std::invalid_argument("unknown amplification pattern: " + name);
}

BulletProduct bullet_product(const SystemHandle& sys, std::size_t k, const AlgElement& x,
                             const AlgElement& y, const StageSchedule& schedule) {
  if (schedule.arity() != 3) {
    throw std::invalid_argument("bullet product wants a schedule of (j, n, m) triples");
  }
  if (schedule.empty()) {
    throw std::invalid_argument("bullet product needs a nonempty schedule");
  }
  schedule.validate(sys.stage_count());

  std::vector<double> diagnostics;
  diagnostics.reserve(schedule.tuples().size());
  for (const StageTuple& t : schedule.tuples()) {
    diagnostics.push_back(defect_stinespring(sys, k, x, y, t.j, t.n, t.m));
  }

  const StageTuple* top = &schedule.tuples().front();
  for (const StageTuple& t : schedule.tuples()) {
    if (t.m > top->m || (t.m == top->m && t.n > top->n)) top = &t;
  }
  const AlgElement representative = sys.apply_rho(
      top->m, top->n, sys.apply_rho(top->n, k, x) * sys.apply_rho(top->n, k, y));
  return BulletProduct{representative, *top, std::move(diagnostics)};
}

double product_vs_oracle(const ApproximationSystem& sys, std::size_t k,
                         const AlgElement& x, const AlgElement& y, std::size_t n,
                         std::size_t m, int grid_factor) {
  require_ordered_pair(k, n, m, sys.stage_count());
  const SystemHandle handle = SystemHandle::view(sys);
  const AlgElement staged =
      handle.apply_rho(m, n, handle.apply_rho(n, k, x) * handle.apply_rho(n, k, y));

  const GroupAlgebraElement a_x = a_limit(sys, k, x, n, grid_factor).value;
  const GroupAlgebraElement a_y = a_limit(sys, k, y, n, grid_factor).value;
  const AlgElement oracle = psi(sys, m, convolve(a_x, a_y));
  return operator_norm(staged - oracle);
}

StinespringLemmaResult stinespring_lemma_check(const ApproximationSystem& sys,
                                               std::size_t n, const GroupAlgebraElement& a,
                                               const AlgElement& b, int grid_factor) {
  const GroupAlgebraElement defect_sa = a - involute(a);
  if (reduced_norm(defect_sa, grid_factor).upper > 1e-12) {
    throw std::invalid_argument("stinespring_lemma_check needs a self-adjoint element");
  }

  // Calibrate eta from the certified round-trip distances of a and a^2.
  const GroupAlgebraElement a2 = convolve(a, a);
  const double d1 = distance(phi(sys, n, psi(sys, n, a)), a, grid_factor).upper;
  const double d2 = distance(phi(sys, n, psi(sys, n, a2)), a2, grid_factor).upper;
  const double eta = std::sqrt(3.0 * std::max(d1, d2));

  const AlgElement psi_a = psi(sys, n, a);
  const GroupAlgebraElement phi_of_product = phi(sys, n, psi_a * b);
  const GroupAlgebraElement factored = convolve(phi(sys, n, psi_a), phi(sys, n, b));
  const double lhs = distance(phi_of_product, factored, grid_factor).upper;

  StinespringLemmaResult result;
  result.eta = eta;
  result.lhs = lhs;
  // Additive guard so the exact case (eta = lhs = 0) passes the strict form.
  result.pass = lhs < eta * operator_norm(b) + 1e-12;
  return result;
}

int condition_arity(const std::string& condition) {
  if (condition == "stinespring" || condition == "associativity") return 3;
  if (condition == "cstar_identity" || condition == "multiplicative" ||
      condition == "norm_limit" || condition == "product_oracle") {
    return 2;
  }
  if (condition == "psi_mult" || condition == "stinespring_lemma") return 1;
  throw std::invalid_argument("unknown audit condition: " + condition);
}

namespace {

std::size_t expected_element_count(const std::string& condition) {
  if (condition == "associativity") return 3;
  if (condition == "cstar_identity" || condition == "norm_limit") return 1;
  return 2;
}

const ApproximationSystem& require_approximation(const BuiltSystem& built,
                                                 const std::string& condition) {
  if (!built.approx) {
    throw std::invalid_argument(condition +
                                " needs a window-sequence system with group structure");
  }
  return *built.approx;
}

std::vector<TupleDefect> evaluate_condition(const BuiltSystem& built,
                                            const ConditionConfig& cond,
                                            const StageSchedule& schedule,
                                            const AuditConfig& config,
                                            bool* lemma_all_pass) {
  const SystemHandle handle = built.handle();
  const int grid_factor = config.grid_factor.value_or(kDefaultGridFactor);

  ElementExprContext ctx;
  ctx.approx = built.approx.get();
  ctx.stage = cond.k;
  ctx.seed = config.seed;

  std::vector<TupleDefect> defects;
  defects.reserve(schedule.tuples().size());

  if (cond.condition == "psi_mult") {
    const ApproximationSystem& sys = require_approximation(built, cond.condition);
    const GroupAlgebraElement a = parse_group_sum(cond.elements[0], sys.group());
    const GroupAlgebraElement b = parse_group_sum(cond.elements[1], sys.group());
    for (const StageTuple& t : schedule.tuples()) {
      defects.push_back({t, psi_mult_defect(sys, t.n, a, b)});
    }
    return defects;
  }

  if (cond.condition == "stinespring_lemma") {
    const ApproximationSystem& sys = require_approximation(built, cond.condition);
    const GroupAlgebraElement a = parse_group_sum(cond.elements[0], sys.group());
    *lemma_all_pass = true;
    for (const StageTuple& t : schedule.tuples()) {
      ElementExprContext bctx = ctx;
      bctx.algebra = &sys.algebra(t.n);
      bctx.stage = t.n;
      const AlgElement b = parse_element_expr(cond.elements[1], bctx);
      const StinespringLemmaResult res = stinespring_lemma_check(sys, t.n, a, b, grid_factor);
      *lemma_all_pass = *lemma_all_pass && res.pass;
      defects.push_back({t, res.lhs});
    }
    return defects;
  }

  // Remaining conditions take stage-k elements.
  ctx.algebra = &handle.algebra(cond.k);
  std::vector<AlgElement> elems;
  elems.reserve(cond.elements.size());
  for (const std::string& text : cond.elements) {
    elems.push_back(parse_element_expr(text, ctx));
  }

  std::optional<Eigen::MatrixXcd> pattern;
  if (cond.condition == "cstar_identity" || cond.condition == "norm_limit") {
    pattern = amplification_pattern(cond.pattern, cond.r);
  }

  for (const StageTuple& t : schedule.tuples()) {
    double value = 0.0;
    if (cond.condition == "stinespring") {
      value = defect_stinespring(handle, cond.k, elems[0], elems[1], t.j, t.n, t.m);
    } else if (cond.condition == "associativity") {
      value = defect_associativity(handle, cond.k, elems[0], elems[1], elems[2], t.j,
                                   t.n, t.m);
    } else if (cond.condition == "cstar_identity") {
      value = defect_cstar_identity(handle, cond.k, elems[0], cond.r, t.n, t.m, pattern);
    } else if (cond.condition == "multiplicative") {
      value = defect_multiplicative(handle, cond.k, elems[0], elems[1], t.n, t.m);
    } else if (cond.condition == "norm_limit") {
      value = norm_limit_check(handle, cond.k, elems[0], cond.r, t.n, t.m, pattern);
    } else if (cond.condition == "product_oracle") {
      const ApproximationSystem& sys = require_approximation(built, cond.condition);
      value = product_vs_oracle(sys, cond.k, elems[0], elems[1], t.n, t.m, grid_factor);
    } else {
      throw std::invalid_argument("unknown audit condition: " + cond.condition);
    }
    defects.push_back({t, value});
  }
  return defects;
}

std::string decide_verdict(const ConditionConfig& cond,
                           const std::vector<TupleDefect>& defects,
                           bool lemma_all_pass) {
  if (cond.condition == "stinespring_lemma") {
    return lemma_all_pass ? "pass" : "fail";
  }
  if (cond.condition == "cstar_identity") {
    // One-sided: the identity holds at the tolerance iff the signed defect
    // stays below it.
    for (const TupleDefect& d : defects) {
      if (!(d.value < cond.tolerance)) return "fail";
    }
    return "pass";
  }
  for (const TupleDefect& d : defects) {
    if (!(std::abs(d.value - cond.target) <= cond.tolerance)) {
      if (cond.condition == "multiplicative") {
        return "not asymptotically multiplicative at tested scales";
      }
      return "fail";
    }
  }
  return "pass";
}

}  // namespace

std::vector<DefectReport> run_audit(const AuditConfig& config) {
  const BuiltSystem built = build_system(config.system);
  const std::string system_desc = built.describe();
  const std::size_t stage_count = built.handle().stage_count();

  std::vector<DefectReport> reports;
  reports.reserve(config.conditions.size());

  for (const ConditionConfig& cond : config.conditions) {
    const auto start = std::chrono::steady_clock::now();
    DefectReport report;
    report.condition = cond.condition;
    report.system = system_desc;
    report.k = cond.k;
    report.r = cond.r;
    report.elements = cond.elements;
    report.tolerance = cond.tolerance;
    report.seed = config.seed;

    try {
      const int arity = condition_arity(cond.condition);
      report.is_signed = (cond.condition == "cstar_identity");
      if (cond.elements.size() != expected_element_count(cond.condition)) {
        std::ostringstream msg;
        msg << cond.condition << " needs " << expected_element_count(cond.condition)
            << " element expressions, got " << cond.elements.size();
        throw std::invalid_argument(msg.str());
      }
      const StageSchedule schedule = cond.schedule.materialize(arity, stage_count);
      report.schedule = schedule.tuples();

      bool lemma_all_pass = true;
      report.defects = evaluate_condition(built, cond, schedule, config, &lemma_all_pass);
      report.verdict = decide_verdict(cond, report.defects, lemma_all_pass);
    } catch (const std::exception& e) {
      report.verdict = std::string("error: ") + e.what();
    }

    const auto stop = std::chrono::steady_clock::now();
    report.wall_ms =
        std::chrono::duration_cast<std::chrono::duration<double, std::milli>>(stop - start)
            .count();
    reports.push_back(std::move(report));
  }
  return reports;
}

}  // namespace cpcsys
