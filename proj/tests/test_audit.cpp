#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <memory>
#include <random>

#include "cpcsys/audit.hpp"
#include "cpcsys/config.hpp"
#include "cpcsys/expr.hpp"

using namespace cpcsys;
using Complex = std::complex<double>;

namespace {

std::vector<std::vector<int>> cyclic_table(int n) {
  std::vector<std::vector<int>> t(n, std::vector<int>(n));
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) t[a][b] = (a + b) % n;
  return t;
}

AlgElement random_stage_element(const FiniteDimCstar& alg, std::mt19937_64& rng) {
  std::normal_distribution<double> dist(0.0, 1.0);
  AlgElement x = AlgElement::zero(alg);
  for (int b = 0; b < alg.block_count(); ++b) {
    const int d = alg.block_dims()[b];
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) x.block(b)(i, j) = Complex(dist(rng), dist(rng));
  }
  const double norm = operator_norm(x);
  return Complex(1.0 / norm, 0.0) * x;
}

}  // namespace

TEST_CASE("stage schedules: doubling shapes and validation") {
  StageSchedule triples = StageSchedule::doubling(2, 3, 3);
  REQUIRE(triples.tuples().size() == 3);
  CHECK(triples.tuples()[0].j == 2);
  CHECK(triples.tuples()[0].n == 4);
  CHECK(triples.tuples()[0].m == 8);
  CHECK(triples.tuples()[2].j == 8);
  CHECK(triples.tuples()[2].m == 32);
  triples.validate(33);
  CHECK_THROWS_AS(triples.validate(32), std::out_of_range);

  StageSchedule pairs = StageSchedule::doubling(4, 2, 2);
  CHECK(pairs.tuples()[1].n == 8);
  CHECK(pairs.tuples()[1].m == 16);

  StageSchedule singles = StageSchedule::doubling(1, 4, 1);
  CHECK(singles.tuples()[3].n == 8);
  singles.validate(9);

  CHECK_THROWS_AS(StageSchedule::doubling(0, 2, 3), std::invalid_argument);
  CHECK_THROWS_AS(StageSchedule(5, {}), std::invalid_argument);
  CHECK_THROWS_AS(StageSchedule(3, {StageTuple{3, 2, 5}}).validate(6),
                  std::invalid_argument);

  CHECK(condition_arity("stinespring") == 3);
  CHECK(condition_arity("associativity") == 3);
  CHECK(condition_arity("cstar_identity") == 2);
  CHECK(condition_arity("multiplicative") == 2);
  CHECK(condition_arity("norm_limit") == 2);
  CHECK(condition_arity("product_oracle") == 2);
  CHECK(condition_arity("psi_mult") == 1);
  CHECK(condition_arity("stinespring_lemma") == 1);
  CHECK_THROWS_AS(condition_arity("nope"), std::invalid_argument);
}

TEST_CASE("exact tower: every defect vanishes on the doubling system") {
  auto af = std::make_shared<const CpcSystem>(af_doubling_system(6));
  SystemHandle sys(af);
  std::mt19937_64 rng(7);

  for (int trial = 0; trial < 5; ++trial) {
    AlgElement x = random_stage_element(af->algebra(1), rng);
    AlgElement y = random_stage_element(af->algebra(1), rng);
    AlgElement z = random_stage_element(af->algebra(1), rng);
    CHECK(defect_stinespring(sys, 1, x, y, 2, 3, 5) <= 1e-12);
    CHECK(defect_stinespring(sys, 1, x, y, 1, 2, 4) <= 1e-12);
    CHECK(defect_associativity(sys, 1, x, y, z, 2, 3, 5) <= 1e-12);
    CHECK(defect_multiplicative(sys, 1, x, y, 2, 4) <= 1e-12);
    for (int r : {1, 2, 3}) {
      CHECK(std::abs(defect_cstar_identity(sys, 1, x, r, 2, 4)) <= 1e-10);
      CHECK(norm_limit_check(sys, 1, x, r, 2, 4) <= 1e-10);
    }
    CHECK(std::abs(defect_cstar_identity(
              sys, 1, x, 2, 2, 4, amplification_pattern("offdiag", 2))) <= 1e-10);
  }

  // The bullet product of a multiplicative tower is the plain product.
  std::mt19937_64 rng2(8);
  AlgElement x = random_stage_element(af->algebra(1), rng2);
  AlgElement y = random_stage_element(af->algebra(1), rng2);
  StageSchedule sched(3, {StageTuple{1, 2, 4}, StageTuple{2, 3, 5}});
  BulletProduct bp = bullet_product(sys, 1, x, y, sched);
  AlgElement direct = sys.apply_rho(5, 1, x) * sys.apply_rho(5, 1, y);
  CHECK((bp.representative.block(0) - direct.block(0)).cwiseAbs().maxCoeff() <= 1e-12);
  for (double d : bp.diagnostics) CHECK(d <= 1e-12);
}

TEST_CASE("idempotent full-window system: zero defects from stage one on") {
  Group z5 = Group::finite(cyclic_table(5));
  auto full = std::make_shared<const ApproximationSystem>(
      ApproximationSystem::full_group_stages(z5, 8));
  SystemHandle sys(full);
  std::mt19937_64 rng(11);

  for (int trial = 0; trial < 5; ++trial) {
    AlgElement x = random_stage_element(full->algebra(0), rng);
    AlgElement y = random_stage_element(full->algebra(0), rng);
    AlgElement z = random_stage_element(full->algebra(0), rng);
    CHECK(defect_stinespring(sys, 0, x, y, 1, 2, 4) <= 1e-10);
    CHECK(defect_stinespring(sys, 0, x, y, 2, 5, 7) <= 1e-10);
    CHECK(defect_associativity(sys, 0, x, y, z, 1, 3, 6) <= 1e-10);
    CHECK(defect_multiplicative(sys, 0, x, y, 1, 4) <= 1e-10);
    CHECK(std::abs(defect_cstar_identity(sys, 0, x, 1, 1, 3)) <= 1e-10);
    CHECK(std::abs(defect_cstar_identity(sys, 0, x, 2, 2, 5)) <= 1e-10);
    CHECK(norm_limit_check(sys, 0, x, 2, 1, 6) <= 1e-10);
  }

  // Unit elements keep every defect at zero on any system.
  AlgElement u = AlgElement::unit(full->algebra(0));
  CHECK(defect_stinespring(sys, 0, u, u, 1, 2, 3) <= 1e-12);
  CHECK(defect_associativity(sys, 0, u, u, u, 1, 2, 3) <= 1e-12);
  CHECK(defect_multiplicative(sys, 0, u, u, 1, 2) <= 1e-12);
  CHECK(std::abs(defect_cstar_identity(sys, 0, u, 1, 1, 2)) <= 1e-10);
}

TEST_CASE("stage and parameter validation in the defect operations") {
  auto af = std::make_shared<const CpcSystem>(af_doubling_system(5));
  SystemHandle sys(af);
  AlgElement u = AlgElement::unit(af->algebra(1));

  CHECK_THROWS_AS(defect_stinespring(sys, 1, u, u, 0, 2, 3), std::invalid_argument);
  CHECK_THROWS_AS(defect_stinespring(sys, 1, u, u, 2, 2, 3), std::invalid_argument);
  CHECK_THROWS_AS(defect_stinespring(sys, 1, u, u, 1, 2, 9), std::out_of_range);
  CHECK_THROWS_AS(defect_multiplicative(sys, 1, u, u, 3, 3), std::invalid_argument);
  CHECK_THROWS_AS(defect_cstar_identity(sys, 1, u, 0, 2, 3), std::invalid_argument);
  CHECK_THROWS_AS(
      defect_cstar_identity(sys, 1, u, 2, 2, 3, Eigen::MatrixXcd::Identity(3, 3)),
      std::invalid_argument);
  CHECK_THROWS_AS(amplification_pattern("offdiag", 1), std::invalid_argument);
  CHECK_THROWS_AS(amplification_pattern("spiral", 2), std::invalid_argument);

  StageSchedule sched(3, {StageTuple{1, 2, 4}});
  CHECK_THROWS_AS(bullet_product(sys, 1, u, u, StageSchedule(2, {StageTuple{0, 1, 2}})),
                  std::invalid_argument);
  CHECK_THROWS_AS(bullet_product(sys, 1, u, u, StageSchedule(3, {})),
                  std::invalid_argument);
}

TEST_CASE("psi multiplicativity defect: the exact unit value on the integers") {
  ApproximationSystem sys = ApproximationSystem::from_sequence(box_sequence(1, 10));
  const Group& z = sys.group();
  const GroupAlgebraElement left = GroupAlgebraElement::delta(z, {-1});
  const GroupAlgebraElement right = GroupAlgebraElement::delta(z, {1});

  for (std::size_t n = 1; n <= 10; ++n) {
    CHECK(std::abs(psi_mult_defect(sys, n, left, right) - 1.0) <= 1e-9);
  }
  CHECK(psi_mult_defect(sys, 3, GroupAlgebraElement::unit(z),
                        GroupAlgebraElement::unit(z)) <= 1e-12);

  // Full finite windows make the compression multiplicative on every basis
  // pair.
  Group z5 = Group::finite(cyclic_table(5));
  ApproximationSystem full = ApproximationSystem::full_group_stages(z5, 3);
  for (int s = 0; s < 5; ++s) {
    for (int t = 0; t < 5; ++t) {
      const double d = psi_mult_defect(full, 1, GroupAlgebraElement::delta(z5, {s}),
                                       GroupAlgebraElement::delta(z5, {t}));
      CHECK(d <= 1e-12);
    }
  }
}

TEST_CASE("window growth shrinks the comparison defects on the integers") {
  auto sys = std::make_shared<const ApproximationSystem>(
      ApproximationSystem::from_sequence(box_sequence(1, 32)));
  SystemHandle handle(sys);
  const Group& z = sys->group();
  const AlgElement x = psi(*sys, 1, GroupAlgebraElement::delta(z, {1}));

  std::vector<double> stine;
  std::vector<double> assoc;
  std::vector<double> nlimit;
  for (std::size_t j : {2, 4, 8}) {
    stine.push_back(defect_stinespring(handle, 1, x, x, j, 2 * j, 4 * j));
    assoc.push_back(defect_associativity(handle, 1, x, x, x, j, 2 * j, 4 * j));
    nlimit.push_back(norm_limit_check(handle, 1, x, 1, j, 2 * j));
  }
  for (std::size_t i = 1; i < stine.size(); ++i) {
    CHECK(stine[i] <= stine[i - 1] + 1e-12);
    CHECK(assoc[i] <= assoc[i - 1] + 1e-12);
    CHECK(nlimit[i] <= nlimit[i - 1] + 1e-12);
  }
  CHECK(stine.front() > 1e-6);  // genuinely nonzero at small windows

  // The one-sided identity defect stays below its two-sided magnitude.
  for (std::size_t j : {2, 4, 8}) {
    const double signed_defect = defect_cstar_identity(handle, 1, x, 1, j, 2 * j);
    CHECK(signed_defect <= norm_limit_check(handle, 1, x, 1, j, 2 * j) + 1e-15);
  }

  // Multiplicativity does not improve: the witness pair keeps the defect
  // bounded away from zero while the comparison defects decay.
  const AlgElement y = psi(*sys, 1, GroupAlgebraElement::delta(z, {-1}));
  const double mult_small = defect_multiplicative(handle, 1, x, y, 4, 8);
  const double mult_large = defect_multiplicative(handle, 1, x, y, 8, 16);
  CHECK(mult_small > 0.01);
  CHECK(mult_large > 0.01);
}

TEST_CASE("bullet product on the idempotent system lands on the convolution") {
  Group z5 = Group::finite(cyclic_table(5));
  auto full = std::make_shared<const ApproximationSystem>(
      ApproximationSystem::full_group_stages(z5, 8));
  SystemHandle handle(full);

  const AlgElement x = psi(*full, 0, GroupAlgebraElement::delta(z5, {3}));
  const AlgElement y = psi(*full, 0, GroupAlgebraElement::delta(z5, {4}));
  StageSchedule sched(3, {StageTuple{1, 2, 4}, StageTuple{2, 4, 7}});
  BulletProduct bp = bullet_product(handle, 0, x, y, sched);
  for (double d : bp.diagnostics) CHECK(d <= 1e-12);

  // 3 + 4 = 2 in Z/5: the pushforward of the representative is delta_2.
  GroupAlgebraElement push = phi(*full, 7, bp.representative);
  REQUIRE(push.support_size() == 1);
  CHECK(std::abs(push.coeff({2}) - Complex(1.0, 0.0)) <= 1e-12);

  for (std::size_t n : {1, 2, 3}) {
    for (std::size_t m : {4, 6}) {
      CHECK(product_vs_oracle(*full, 0, x, y, n, m) <= 1e-10);
    }
  }
}

TEST_CASE("product estimator approaches the convolution oracle on the integers") {
  ApproximationSystem sys = ApproximationSystem::from_sequence(box_sequence(1, 24));
  const Group& z = sys.group();
  const AlgElement x = psi(sys, 2, GroupAlgebraElement::delta(z, {1}));

  const AlgElement u = AlgElement::unit(sys.algebra(0));
  CHECK(product_vs_oracle(sys, 0, u, u, 2, 4) <= 1e-10);

  const double coarse = product_vs_oracle(sys, 2, x, x, 4, 8);
  const double fine = product_vs_oracle(sys, 2, x, x, 8, 16);
  CHECK(fine <= coarse + 1e-12);
  CHECK(coarse < 1.0);
}

TEST_CASE("almost-multiplicative-domain check") {
  ApproximationSystem sys = ApproximationSystem::from_sequence(box_sequence(1, 20));
  const Group& z = sys.group();
  std::mt19937_64 rng(29);

  // Exact at the unit: eta and lhs both vanish.
  StinespringLemmaResult unit_res = stinespring_lemma_check(
      sys, 4, GroupAlgebraElement::unit(z), random_stage_element(sys.algebra(4), rng));
  CHECK(unit_res.eta <= 1e-9);
  CHECK(unit_res.lhs <= 1e-9);
  CHECK(unit_res.pass);

  // The hop element passes at growing windows.
  const GroupAlgebraElement hop =
      GroupAlgebraElement::delta(z, {1}) + GroupAlgebraElement::delta(z, {-1});
  for (std::size_t n : {4, 8, 16}) {
    StinespringLemmaResult res =
        stinespring_lemma_check(sys, n, hop, random_stage_element(sys.algebra(n), rng));
    CHECK(res.pass);
    CHECK(res.eta > 0.0);
  }

  // Full windows over a finite group: everything collapses to zero.
  Group z5 = Group::finite(cyclic_table(5));
  ApproximationSystem full = ApproximationSystem::full_group_stages(z5, 3);
  const GroupAlgebraElement sa =
      GroupAlgebraElement::delta(z5, {1}) + GroupAlgebraElement::delta(z5, {4});
  StinespringLemmaResult res =
      stinespring_lemma_check(full, 1, sa, random_stage_element(full.algebra(1), rng));
  CHECK(res.eta <= 1e-9);
  CHECK(res.lhs <= 1e-9);
  CHECK(res.pass);

  CHECK_THROWS_AS(stinespring_lemma_check(sys, 4, GroupAlgebraElement::delta(z, {1}),
                                          random_stage_element(sys.algebra(4), rng)),
                  std::invalid_argument);
}

TEST_CASE("run_audit: verdicts, determinism, error capture") {
  const std::string config_text = R"json({
    "system": {"kind": "af_doubling", "stages": 6},
    "conditions": [
      {"condition": "stinespring", "k": 1,
       "elements": ["random(1)", "random(2)"],
       "schedule": {"tuples": [[1, 2, 4], [2, 3, 5]]},
       "tolerance": 1e-9},
      {"condition": "multiplicative", "k": 1,
       "elements": ["random(1)", "unit"],
       "schedule": {"tuples": [[2, 4], [3, 5]]},
       "tolerance": 1e-9},
      {"condition": "cstar_identity", "k": 1, "r": 2, "pattern": "offdiag",
       "elements": ["random(3)"],
       "schedule": {"tuples": [[2, 4]]},
       "tolerance": 1e-9},
      {"condition": "psi_mult", "k": 0,
       "elements": ["delta(1)", "delta(2)"],
       "schedule": {"tuples": [[1]]},
       "tolerance": 1e-9}
    ],
    "seed": 42
  })json";

  AuditConfig config = parse_audit_config(config_text);
  std::vector<DefectReport> reports = run_audit(config);
  REQUIRE(reports.size() == 4);

  CHECK(reports[0].condition == "stinespring");
  CHECK(reports[0].verdict == "pass");
  CHECK(reports[0].defects.size() == 2);
  for (const TupleDefect& d : reports[0].defects) CHECK(d.value <= 1e-12);
  CHECK_FALSE(reports[0].is_signed);
  CHECK(reports[0].seed == 42);

  CHECK(reports[1].verdict == "pass");
  CHECK(reports[2].verdict == "pass");
  CHECK(reports[2].is_signed);

  // psi_mult cannot run on a tower without group structure; the batch
  // captures the failure and moves on.
  CHECK(reports[3].verdict.rfind("error:", 0) == 0);
  CHECK(reports[3].defects.empty());

  // Determinism: identical configs give identical defect values.
  std::vector<DefectReport> again = run_audit(config);
  REQUIRE(again.size() == reports.size());
  for (std::size_t i = 0; i < reports.size(); ++i) {
    REQUIRE(again[i].defects.size() == reports[i].defects.size());
    for (std::size_t t = 0; t < reports[i].defects.size(); ++t) {
      CHECK(again[i].defects[t].value == reports[i].defects[t].value);
    }
    CHECK(again[i].verdict == reports[i].verdict);
  }
}

TEST_CASE("run_audit: the non-multiplicativity witness fails with its phrase") {
  const std::string config_text = R"json({
    "system": {"kind": "boxes", "dim": 1, "max_n": 16},
    "conditions": [
      {"condition": "multiplicative", "k": 1,
       "elements": ["psi(1, delta(1))", "psi(1, delta(-1))"],
       "schedule": {"doubling": {"start": 2, "count": 2}},
       "tolerance": 0.005},
      {"condition": "psi_mult",
       "elements": ["delta(-1)", "delta(1)"],
       "schedule": {"tuples": [[1], [2], [3]]},
       "tolerance": 1e-9, "target": 1.0}
    ],
    "seed": 7
  })json";

  std::vector<DefectReport> reports = run_audit(parse_audit_config(config_text));
  REQUIRE(reports.size() == 2);
  CHECK(reports[0].verdict == "not asymptotically multiplicative at tested scales");
  for (const TupleDefect& d : reports[0].defects) CHECK(d.value > 0.005);
  CHECK(reports[1].verdict == "pass");
  for (const TupleDefect& d : reports[1].defects) {
    CHECK(std::abs(d.value - 1.0) <= 1e-9);
  }

  // An empty condition list is an empty report list.
  CHECK(run_audit(parse_audit_config(
            R"json({"system": {"kind": "af_doubling", "stages": 3}})json"))
            .empty());
}
