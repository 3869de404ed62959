#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>

#include "cpcsys/config.hpp"
#include "cpcsys/expr.hpp"
#include "cpcsys/serialize.hpp"

using namespace cpcsys;
using Complex = std::complex<double>;

TEST_CASE("group sums: coefficients, signs, exponents, errors") {
  Group z = Group::integer_lattice(1);

  GroupAlgebraElement a = parse_group_sum("delta(1)+delta(-1)", z);
  CHECK(a.support_size() == 2);
  CHECK(a.coeff({1}) == Complex(1.0, 0.0));
  CHECK(a.coeff({-1}) == Complex(1.0, 0.0));

  GroupAlgebraElement b = parse_group_sum("0.5*delta(2) - delta(0)", z);
  CHECK(b.coeff({2}) == Complex(0.5, 0.0));
  CHECK(b.coeff({0}) == Complex(-1.0, 0.0));

  GroupAlgebraElement c = parse_group_sum("-delta(3)+2*delta(3)", z);
  CHECK(c.support_size() == 1);
  CHECK(c.coeff({3}) == Complex(1.0, 0.0));

  GroupAlgebraElement d = parse_group_sum("1e-3*delta(1)", z);
  CHECK(d.coeff({1}) == Complex(1e-3, 0.0));

  Group z2 = Group::integer_lattice(2);
  GroupAlgebraElement e = parse_group_sum("delta((1,0))+delta((0,-1))", z2);
  CHECK(e.coeff({1, 0}) == Complex(1.0, 0.0));
  CHECK(e.coeff({0, -1}) == Complex(1.0, 0.0));

  CHECK_THROWS_AS(parse_group_sum("", z), std::invalid_argument);
  CHECK_THROWS_AS(parse_group_sum("gamma(1)", z), std::invalid_argument);
  CHECK_THROWS_AS(parse_group_sum("delta(1", z), std::invalid_argument);
  CHECK_THROWS_AS(parse_group_sum("delta(x)", z), std::invalid_argument);
}

TEST_CASE("element expressions against a window system") {
  ApproximationSystem sys = ApproximationSystem::from_sequence(box_sequence(1, 4));
  ElementExprContext ctx;
  ctx.algebra = &sys.algebra(2);
  ctx.approx = &sys;
  ctx.stage = 2;
  ctx.seed = 99;

  AlgElement u = parse_element_expr("unit", ctx);
  CHECK((u.block(0) - Eigen::MatrixXcd::Identity(5, 5)).cwiseAbs().maxCoeff() == 0.0);
  CHECK(parse_element_expr("zero", ctx).block(0).cwiseAbs().maxCoeff() == 0.0);

  AlgElement p = parse_element_expr("psi(2, delta(1))", ctx);
  AlgElement direct = psi(sys, 2, GroupAlgebraElement::delta(sys.group(), {1}));
  CHECK((p.block(0) - direct.block(0)).cwiseAbs().maxCoeff() == 0.0);

  // e(g, h): window F_2 = {-2,...,2} indexes -2 -> 0, ..., 2 -> 4.
  AlgElement m = parse_element_expr("e(1, -2)", ctx);
  CHECK(m.block(0)(3, 0) == Complex(1.0, 0.0));
  CHECK(m.block(0).cwiseAbs().sum() == 1.0);

  AlgElement r1 = parse_element_expr("random(5)", ctx);
  AlgElement r2 = parse_element_expr("random(5)", ctx);
  CHECK((r1.block(0) - r2.block(0)).cwiseAbs().maxCoeff() == 0.0);  // deterministic
  CHECK(std::abs(operator_norm(r1) - 1.0) <= 1e-12);                 // normalized
  AlgElement r3 = parse_element_expr("random(6)", ctx);
  CHECK((r1.block(0) - r3.block(0)).cwiseAbs().maxCoeff() > 1e-3);

  CHECK_THROWS_AS(parse_element_expr("psi(1, delta(1))", ctx), std::invalid_argument);
  CHECK_THROWS_AS(parse_element_expr("e(9, 0)", ctx), std::invalid_argument);
  CHECK_THROWS_AS(parse_element_expr("banana", ctx), std::invalid_argument);
  CHECK_THROWS_AS(parse_element_expr("random(-1)", ctx), std::invalid_argument);

  ElementExprContext bare;
  FiniteDimCstar alg({2, 3});
  bare.algebra = &alg;
  bare.seed = 1;
  CHECK(parse_element_expr("unit", bare).algebra() == alg);
  CHECK_THROWS_AS(parse_element_expr("psi(0, delta(1))", bare), std::invalid_argument);
  CHECK_THROWS_AS(parse_element_expr("e(0, 0)", bare), std::invalid_argument);
}

TEST_CASE("config parsing: kinds, strictness, round-trip stability") {
  const std::string text = R"json({
    "system": {
      "kind": "boxes", "dim": 1, "max_n": 16,
      "subsequence": {"eps": "pow2", "count": 3, "horizon": 512}
    },
    "conditions": [
      {"condition": "stinespring", "k": 1,
       "elements": ["psi(1, delta(1))", "psi(1, delta(1))"],
       "schedule": {"doubling": {"start": 2, "count": 2}},
       "tolerance": 0.5}
    ],
    "seed": 11,
    "grid_factor": 64,
    "max_stage": 8
  })json";

  AuditConfig cfg = parse_audit_config(text);
  CHECK(cfg.system.kind == SystemConfig::Kind::kBoxes);
  CHECK(cfg.system.max_n == 16);
  REQUIRE(cfg.system.subsequence.has_value());
  CHECK(cfg.system.subsequence->pow2);
  CHECK(cfg.system.subsequence->count == 3);
  CHECK(cfg.conditions.size() == 1);
  CHECK(cfg.conditions[0].schedule.doubling);
  CHECK(cfg.seed == 11);
  REQUIRE(cfg.grid_factor.has_value());
  CHECK(*cfg.grid_factor == 64);
  REQUIRE(cfg.max_stage.has_value());
  CHECK(*cfg.max_stage == 8);

  // Round trip: serialize(parse(.)) is a fixed point of parse-then-serialize.
  const std::string canon = audit_config_to_json(cfg);
  const std::string canon2 = audit_config_to_json(parse_audit_config(canon));
  CHECK(canon == canon2);

  // Unknown keys are rejected at every level.
  CHECK_THROWS_AS(parse_audit_config(R"json({"system": {"kind": "boxes", "dim": 1,
    "max_n": 4}, "bogus": 1})json"),
                  std::invalid_argument);
  CHECK_THROWS_AS(parse_audit_config(R"json({"system": {"kind": "boxes", "dim": 1,
    "max_n": 4, "extra": 2}})json"),
                  std::invalid_argument);
  CHECK_THROWS_AS(parse_audit_config(R"json({"system": {"kind": "boxes", "dim": 1,
    "max_n": 4, "subsequence": {"eps": "pow2", "count": 2, "junk": 0}}})json"),
                  std::invalid_argument);
  CHECK_THROWS_AS(parse_audit_config(R"json({"system": {"kind": "mystery"}})json"),
                  std::invalid_argument);
  CHECK_THROWS_AS(parse_audit_config("not json at all"), std::invalid_argument);
  CHECK_THROWS_AS(parse_audit_config(R"json({"conditions": []})json"),
                  std::invalid_argument);  // missing system

  // eps list form and explicit subsequence form.
  AuditConfig eps_list = parse_audit_config(R"json({"system": {"kind": "boxes",
    "dim": 1, "max_n": 8, "subsequence": {"eps": [1.0, 0.5], "horizon": 64}}})json");
  REQUIRE(eps_list.system.subsequence.has_value());
  CHECK(eps_list.system.subsequence->eps == std::vector<double>{1.0, 0.5});
  AuditConfig expl = parse_audit_config(R"json({"system": {"kind": "boxes",
    "dim": 1, "max_n": 8, "subsequence": {"explicit": [0, 2, 5]}}})json");
  REQUIRE(expl.system.subsequence.has_value());
  CHECK(expl.system.subsequence->is_explicit);
  CHECK(expl.system.subsequence->explicit_indices == std::vector<std::size_t>{0, 2, 5});
  CHECK(audit_config_to_json(expl) ==
        audit_config_to_json(parse_audit_config(audit_config_to_json(expl))));
}

TEST_CASE("building systems from configs") {
  // Boxes with a pow2 subsequence: certificate attached, all stages kept.
  AuditConfig boxes = parse_audit_config(R"json({"system": {"kind": "boxes",
    "dim": 1, "max_n": 16, "subsequence": {"eps": "pow2", "count": 3,
    "horizon": 512}}})json");
  BuiltSystem built = build_system(boxes.system);
  REQUIRE(built.approx != nullptr);
  CHECK(built.approx->stage_count() == 17);
  REQUIRE(built.approx->certificate().has_value());
  CHECK(built.approx->certificate()->indices == std::vector<std::size_t>{0, 1, 12});
  CHECK(built.handle().stage_count() == 17);

  // Full finite group.
  AuditConfig full = parse_audit_config(R"json({"system": {"kind": "full_group",
    "group": {"table": [[0,1,2],[1,2,0],[2,0,1]]}, "stages": 4}})json");
  BuiltSystem fg = build_system(full.system);
  REQUIRE(fg.approx != nullptr);
  CHECK(fg.approx->stage_count() == 4);
  CHECK(fg.approx->algebra(0).block_dims() == std::vector<int>{3});

  // Doubling tower.
  AuditConfig af = parse_audit_config(
      R"json({"system": {"kind": "af_doubling", "stages": 4}})json");
  BuiltSystem aft = build_system(af.system);
  REQUIRE(aft.cpc != nullptr);
  CHECK(aft.cpc->algebra(3).block_dims() == std::vector<int>{8});

  // Explicit window sets.
  AuditConfig expl = parse_audit_config(R"json({"system": {"kind": "explicit_sets",
    "group": {"lattice": 1}, "sets": [[[0]], [[-1],[0],[1]]]}})json");
  BuiltSystem es = build_system(expl.system);
  REQUIRE(es.approx != nullptr);
  CHECK(es.approx->stage(1).size() == 3);

  // Explicit maps: a contractive step builds; a non-contractive one refuses.
  AuditConfig good = parse_audit_config(R"json({"system": {"kind": "explicit_maps",
    "algebras": [[1], [1]],
    "steps": [{"rows": 1, "cols": 1, "entries": [[0.5, 0.0]]}]}})json");
  BuiltSystem gm = build_system(good.system);
  REQUIRE(gm.cpc != nullptr);
  CHECK(gm.cpc->step_count() == 1);

  AuditConfig bad = parse_audit_config(R"json({"system": {"kind": "explicit_maps",
    "algebras": [[1], [1]],
    "steps": [{"rows": 1, "cols": 1, "entries": [[1.5, 0.0]]}]}})json");
  CHECK_THROWS_WITH_AS(build_system(bad.system), doctest::Contains("not contractive"),
                       std::invalid_argument);

  // materialize_cpc caps at max_stage and produces a verified tower.
  CpcSystem dense = materialize_cpc(built, 4);
  CHECK(dense.stage_count() == 5);
  CpcSystem full_dense = materialize_cpc(aft, std::nullopt);
  CHECK(full_dense.stage_count() == 4);
}

TEST_CASE("report serialization: field order, determinism, CSV flattening") {
  DefectReport rep;
  rep.condition = "stinespring";
  rep.system = "integer-lattice windows";
  rep.k = 1;
  rep.r = 1;
  rep.elements = {"psi(1, delta(1))", "psi(1, delta(1))"};
  rep.schedule = {StageTuple{2, 4, 8}};
  rep.defects = {TupleDefect{StageTuple{2, 4, 8}, 0.125}};
  rep.tolerance = 1e-9;
  rep.is_signed = false;
  rep.verdict = "pass";
  rep.seed = 3;
  rep.wall_ms = 1.5;

  ordered_json j = report_to_json(rep);
  std::vector<std::string> keys;
  for (const auto& item : j.items()) keys.push_back(item.key());
  CHECK(keys == std::vector<std::string>{"condition", "system", "k", "r", "elements",
                                         "schedule", "defects", "tolerance", "signed",
                                         "verdict", "seed", "wall_ms"});
  CHECK(j["defects"][0]["j"] == 2);
  CHECK(j["defects"][0]["n"] == 4);
  CHECK(j["defects"][0]["m"] == 8);
  CHECK(j["defects"][0]["value"] == 0.125);

  const std::string text = reports_to_json({rep});
  CHECK(text == reports_to_json({rep}));
  CHECK(text.back() == '\n');

  const std::string csv = reports_to_csv({rep});
  CHECK(csv.find("condition,system,k,r,elements,j,n,m,value,tolerance,signed,verdict,"
                 "seed\n") == 0);
  CHECK(csv.find("stinespring,integer-lattice windows,1,1,"
                 "psi(1| delta(1))|psi(1| delta(1))") == std::string::npos);
  CHECK(csv.find("\"psi(1, delta(1))|psi(1, delta(1))\"") != std::string::npos);
  CHECK(csv.find(",2,4,8,0.125,") != std::string::npos);

  // Matrix JSON round trip.
  Eigen::MatrixXcd m(2, 2);
  m << Complex(1, 2), Complex(0, -1), Complex(0.5, 0), Complex(-3, 4);
  Eigen::MatrixXcd back = matrix_from_json(matrix_to_json(m), "test");
  CHECK((m - back).cwiseAbs().maxCoeff() == 0.0);
  CHECK_THROWS_AS(matrix_from_json(ordered_json::object(), "test"),
                  std::invalid_argument);

  // Group algebra JSON keeps the deterministic support order.
  Group z = Group::integer_lattice(1);
  GroupAlgebraElement a = parse_group_sum("delta(2)-delta(-1)", z);
  ordered_json ga = group_algebra_to_json(a);
  REQUIRE(ga.size() == 2);
  CHECK(ga[0]["element"] == std::vector<std::int64_t>{-1});
  CHECK(ga[0]["re"] == -1.0);
  CHECK(ga[1]["element"] == std::vector<std::int64_t>{2});
}
