#include "cpcsys/cli.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <Eigen/Core>

#include "cpcsys/audit.hpp"
#include "cpcsys/config.hpp"
#include "cpcsys/expr.hpp"
#include "cpcsys/presets.hpp"
#include "cpcsys/serialize.hpp"

namespace cpcsys {

namespace {

constexpr int kExitOk = 0;
constexpr int kExitVerdictFail = 1;
constexpr int kExitVerifyFail = 2;
constexpr int kExitConfigError = 3;

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

std::string group_element_str(const GroupElement& g) {
  std::string s;
  if (g.size() > 1) s += "(";
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(g[i]);
  }
  if (g.size() > 1) s += ")";
  return s;
}

// Loads the config text from --config or --preset (exactly one given).
AuditConfig load_config(const std::string& config_path, const std::string& preset) {
  if (config_path.empty() == preset.empty()) {
    throw std::invalid_argument("give exactly one of --config or --preset");
  }
  std::string text;
  if (!preset.empty()) {
    const std::optional<std::string> json = preset_config_json(preset);
    if (!json) {
      std::string names;
      for (const std::string& n : preset_names()) {
        if (!names.empty()) names += ", ";
        names += n;
      }
      throw std::invalid_argument("unknown preset \"" + preset + "\" (have: " + names +
                                  ")");
    }
    text = *json;
  } else {
    std::ifstream in(config_path);
    if (!in) throw std::invalid_argument("cannot read config file " + config_path);
    std::ostringstream buf;
    buf << in.rdbuf();
    text = buf.str();
  }
  return parse_audit_config(text);
}

struct CommonOptions {
  std::string config_path;
  std::string preset;

  void attach(CLI::App* cmd) {
    cmd->add_option("--config", config_path, "Path to a config JSON file");
    cmd->add_option("--preset", preset, "Name of a built-in preset");
  }
};

int cmd_build(const CommonOptions& common, std::optional<std::size_t> max_stage_cli,
              std::ostream& out, std::ostream& err) {
  AuditConfig cfg;
  try {
    cfg = load_config(common.config_path, common.preset);
  } catch (const std::exception& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfigError;
  }

  const std::optional<std::size_t> cap =
      max_stage_cli ? max_stage_cli : (cfg.max_stage ? cfg.max_stage : std::optional<std::size_t>(32));
  try {
    const BuiltSystem built = build_system(cfg.system);
    const CpcSystem dense = materialize_cpc(built, cap);
    const SystemHandle handle = built.handle();

    out << built.describe() << "\n";
    out << "stages: " << handle.stage_count() << " (steps verified up to stage "
        << dense.stage_count() - 1 << ")\n";
    for (std::size_t n = 0; n < handle.stage_count(); ++n) {
      out << "  stage " << n << ": " << handle.algebra(n).describe() << "\n";
    }
    if (built.approx && built.approx->certificate()) {
      const SummabilityCertificate& cert = *built.approx->certificate();
      out << "summability certificate: stages";
      for (std::size_t idx : cert.indices) out << " " << idx;
      if (!cert.eps.empty()) {
        out << " for eps";
        for (double e : cert.eps) out << " " << fmt(e);
      }
      out << "\n";
    }
    return kExitOk;
  } catch (const std::exception& e) {
    err << "verification failed: " << e.what() << "\n";
    return kExitVerifyFail;
  }
}

int cmd_audit(const CommonOptions& common, const std::string& out_path,
              const std::string& format, std::optional<std::uint64_t> seed,
              std::optional<int> grid_factor, std::optional<std::size_t> max_stage,
              std::ostream& out, std::ostream& err) {
  AuditConfig cfg;
  std::vector<DefectReport> reports;
  try {
    cfg = load_config(common.config_path, common.preset);
    if (seed) cfg.seed = *seed;
    if (grid_factor) cfg.grid_factor = grid_factor;
    if (max_stage) cfg.max_stage = max_stage;
    if (!out_path.empty()) cfg.out = out_path;
    reports = run_audit(cfg);
  } catch (const std::exception& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfigError;
  }

  const std::string rendered =
      (format == "csv") ? reports_to_csv(reports) : reports_to_json(reports);
  if (cfg.out && !cfg.out->empty()) {
    std::ofstream file(*cfg.out);
    if (!file) {
      err << "cannot write report to " << *cfg.out << "\n";
      return kExitConfigError;
    }
    file << rendered;
    out << "wrote " << reports.size() << " report(s) to " << *cfg.out << "\n";
  } else {
    out << rendered;
  }

  bool all_pass = true;
  for (const DefectReport& r : reports) {
    if (r.verdict != "pass") {
      all_pass = false;
      err << r.condition << ": " << r.verdict << "\n";
    }
  }
  return all_pass ? kExitOk : kExitVerdictFail;
}

int cmd_product(const CommonOptions& common, std::size_t k, const std::string& x_expr,
                const std::string& y_expr, std::size_t start, std::size_t count,
                std::optional<int> grid_factor, std::ostream& out, std::ostream& err) {
  try {
    const AuditConfig cfg = load_config(common.config_path, common.preset);
    const BuiltSystem built = build_system(cfg.system);
    const SystemHandle handle = built.handle();

    ElementExprContext ctx;
    ctx.algebra = &handle.algebra(k);
    ctx.approx = built.approx.get();
    ctx.stage = k;
    ctx.seed = cfg.seed;
    const AlgElement x = parse_element_expr(x_expr, ctx);
    const AlgElement y = parse_element_expr(y_expr, ctx);

    StageSchedule schedule = StageSchedule::doubling(start, count, 3);
    schedule.validate(handle.stage_count());
    if (!schedule.tuples().empty() && schedule.tuples().front().j < k) {
      throw std::invalid_argument("schedule must start at or after stage k");
    }

    const BulletProduct bp = bullet_product(handle, k, x, y, schedule);
    out << "representative at stage " << bp.top.m << " (via n=" << bp.top.n << ")\n";
    out << "norm: " << fmt(operator_norm(bp.representative)) << "\n";

    if (built.approx) {
      const int gf = grid_factor ? *grid_factor
                                 : cfg.grid_factor.value_or(kDefaultGridFactor);
      const GroupAlgebraElement push = phi(*built.approx, bp.top.m, bp.representative);
      out << "phi-pushforward (" << push.support_size() << " group elements):\n";
      for (const auto& [g, c] : push.coeffs()) {
        out << "  delta(" << group_element_str(g) << "): " << fmt(c.real());
        if (c.imag() != 0.0) out << (c.imag() > 0 ? " + " : " - ") << fmt(std::abs(c.imag())) << "i";
        out << "\n";
      }
      const NormEnclosure norm = reduced_norm(push, gf);
      out << "pushforward reduced norm in [" << fmt(norm.lower) << ", "
          << fmt(norm.upper) << "]\n";
    }

    out << "comparison-defect curve:\n";
    const auto& tuples = schedule.tuples();
    for (std::size_t i = 0; i < tuples.size(); ++i) {
      out << "  (j=" << tuples[i].j << ", n=" << tuples[i].n << ", m=" << tuples[i].m
          << "): " << fmt(bp.diagnostics[i]) << "\n";
    }
    return kExitOk;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfigError;
  }
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  if (const char* threads = std::getenv("CPCAUDIT_THREADS")) {
    const int n = std::atoi(threads);
    if (n > 0) Eigen::setNbThreads(n);
  }

  CLI::App app{"Construct c.p.c. approximation systems and audit their encoding conditions"};
  app.require_subcommand(1);

  // build
  CLI::App* build = app.add_subcommand("build", "Construct and verify a system");
  CommonOptions build_common;
  build_common.attach(build);
  std::optional<std::size_t> build_max_stage;
  build->add_option("--max-stage", build_max_stage,
                    "Verify dense steps only up to this stage (default 32)");

  // audit
  CLI::App* audit = app.add_subcommand("audit", "Run configured condition audits");
  CommonOptions audit_common;
  audit_common.attach(audit);
  std::string out_path;
  std::string format = "json";
  std::optional<std::uint64_t> seed;
  std::optional<int> grid_factor;
  std::optional<std::size_t> max_stage;
  audit->add_option("--out", out_path, "Write the report here instead of stdout");
  audit->add_option("--format", format, "Report format")
      ->check(CLI::IsMember({"json", "csv"}));
  audit->add_option("--seed", seed, "Override the config seed");
  audit->add_option("--grid-factor", grid_factor,
                    "Override the certified-norm grid factor");
  audit->add_option("--max-stage", max_stage, "Override the dense-step cap");

  // product
  CLI::App* product = app.add_subcommand("product", "Estimate a bullet product");
  CommonOptions product_common;
  product_common.attach(product);
  std::size_t prod_k = 0;
  std::string x_expr;
  std::string y_expr;
  std::size_t prod_start = 2;
  std::size_t prod_count = 3;
  std::optional<int> prod_grid_factor;
  product->add_option("k", prod_k, "Stage the factors live at")->required();
  product->add_option("x", x_expr, "Left factor expression")->required();
  product->add_option("y", y_expr, "Right factor expression")->required();
  product->add_option("--start", prod_start, "First doubling base j (default 2)");
  product->add_option("--count", prod_count, "Number of (j, 2j, 4j) tuples (default 3)");
  product->add_option("--grid-factor", prod_grid_factor,
                      "Certified-norm grid factor for the pushforward");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    std::ostringstream msg;
    const int code = app.exit(e, msg, msg);
    out << msg.str();
    // Treat help/version as success, anything else as a usage error.
    return code == 0 ? kExitOk : kExitConfigError;
  }

  if (build->parsed()) return cmd_build(build_common, build_max_stage, out, err);
  if (audit->parsed()) {
    return cmd_audit(audit_common, out_path, format, seed, grid_factor, max_stage, out,
                     err);
  }
  return cmd_product(product_common, prod_k, x_expr, y_expr, prod_start, prod_count,
                     prod_grid_factor, out, err);
}

}  // namespace cpcsys
