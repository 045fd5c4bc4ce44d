// qil: batch verification and single-instance checking for n-quasi
// intertwining operator classes. Subcommands: verify, check, construct,
// spectral, gen. Exit codes: 0 pass, 1 theorem failure, 2 invalid input,
// 3 I/O error.

#include "qil/json_io.hpp"
#include "qil/suite.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

namespace {

using namespace qil;

ToleranceConfig tolerance_from_env() {
  ToleranceConfig tol;
  if (const char* env = std::getenv("QIL_TOL")) {
    try {
      tol.zero_rel = std::stod(env);
    } catch (const std::exception&) {
      throw InvalidInputError("QIL_TOL is not a number");
    }
  }
  return tol;
}

std::pair<int, int> parse_dims(const std::string& text) {
  const auto dots = text.find("..");
  if (dots == std::string::npos) {
    const int d = std::stoi(text);
    return {d, d};
  }
  return {std::stoi(text.substr(0, dots)), std::stoi(text.substr(dots + 2))};
}

std::optional<Conjugation> load_conjugation(const std::string& path) {
  if (path.empty()) return std::nullopt;
  return Conjugation(load_matrix_file(path));
}

int cmd_verify(const std::vector<std::string>& suites, int trials, const std::string& dims,
               std::uint64_t seed, double tol_override, const std::string& report_path,
               bool sabotage) {
  SuiteConfig config;
  if (!suites.empty()) config.suites = suites;
  config.trials = trials;
  std::tie(config.dim_min, config.dim_max) = parse_dims(dims);
  config.seed = seed;
  config.tol = tolerance_from_env();
  if (tol_override > 0) config.tol.zero_rel = tol_override;
  config.report_path = report_path;
  config.sabotage = sabotage;

  const SuiteReport report = run_suite(config);
  const std::string text = dump_json(suite_report_to_json(report));
  if (!report_path.empty()) write_text_file(report_path, text);
  std::cout << text;
  return report.overall ? 0 : 1;
}

int cmd_check(const std::string& s_path, const std::string& t_path, const std::string& family_name,
              int m, int n, const std::string& kind_name, const std::string& conj_path) {
  const ToleranceConfig tol = tolerance_from_env();
  const CMatrix s = load_matrix_file(s_path);
  const ClassFamily family = family_from_string(family_name);
  const DKind kind = kind_name.empty() ? family_kind(family) : dkind_from_string(kind_name);
  CMatrix t;
  if (family == ClassFamily::LeftMInvertiblePair) {
    if (t_path.empty()) throw InvalidInputError("left-m-invertible-pair needs a second matrix file");
    t = load_matrix_file(t_path);
  } else {
    t = t_path.empty() ? CMatrix(s.adjoint()) : load_matrix_file(t_path);
  }
  std::optional<Conjugation> c = load_conjugation(conj_path);
  if (family_uses_conjugation(family) && !c)
    throw InvalidInputError(std::string(to_string(family)) + " needs --conjugation");

  OperatorPair pair(t, s, kind);
  const ClassifyOutcome outcome = classify(pair, n, std::max(m, 1), c, tol);
  const QuasiResidual at_m = c ? quasi_residual_conjugated(t, s, *c, kind, m, n)
                               : quasi_residual(pair, m, n);
  const bool passed = at_m.scaled().within(tol);

  Json cert_list = Json::array();
  for (const auto& cert : outcome.certificates)
    cert_list.push_back(Json{{"m", cert.spec.m},
                             {"residual_norm", cert.residual_norm},
                             {"scale", cert.scale},
                             {"passed", cert.passed}});
  Json j{{"class", to_string(family)},
         {"kind", to_string(kind)},
         {"m", m},
         {"n", n},
         {"passed", passed},
         {"residual_norm", at_m.norm},
         {"scale", at_m.scale},
         {"minimal_m", outcome.minimal_m ? Json(*outcome.minimal_m) : Json(nullptr)},
         {"strict", outcome.strict},
         {"certificates", std::move(cert_list)}};
  std::cout << dump_json(j);
  return passed ? 0 : 1;
}

int cmd_construct(const std::string& s_path, const std::string& t_path,
                  const std::string& theorem, int m, int n, int p, const std::string& kind_name,
                  const std::string& conj_path) {
  const ToleranceConfig tol = tolerance_from_env();
  const CMatrix s = load_matrix_file(s_path);
  const DKind kind = kind_name.empty() ? DKind::Delta : dkind_from_string(kind_name);
  ConstructionCertificate cert;
  if (theorem == "pro00") {
    cert = construct_aqp(kind, s, m, n, tol);
  } else if (theorem == "pro00-b") {
    cert = construct_b(kind, s, m, n, tol);
  } else if (theorem == "pro110") {
    const auto c = load_conjugation(conj_path);
    if (!c) throw InvalidInputError("pro110 needs --conjugation");
    cert = construct_conjugated(kind, s, *c, m, n, tol);
  } else if (theorem == "thm10-cp") {
    const CMatrix t = t_path.empty() ? CMatrix(s.adjoint()) : load_matrix_file(t_path);
    cert = left_inverse_cp(t, s, m, p, tol);
  } else {
    throw InvalidInputError("unknown theorem: " + theorem +
                            " (expected pro00, pro00-b, pro110 or thm10-cp)");
  }
  std::cout << dump_json(certificate_to_json(cert));
  return cert.passed ? 0 : 1;
}

int cmd_spectral(const std::string& s_path, const std::string& report_path) {
  const ToleranceConfig tol = tolerance_from_env();
  const CMatrix s = load_matrix_file(s_path);
  const std::string text = dump_json(spectral_report_to_json(spectral_report(s, tol)));
  if (!report_path.empty()) write_text_file(report_path, text);
  std::cout << text;
  return 0;
}

int cmd_gen(const std::string& family_name, int m, int n, int dim, std::uint64_t seed,
            const std::string& out_prefix) {
  const ToleranceConfig tol = tolerance_from_env();
  ClassSpec spec;
  spec.family = family_from_string(family_name);
  spec.m = m;
  spec.n = n;
  const GeneratedInstance inst = gen_instance(spec, dim, seed, tol);
  if (!out_prefix.empty()) {
    write_text_file(out_prefix + "_S.json", dump_json(matrix_to_json(inst.S)));
    write_text_file(out_prefix + "_T.json", dump_json(matrix_to_json(inst.T)));
    if (inst.C) write_text_file(out_prefix + "_J.json", dump_json(matrix_to_json(inst.C->J)));
  }
  Json j = certificate_to_json(inst.certificate);
  if (out_prefix.empty()) {
    j["S"] = matrix_to_json(inst.S);
    j["T"] = matrix_to_json(inst.T);
    if (inst.C) j["J"] = matrix_to_json(inst.C->J);
  }
  std::cout << dump_json(j);
  return inst.certificate.passed ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"qil: numerical laboratory for n-quasi intertwining operator classes"};
  app.require_subcommand(1);

  // verify
  auto* verify = app.add_subcommand("verify", "run seeded batch verification suites");
  std::vector<std::string> suites;
  int trials = 100;
  std::string dims = "2..6";
  std::uint64_t seed = 0;
  double tol_override = 0;
  std::string report_path;
  bool sabotage = false;
  verify->add_option("--suite", suites, "suites to run (calculus, classes, spectral, pro00, pro110, thm10, pro10, thm01, thm30, all)");
  verify->add_option("--trials", trials, "trials per suite");
  verify->add_option("--dims", dims, "dimension range, e.g. 2..6");
  verify->add_option("--seed", seed, "master seed");
  verify->add_option("--tol", tol_override, "relative residual tolerance override");
  verify->add_option("--report", report_path, "write the report JSON to this path");
  verify->add_flag("--sabotage", sabotage, "break one hypothesis per trial (vacuous-path test)");

  // check
  auto* check = app.add_subcommand("check", "test class membership of a matrix");
  std::string check_s, check_t, check_class, check_kind, check_conj;
  int check_m = 1, check_n = 0;
  check->add_option("S", check_s, "matrix JSON file")->required();
  check->add_option("T", check_t, "optional second matrix (defaults to S*)");
  check->add_option("--class", check_class, "operator class")->required();
  check->add_option("--m", check_m, "order m");
  check->add_option("--n", check_n, "quasi exponent n");
  check->add_option("--kind", check_kind, "delta or small-delta (defaults per class)");
  check->add_option("--conjugation", check_conj, "conjugation matrix JSON (J)");

  // construct
  auto* construct = app.add_subcommand("construct", "run a constructive theorem and print its certificate");
  std::string cons_s, cons_t, cons_theorem, cons_kind, cons_conj;
  int cons_m = 1, cons_n = 1, cons_p = 1;
  construct->add_option("S", cons_s, "matrix JSON file")->required();
  construct->add_option("T", cons_t, "optional second matrix (thm10-cp; defaults to S*)");
  construct->add_option("--theorem", cons_theorem, "pro00 | pro00-b | pro110 | thm10-cp")->required();
  construct->add_option("--m", cons_m, "order m");
  construct->add_option("--n", cons_n, "quasi exponent n");
  construct->add_option("--p", cons_p, "power p (thm10-cp)");
  construct->add_option("--kind", cons_kind, "delta or small-delta");
  construct->add_option("--conjugation", cons_conj, "conjugation matrix JSON (pro110)");

  // spectral
  auto* spectral = app.add_subcommand("spectral", "print the spectral report of a matrix");
  std::string spec_s, spec_report;
  spectral->add_option("S", spec_s, "matrix JSON file")->required();
  spectral->add_option("--report", spec_report, "write the report JSON to this path");

  // gen
  auto* gen = app.add_subcommand("gen", "emit a certified generated instance");
  std::string gen_class, gen_out;
  int gen_m = 1, gen_n = 0, gen_dim = 4;
  std::uint64_t gen_seed = 0;
  gen->add_option("--class", gen_class, "operator class")->required();
  gen->add_option("--m", gen_m, "order m");
  gen->add_option("--n", gen_n, "quasi exponent n");
  gen->add_option("--dim", gen_dim, "dimension");
  gen->add_option("--seed", gen_seed, "seed");
  gen->add_option("--out", gen_out, "file prefix for S/T/J JSON output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return 2;
  }

  try {
    if (verify->parsed())
      return cmd_verify(suites, trials, dims, seed, tol_override, report_path, sabotage);
    if (check->parsed())
      return cmd_check(check_s, check_t, check_class, check_m, check_n, check_kind, check_conj);
    if (construct->parsed())
      return cmd_construct(cons_s, cons_t, cons_theorem, cons_m, cons_n, cons_p, cons_kind,
                           cons_conj);
    if (spectral->parsed()) return cmd_spectral(spec_s, spec_report);
    if (gen->parsed()) return cmd_gen(gen_class, gen_m, gen_n, gen_dim, gen_seed, gen_out);
  } catch (const qil::IoError& e) {
    std::cerr << "I/O error: " << e.what() << "\n";
    return 3;
  } catch (const qil::NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
