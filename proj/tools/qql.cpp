// qql: command-line front end for the query-distinguishability library.
//
// Every subcommand prints one JSON RunReport on stdout (or a CSV matrix with
// --format csv where a matrix exists). Exit codes: 0 success, 2 validation
// or parameter errors, 64 unknown subcommand.

#include <chrono>
#include <cstdlib>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "qql/qql.hpp"

namespace {

using qql::io::Json;

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitUsage = 64;

const std::vector<std::string> kSubcommands = {"bounds",      "sort-bound",   "run-example1",
                                               "run-vandam",  "simulate",     "analyze-poly",
                                               "lemma-audit", "optimize",     "example3-search"};

void print_usage(std::ostream& os) {
  os << "usage: qql <subcommand> [options]\n\nsubcommands:\n";
  for (const auto& s : kSubcommands) os << "  " << s << '\n';
  os << "\nrun 'qql <subcommand> --help' for options\n";
}

int resolve_threads(int flag) {
  if (flag > 0) return flag;
  if (const char* env = std::getenv("QQL_THREADS")) {
    try {
      const int t = std::stoi(env);
      if (t > 0) return t;
    } catch (const std::exception&) {
    }
    throw qql::ParameterError(std::string("QQL_THREADS must be a positive integer, got '") + env + "'");
  }
  return 1;
}

Json matrix_to_json(const Eigen::MatrixXd& m) {
  Json rows = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string matrix_to_csv(const Eigen::MatrixXd& m) {
  std::ostringstream os;
  os << std::setprecision(17);
  os << "outcome";
  for (Eigen::Index c = 0; c < m.cols(); ++c) os << ",F" << c;
  os << '\n';
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    os << r;
    for (Eigen::Index c = 0; c < m.cols(); ++c) os << ',' << m(r, c);
    os << '\n';
  }
  return os.str();
}

Json successes_json(const std::vector<double>& v) { return Json(v); }

struct Options {
  std::uint64_t N = 0;
  std::uint64_t k = 0;
  std::uint64_t n = 0;
  std::string p = "1";
  std::string D;
  std::string family;
  std::string algorithm;
  std::string measurement;
  std::string polynomial;
  std::string f0;
  std::string format = "json";
  std::uint64_t seed = 1;
  int threads = 0;
  int restarts = 20;
  int iterations = 2000;
  int workspace = 0;
  int samples = 100;
};

struct Outcome {
  qql::RunReport report;
  std::optional<Eigen::MatrixXd> matrix;  // for --format csv
};

Outcome cmd_bounds(const Options& o) {
  Outcome out;
  out.report.input = {{"N", o.N}, {"k", o.k}, {"p", o.p}};
  const qql::Rational p = qql::parse_rational(o.p);
  const auto terms = qql::binomial_terms(o.N, o.k);
  Json term_strings = Json::array();
  for (const auto& t : terms) term_strings.push_back(t.str());
  out.report.outputs = {{"m_sum", qql::m_sum(o.N, o.k).str()},
                        {"max_D", qql::max_distinguishable(o.N, o.k, p).str()},
                        {"p", qql::to_string(p)},
                        {"terms", term_strings}};
  if (!o.D.empty()) {
    out.report.input["D"] = o.D;
    qql::BoundQuery q{o.N, o.k, p, qql::BigInt(o.D)};
    out.report.outputs["feasible"] = qql::is_feasible(q);
  }
  return out;
}

Outcome cmd_sort_bound(const Options& o) {
  Outcome out;
  out.report.input = {{"n", o.n}};
  const auto b = qql::sorting_lower_bound(o.n);
  out.report.outputs = {{"k_min", b.k_min},
                        {"N", b.domain_size},
                        {"D", b.orderings.str()},
                        {"m_sum_at_k_min", b.m_sum_at_k_min.str()},
                        {"m_sum_below", b.m_sum_below.str()}};
  return out;
}

Outcome cmd_run_example1(const Options& o) {
  Outcome out;
  out.report.input = {{"n", o.n}};
  const auto bundle = qql::build_character_distinguisher(static_cast<int>(o.n));
  const auto sm = qql::success_matrix(bundle.algorithm, bundle.measurement, bundle.family);
  const auto d = sm.probabilities.rows();
  const double deviation = (sm.probabilities - Eigen::MatrixXd::Identity(d, d)).cwiseAbs().maxCoeff();
  const auto domain = static_cast<std::uint64_t>(bundle.family.domain_size());
  out.report.outputs = {{"N", domain},
                        {"D", bundle.family.size()},
                        {"k", 1},
                        {"predicted_success", qql::to_string(bundle.predicted_success)},
                        {"measured_worst_case", sm.worst_case_success()},
                        {"max_deviation_from_identity", deviation},
                        {"m_sum", qql::m_sum(domain, 1).str()},
                        {"saturates_bound", qql::BigInt(bundle.family.size()) == qql::m_sum(domain, 1)},
                        {"success_matrix", matrix_to_json(sm.probabilities)}};
  out.matrix = sm.probabilities;
  return out;
}

Outcome cmd_run_vandam(const Options& o) {
  Outcome out;
  out.report.input = {{"N", o.N}, {"k", o.k}};
  const auto bundle = qql::build_uniform_subset_algorithm(static_cast<int>(o.N), static_cast<int>(o.k));
  const auto sm = qql::success_matrix(bundle.algorithm, bundle.measurement, bundle.family);
  const double predicted = qql::to_double(bundle.predicted_success);
  const Eigen::VectorXd diag = sm.diagonal();
  const double deviation = (diag.array() - predicted).abs().maxCoeff();
  std::vector<double> per(diag.data(), diag.data() + diag.size());
  out.report.outputs = {{"predicted_success", qql::to_string(bundle.predicted_success)},
                        {"predicted_value", predicted},
                        {"per_function_success", successes_json(per)},
                        {"measured_worst_case", sm.worst_case_success()},
                        {"max_abs_deviation", deviation},
                        {"D", bundle.family.size()}};
  if (diag.size() <= 64) out.report.outputs["success_matrix"] = matrix_to_json(sm.probabilities);
  out.matrix = sm.probabilities;
  return out;
}

Outcome cmd_simulate(const Options& o) {
  Outcome out;
  out.report.input = {{"algorithm", o.algorithm}, {"measurement", o.measurement}, {"family", o.family}};
  const auto alg = qql::io::load_algorithm(o.algorithm);
  const auto m = qql::io::load_measurement(o.measurement);
  const auto fam = qql::io::load_family(o.family);
  const auto sm = qql::success_matrix(alg, m, fam);
  out.report.outputs = {{"worst_case_success", sm.worst_case_success()},
                        {"success_matrix", matrix_to_json(sm.probabilities)}};
  out.matrix = sm.probabilities;
  return out;
}

Outcome cmd_analyze_poly(const Options& o) {
  Outcome out;
  out.report.input = {{"algorithm", o.algorithm}, {"measurement", o.measurement}};
  const auto alg = qql::io::load_algorithm(o.algorithm);
  const auto m = qql::io::load_measurement(o.measurement);
  const auto ex = qql::extract_polynomials(alg, m);
  double parseval_total = 0.0;
  Json per_outcome = Json::array();
  for (std::size_t l = 0; l < ex.outcomes.size(); ++l) {
    Json polys = Json::array();
    for (const auto& q : ex.outcomes[l]) {
      parseval_total += qql::parseval(q);
      polys.push_back(qql::io::to_json(q));
    }
    per_outcome.push_back({{"outcome", l}, {"polynomials", polys}});
  }
  out.report.outputs = {{"k", ex.degree_cap},
                        {"degree_certified", ex.certified()},
                        {"max_high_degree_coefficient", ex.max_high_degree_coefficient},
                        {"max_reconstruction_error", ex.max_reconstruction_error},
                        {"parseval_total", parseval_total},
                        {"outcomes", per_outcome}};
  return out;
}

Json audit_json(const qql::LemmaAudit& a) {
  return {{"applicable", a.applicable}, {"value_at_f0", a.value_at_f0}, {"degree", a.degree},
          {"sum", a.sum},               {"floor", qql::to_string(a.floor)}, {"floor_value", qql::to_double(a.floor)},
          {"pass", a.pass}};
}

Outcome cmd_lemma_audit(const Options& o) {
  Outcome out;
  out.report.seed = o.seed;
  if (!o.polynomial.empty()) {
    const auto q = qql::io::polynomial_from_json(qql::io::read_json_file(o.polynomial));
    const auto f0 = o.f0.empty() ? qql::BooleanFunction::constant_one(q.domain_size())
                                 : qql::BooleanFunction::from_signs(o.f0);
    out.report.input = {{"polynomial", o.polynomial}, {"f0", f0.to_signs()}};
    out.report.outputs = {{"audit", audit_json(qql::lemma_audit(q, f0))}};
    return out;
  }
  const int n = static_cast<int>(o.N);
  const int k = static_cast<int>(o.k);
  const auto f0 = o.f0.empty() ? qql::BooleanFunction::constant_one(n) : qql::BooleanFunction::from_signs(o.f0);
  out.report.input = {{"N", o.N}, {"k", o.k}, {"f0", f0.to_signs()}, {"samples", o.samples}};
  const auto minimizer_audit = qql::lemma_audit(qql::minimizer(n, k, f0), f0);

  std::mt19937_64 rng(o.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  int passed = 0;
  double worst_margin = std::numeric_limits<double>::infinity();
  for (int s = 0; s < o.samples; ++s) {
    qql::MultilinearPolynomial q(n, k);
    for (auto& a : q.coefficients()) a = {normal(rng), normal(rng)};
    const double at_f0 = std::abs(qql::evaluate_poly(q, f0));
    if (at_f0 < 1e-9) continue;
    for (auto& a : q.coefficients()) a /= at_f0;
    const auto audit = qql::lemma_audit(q, f0);
    passed += audit.pass ? 1 : 0;
    worst_margin = std::min(worst_margin, audit.sum - qql::to_double(audit.floor));
  }
  out.report.outputs = {{"minimizer", audit_json(minimizer_audit)},
                        {"minimizer_equality_gap", std::abs(minimizer_audit.sum - qql::to_double(minimizer_audit.floor))},
                        {"random_samples", o.samples},
                        {"random_passed", passed},
                        {"random_worst_margin", o.samples > 0 ? Json(worst_margin) : Json(nullptr)}};
  return out;
}

qql::OptimizerConfig optimizer_config(const Options& o) {
  qql::OptimizerConfig cfg;
  cfg.restarts = o.restarts;
  cfg.max_iterations = o.iterations;
  cfg.seed = o.seed;
  cfg.workspace = o.workspace;
  cfg.threads = resolve_threads(o.threads);
  return cfg;
}

Outcome cmd_optimize(const Options& o) {
  Outcome out;
  out.report.seed = o.seed;
  out.report.input = {{"family", o.family}, {"k", o.k}, {"restarts", o.restarts}, {"iterations", o.iterations},
                      {"workspace", o.workspace}};
  const auto fam = qql::io::load_family(o.family);
  const auto res = qql::optimize(fam, static_cast<int>(o.k), optimizer_config(o));
  Json params = Json::array();
  for (const auto& g : res.parameters.generators()) params.push_back(std::vector<double>(g.data(), g.data() + g.size()));
  out.report.outputs = {{"best_success", res.best_success},
                        {"per_function_success", successes_json(res.per_function_success)},
                        {"bound_ceiling", qql::to_string(res.bound_ceiling)},
                        {"certified_gap", res.certified_gap},
                        {"converged", res.converged},
                        {"workspace", res.workspace},
                        {"restarts_run", res.restarts_run},
                        {"best_restart", res.best_restart},
                        {"parameters", params}};
  return out;
}

Outcome cmd_example3(const Options& o) {
  Outcome out;
  out.report.seed = o.seed;
  out.report.input = {{"restarts", o.restarts}, {"iterations", o.iterations}, {"workspace", o.workspace}};
  const auto table = qql::search_seven_function_sets(optimizer_config(o));
  Json rows = Json::array();
  for (const auto& r : table.rows) {
    Json members = Json::array();
    for (auto m : r.members) members.push_back(qql::BooleanFunction(3, m).to_signs());
    rows.push_back({{"excluded", qql::BooleanFunction(3, r.excluded).to_signs()},
                    {"members", members},
                    {"best_success", r.best_success},
                    {"converged", r.converged}});
  }
  out.report.outputs = {{"rows", rows},
                        {"global_max", table.global_max},
                        {"bound_ceiling", qql::to_string(table.bound_ceiling)},
                        {"all_below_one", table.all_below_one},
                        {"note", "best found by numerical search; not a proof of impossibility"}};
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    print_usage(std::cerr);
    return kExitUsage;
  }
  const std::string first = argv[1];
  if (first == "--help" || first == "-h") {
    print_usage(std::cout);
    return kExitOk;
  }
  if (std::find(kSubcommands.begin(), kSubcommands.end(), first) == kSubcommands.end()) {
    std::cerr << "unknown subcommand '" << first << "'\n";
    print_usage(std::cerr);
    return kExitUsage;
  }

  CLI::App app{"Quantum query distinguishability toolkit", "qql"};
  app.require_subcommand(1);
  Options o;
  std::map<std::string, std::function<Outcome(const Options&)>> handlers;

  auto add_format = [&](CLI::App* sub) {
    sub->add_option("--format", o.format, "json or csv (success matrix)")->check(CLI::IsMember({"json", "csv"}));
  };
  auto add_optimizer = [&](CLI::App* sub) {
    sub->add_option("--restarts", o.restarts, "random restarts")->check(CLI::PositiveNumber);
    sub->add_option("--iterations", o.iterations, "ascent iterations per restart")->check(CLI::PositiveNumber);
    sub->add_option("--seed", o.seed, "RNG seed");
    sub->add_option("--workspace", o.workspace, "workspace size W (0 = smallest sufficient power of two)");
    sub->add_option("--threads", o.threads, "worker threads (falls back to QQL_THREADS)");
  };

  auto* bounds = app.add_subcommand("bounds", "counting bound M(N,k) and max distinguishable D");
  bounds->add_option("--N", o.N, "domain size")->required();
  bounds->add_option("--k", o.k, "queries")->required();
  bounds->add_option("--p", o.p, "success probability, e.g. 7/8");
  bounds->add_option("--D", o.D, "family size to test for feasibility");
  handlers["bounds"] = cmd_bounds;

  auto* sort = app.add_subcommand("sort-bound", "query lower bound for sorting n items");
  sort->add_option("--n", o.n, "items")->required();
  handlers["sort-bound"] = cmd_sort_bound;

  auto* ex1 = app.add_subcommand("run-example1", "exact one-query character distinguisher");
  ex1->add_option("--n", o.n, "N = 2^n - 1")->required();
  add_format(ex1);
  handlers["run-example1"] = cmd_run_example1;

  auto* vd = app.add_subcommand("run-vandam", "uniform low-weight-subset algorithm on all 2^N functions");
  vd->add_option("--N", o.N, "domain size")->required();
  vd->add_option("--k", o.k, "queries")->required();
  add_format(vd);
  handlers["run-vandam"] = cmd_run_vandam;

  auto* sim = app.add_subcommand("simulate", "success matrix of an algorithm file");
  sim->add_option("--algorithm", o.algorithm, "algorithm JSON")->required()->check(CLI::ExistingFile);
  sim->add_option("--measurement", o.measurement, "measurement JSON")->required()->check(CLI::ExistingFile);
  sim->add_option("--family", o.family, "family JSON")->required()->check(CLI::ExistingFile);
  add_format(sim);
  handlers["simulate"] = cmd_simulate;

  auto* poly = app.add_subcommand("analyze-poly", "amplitude polynomials and degree certificate");
  poly->add_option("--algorithm", o.algorithm, "algorithm JSON")->required()->check(CLI::ExistingFile);
  poly->add_option("--measurement", o.measurement, "measurement JSON")->required()->check(CLI::ExistingFile);
  handlers["analyze-poly"] = cmd_analyze_poly;

  auto* lemma = app.add_subcommand("lemma-audit", "check sum_F |Q|^2 >= 2^N / M(N,k)");
  lemma->add_option("--N", o.N, "domain size");
  lemma->add_option("--k", o.k, "degree");
  lemma->add_option("--f0", o.f0, "F0 as a sign string (default all +)");
  lemma->add_option("--polynomial", o.polynomial, "polynomial JSON to audit")->check(CLI::ExistingFile);
  lemma->add_option("--samples", o.samples, "random polynomials to audit")->check(CLI::NonNegativeNumber);
  lemma->add_option("--seed", o.seed, "RNG seed");
  handlers["lemma-audit"] = cmd_lemma_audit;

  auto* opt = app.add_subcommand("optimize", "search for the best k-query algorithm on a family");
  opt->add_option("--family", o.family, "family JSON")->required()->check(CLI::ExistingFile);
  opt->add_option("--k", o.k, "queries")->required();
  add_optimizer(opt);
  handlers["optimize"] = cmd_optimize;

  auto* ex3 = app.add_subcommand("example3-search", "best found success for every 7-function set, N=3, k=2");
  add_optimizer(ex3);
  handlers["example3-search"] = cmd_example3;

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitValidation;
  }

  try {
    if (first == "lemma-audit" && o.polynomial.empty() && (lemma->count("--N") == 0 || lemma->count("--k") == 0)) {
      throw qql::ParameterError("lemma-audit needs --polynomial or both --N and --k");
    }
    const auto t0 = std::chrono::steady_clock::now();
    Outcome result = handlers.at(first)(o);
    result.report.subcommand = first;
    result.report.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (o.format == "csv" && result.matrix) {
      std::cout << matrix_to_csv(*result.matrix);
    } else {
      std::cout << qql::serialize(result.report) << '\n';
    }
    return kExitOk;
  } catch (const qql::Error& e) {
    std::cerr << "qql " << first << ": " << e.what() << '\n';
    return kExitValidation;
  }
}
