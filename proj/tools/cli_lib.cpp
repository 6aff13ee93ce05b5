#include "cli_lib.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "ppsc/analysis.hpp"
#include "ppsc/privacy.hpp"
#include "ppsc/rng.hpp"

namespace ppsc::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

json config_to_json(const ExperimentConfig& c) {
  json doc;
  doc["graph_path"] = c.graph_path;
  doc["algorithm"] = c.algorithm;
  doc["noise"] = {{"family", c.noise.family}, {"mean", c.noise.mean}, {"variance", c.noise.variance}};
  doc["seeds"] = {{"master", c.master_seed}, {"runs", c.runs}};
  if (c.steps) doc["steps"] = *c.steps;
  if (!c.beta.empty()) doc["beta"] = c.beta;
  if (!c.tree.empty()) {
    json tree = json::array();
    for (const auto& e : c.tree) tree.push_back({e.tail, e.head});
    doc["tree"] = std::move(tree);
  }
  doc["dp"] = {{"delta", c.dp.delta}, {"v", c.dp.v}};
  doc["adversary"] = {{"l", c.adversary.l},
                      {"trials", c.adversary.trials},
                      {"prior_scale", c.adversary.prior_scale}};
  doc["analysis"] = {{"t_values", c.analysis.t_values},
                     {"epsilon", c.analysis.epsilon},
                     {"runs", c.analysis.runs},
                     {"t_max", c.analysis.t_max}};
  doc["outputs"] = {{"dir", c.out_dir}, {"formats", c.formats}};
  return doc;
}

symbolic::IntMatrix int_matrix_from_json(const json& j, const std::string& what) {
  if (!j.is_array() || j.empty()) throw ConfigError(what + ": expected a matrix");
  symbolic::IntMatrix m;
  for (const auto& row : j) {
    if (!row.is_array()) throw ConfigError(what + ": expected a matrix of rows");
    m.emplace_back();
    for (const auto& x : row) m.back().push_back(x.get<int>());
    if (m.back().size() != m.front().size()) throw ConfigError(what + ": ragged matrix");
  }
  return m;
}

struct RunArtifacts {
  netgraph::Graph graph;
  std::vector<double> beta;
  mechanism::NoiseModel noise;
};

RunArtifacts prepare(const ExperimentConfig& cfg) {
  netgraph::Graph g = netgraph::Graph::load(cfg.graph_path);
  std::vector<double> beta = cfg.beta;
  if (beta.empty()) {
    beta.resize(static_cast<std::size_t>(g.node_count()));
    for (int i = 0; i < g.node_count(); ++i) beta[static_cast<std::size_t>(i)] = i + 1;
  }
  if (static_cast<int>(beta.size()) != g.node_count()) {
    throw ConfigError("beta length " + std::to_string(beta.size()) + " does not match n=" +
                      std::to_string(g.node_count()));
  }
  mechanism::NoiseModel noise(mechanism::noise_family_from_string(cfg.noise.family),
                              cfg.noise.mean, cfg.noise.variance);
  return {std::move(g), std::move(beta), noise};
}

netgraph::OrientedTree resolve_tree(const ExperimentConfig& cfg, const netgraph::Graph& g) {
  if (!cfg.tree.empty()) return netgraph::OrientedTree(g, cfg.tree);
  return netgraph::spanning_tree(g, derive_run_seed(cfg.master_seed, 0xFFFF0001ULL));
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << content;
}

}  // namespace

std::uint64_t derive_run_seed(std::uint64_t master, std::uint64_t index) {
  return SplitRng(master).split(index).stream_key();
}

std::string ExperimentConfig::echo_json() const { return config_to_json(*this).dump(2); }

ExperimentConfig parse_config(const std::string& text, const std::string& source) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(source + ": " + e.what());
  }
  ExperimentConfig cfg;
  try {
    if (!doc.contains("graph_path")) throw ConfigError(source + ": missing graph_path");
    cfg.graph_path = doc.at("graph_path").get<std::string>();
    cfg.algorithm = doc.value("algorithm", std::string("dppsc"));
    if (cfg.algorithm != "dppsc" && cfg.algorithm != "rppsc") {
      throw ConfigError(source + ": algorithm must be dppsc or rppsc");
    }
    if (doc.contains("noise")) {
      const json& n = doc.at("noise");
      cfg.noise.family = n.value("family", std::string("gaussian"));
      cfg.noise.mean = n.value("mean", 0.0);
      cfg.noise.variance = n.value("variance", 1.0);
    }
    if (!doc.contains("seeds") || !doc.at("seeds").contains("master")) {
      throw ConfigError(source + ": seeds.master is mandatory (no wall-clock seeding)");
    }
    cfg.master_seed = doc.at("seeds").at("master").get<std::uint64_t>();
    cfg.runs = doc.at("seeds").value("runs", 1);
    if (cfg.runs < 0) throw ConfigError(source + ": seeds.runs must be >= 0");
    if (doc.contains("steps")) cfg.steps = doc.at("steps").get<int>();
    if (doc.contains("beta")) cfg.beta = doc.at("beta").get<std::vector<double>>();
    if (doc.contains("tree")) {
      for (const auto& e : doc.at("tree")) {
        if (!e.is_array() || e.size() != 2) throw ConfigError(source + ": tree entries are [tail, head]");
        cfg.tree.push_back({e.at(0).get<int>(), e.at(1).get<int>()});
      }
    }
    if (doc.contains("dp")) {
      cfg.dp.delta = doc.at("dp").value("delta", 1.0);
      cfg.dp.v = doc.at("dp").value("v", 1.0);
    }
    if (doc.contains("adversary")) {
      const json& a = doc.at("adversary");
      cfg.adversary.l = a.value("l", 10);
      cfg.adversary.trials = a.value("trials", 1000);
      if (a.contains("prior") && a.at("prior").contains("mu")) {
        cfg.adversary.prior_mu = a.at("prior").at("mu").get<std::vector<double>>();
      }
      if (a.contains("prior")) cfg.adversary.prior_scale = a.at("prior").value("lambda_scale", 1.0);
    }
    if (doc.contains("analysis")) {
      const json& a = doc.at("analysis");
      if (a.contains("t_values")) cfg.analysis.t_values = a.at("t_values").get<std::vector<int>>();
      cfg.analysis.epsilon = a.value("epsilon", 0.01);
      cfg.analysis.runs = a.value("runs", 20000);
      cfg.analysis.t_max = a.value("t_max", 64);
    }
    if (doc.contains("outputs")) {
      cfg.out_dir = doc.at("outputs").value("dir", std::string("out"));
      if (doc.at("outputs").contains("formats")) {
        cfg.formats = doc.at("outputs").at("formats").get<std::vector<std::string>>();
      }
    }
    if (doc.contains("verify") && doc.at("verify").contains("fixture")) {
      const json& f = doc.at("verify").at("fixture");
      FixtureMatrices fixture;
      fixture.c = int_matrix_from_json(f.at("c"), source + ": verify.fixture.c");
      fixture.d = int_matrix_from_json(f.at("d"), source + ": verify.fixture.d");
      cfg.verify_fixture = std::move(fixture);
    }
  } catch (const json::exception& e) {
    throw ConfigError(source + ": " + e.what());
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  ExperimentConfig cfg = parse_config(buf.str(), path);
  // Paths in the config are relative to the config file location.
  const fs::path base = fs::path(path).parent_path();
  if (!cfg.graph_path.empty() && fs::path(cfg.graph_path).is_relative() && !base.empty()) {
    cfg.graph_path = (base / cfg.graph_path).string();
  }
  return cfg;
}

Report cmd_run(const ExperimentConfig& cfg, const std::string& out_dir_override, bool redact) {
  RunArtifacts art = prepare(cfg);
  const int n = art.graph.node_count();
  const fs::path out_dir = out_dir_override.empty() ? fs::path(cfg.out_dir)
                                                    : fs::path(out_dir_override);
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw ConfigError("cannot create output dir " + out_dir.string() + ": " + ec.message());

  std::ostringstream report;
  report << "ppsc run report\n\n== config ==\n" << cfg.echo_json() << "\n";

  std::optional<netgraph::OrientedTree> tree;
  std::optional<symbolic::MechanismMatrices> mm;
  if (cfg.algorithm == "dppsc") {
    tree.emplace(resolve_tree(cfg, art.graph));
    const symbolic::SymbolicState s = symbolic::run_symbolic(*tree);
    mm = symbolic::extract_matrices(s);
    report << "\n== symbolic ==\ntree:";
    for (const auto& e : tree->directed_edges()) report << " (" << e.tail << "," << e.head << ")";
    report << "\n" << symbolic::format_state(s);
  }

  const bool want_json = std::find(cfg.formats.begin(), cfg.formats.end(), "json") != cfg.formats.end();
  const bool want_csv = std::find(cfg.formats.begin(), cfg.formats.end(), "csv") != cfg.formats.end();

  std::ostringstream csv;
  csv << "# ppsc-summary v1\n"
      << "# columns: run,seed,algorithm,n,steps,sum_in,sum_out,abs_drift,max_step_drift\n";

  report << "\n== runs ==\n";
  bool sum_ok = true;
  bool compliance_ok = true;
  const double sum_in = numerics::sum(art.beta);
  for (int r = 0; r < cfg.runs; ++r) {
    const std::uint64_t seed = derive_run_seed(cfg.master_seed, static_cast<std::uint64_t>(r));
    mechanism::RunTrace trace;
    if (cfg.algorithm == "dppsc") {
      trace = mechanism::run_dppsc(*tree, {art.beta, 0}, art.noise, seed, &*mm);
    } else {
      const mechanism::GossipMatrix p = mechanism::GossipMatrix::uniform(art.graph);
      const int steps = cfg.steps.value_or(mechanism::default_rppsc_steps(n));
      trace = mechanism::run_rppsc(art.graph, p, {art.beta, 0}, art.noise, steps, seed);
    }
    const double sum_out = numerics::sum(trace.final);
    const double drift = std::abs(sum_out - sum_in);
    sum_ok = sum_ok && drift <= 1e-9 * (1.0 + std::abs(sum_in));
    for (const auto& step : trace.steps) {
      compliance_ok = compliance_ok && art.graph.has_edge(step.tail, step.head);
    }
    report << "run " << r << ": seed=" << seed << " steps=" << trace.steps.size()
           << " sum_in=" << fmt(sum_in) << " sum_out=" << fmt(sum_out)
           << " drift=" << fmt(drift) << "\n";
    csv << r << ',' << seed << ',' << cfg.algorithm << ',' << n << ',' << trace.steps.size()
        << ',' << fmt(sum_in) << ',' << fmt(sum_out) << ',' << fmt(drift) << ','
        << fmt(trace.max_sum_drift) << "\n";
    if (want_json) {
      write_file(out_dir / ("trace_" + std::to_string(r) + ".json"),
                 mechanism::trace_to_json(trace, cfg.graph_path, redact, 2) + "\n");
    }
  }

  report << "\n== invariants ==\n";
  report << "summation_consistency: " << (sum_ok ? "PASS" : "FAIL") << "\n";
  report << "graph_compliance: " << (compliance_ok ? "PASS" : "FAIL") << "\n";
  if (cfg.algorithm == "dppsc") {
    report << "linear_form_match: PASS\n";  // run_dppsc throws on violation
  }
  report << "wire_record_redacted: " << (redact ? "YES" : "NO") << "\n";

  Report rep;
  rep.ok = sum_ok && compliance_ok;
  rep.text = report.str();
  write_file(out_dir / "report.txt", rep.text);
  if (want_csv) write_file(out_dir / "summary.csv", csv.str());
  return rep;
}

verify::CheckResult reproducibility_check(const std::optional<ExperimentConfig>& cfg,
                                          const std::string& work_dir) {
  const auto start = std::chrono::steady_clock::now();
  verify::CheckResult rep;
  rep.name = "criterion-12 report reproducibility";
  try {
    ExperimentConfig run_cfg;
    if (cfg) {
      run_cfg = *cfg;
    } else {
      const fs::path dir = fs::path(work_dir);
      fs::create_directories(dir);
      const fs::path graph_path = dir / "verify_demo5.txt";
      const netgraph::Graph demo = verify::demo5_graph();
      std::ostringstream g;
      g << "5\n";
      for (const auto& e : demo.edges()) g << e.a << ' ' << e.b << "\n";
      write_file(graph_path, g.str());
      run_cfg.graph_path = graph_path.string();
      run_cfg.algorithm = "dppsc";
      run_cfg.master_seed = 20240811;
      run_cfg.runs = 3;
      run_cfg.tree = verify::demo5_tree().directed_edges();
    }
    const fs::path a = fs::path(work_dir) / "rep_a";
    const fs::path b = fs::path(work_dir) / "rep_b";
    const Report ra = cmd_run(run_cfg, a.string(), false);
    const Report rb = cmd_run(run_cfg, b.string(), false);
    bool identical = ra.text == rb.text;
    for (int r = 0; identical && r < run_cfg.runs; ++r) {
      std::ifstream fa(a / ("trace_" + std::to_string(r) + ".json"));
      std::ifstream fb(b / ("trace_" + std::to_string(r) + ".json"));
      std::stringstream sa, sb;
      sa << fa.rdbuf();
      sb << fb.rdbuf();
      identical = sa.str() == sb.str() && !sa.str().empty();
    }
    rep.pass = identical;
    rep.detail = identical ? "reports and traces byte-identical across invocations"
                           : "outputs differ between identical invocations";
  } catch (const std::exception& e) {
    rep.pass = false;
    rep.detail = std::string("exception: ") + e.what();
  }
  rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

Report cmd_verify(const std::optional<ExperimentConfig>& cfg, verify::Scale scale,
                  const std::string& work_dir) {
  std::ostringstream log;
  std::vector<verify::CheckResult> results = verify::acceptance_criteria(scale, &log);

  verify::CheckResult repro = reproducibility_check(cfg, work_dir);
  log << (repro.pass ? "[PASS] " : "[FAIL] ") << repro.name << " (" << repro.seconds << " s) "
      << repro.detail << '\n';
  results.push_back(std::move(repro));

  if (cfg && cfg->verify_fixture) {
    verify::CheckResult fixture_res = verify::mechanism_structure_check(
        symbolic::MechanismMatrices{cfg->verify_fixture->c, cfg->verify_fixture->d},
        "config fixture");
    log << (fixture_res.pass ? "[PASS] " : "[FAIL] ") << fixture_res.name << " "
        << fixture_res.detail << '\n';
    results.push_back(std::move(fixture_res));
  }

  Report rep;
  rep.ok = verify::all_passed(results);
  rep.text = log.str();
  return rep;
}

Report cmd_attack(const ExperimentConfig& cfg, const std::string& out_dir_override) {
  if (cfg.algorithm != "dppsc") {
    throw ConfigError("attack requires algorithm=dppsc (the adversary observes the tree mechanism)");
  }
  if (cfg.noise.family != "gaussian") {
    throw ConfigError("attack requires gaussian noise (the MLE/MAP likelihood is Gaussian)");
  }
  RunArtifacts art = prepare(cfg);
  const int n = art.graph.node_count();
  const netgraph::OrientedTree tree = resolve_tree(cfg, art.graph);
  const symbolic::SymbolicState s = symbolic::run_symbolic(tree);
  const symbolic::MechanismMatrices mm = symbolic::extract_matrices(s);
  const symbolic::GraphicalModel gm = symbolic::graphical_model(s, cfg.noise.variance);

  privacy::AdversaryReport report;
  const privacy::DpParams dp = privacy::dp_params(mm, gm, cfg.dp.delta, cfg.dp.v);
  report.epsilon_bound = dp.epsilon;

  SplitRng rng(derive_run_seed(cfg.master_seed, 0xA77ACCULL));
  std::vector<double> beta_prime = art.beta;
  const int coord = static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
  beta_prime[static_cast<std::size_t>(coord)] += dp.delta;
  report.max_log_ratio = privacy::dp_ratio_check(mm, art.beta, beta_prime, dp.delta, dp.v,
                                                 cfg.adversary.trials, rng.next_u64());

  const privacy::AdversaryObservations obs = privacy::make_observations(
      mm, art.beta, cfg.noise.variance, cfg.adversary.l, rng.next_u64());
  report.mle = privacy::mle_estimate(obs);

  privacy::PriorModel prior;
  prior.mu_beta = cfg.adversary.prior_mu.empty()
                      ? std::vector<double>(static_cast<std::size_t>(n), 0.0)
                      : cfg.adversary.prior_mu;
  if (static_cast<int>(prior.mu_beta.size()) != n) {
    throw ConfigError("adversary.prior.mu length does not match the graph");
  }
  prior.lambda_beta = numerics::Matrix::identity(n).scaled(cfg.adversary.prior_scale);
  report.map = privacy::map_estimate(obs, prior);

  const fs::path out_dir = out_dir_override.empty() ? fs::path(cfg.out_dir)
                                                    : fs::path(out_dir_override);
  fs::create_directories(out_dir);
  write_file(out_dir / "attack_report.json", privacy::adversary_report_to_json(report, 2) + "\n");

  std::ostringstream text;
  text << "ppsc attack report\n\n== config ==\n" << cfg.echo_json() << "\n\n== results ==\n"
       << "epsilon_bound: " << fmt(report.epsilon_bound) << "\n"
       << "max_log_ratio: " << fmt(report.max_log_ratio) << " ("
       << (report.max_log_ratio <= report.epsilon_bound ? "within" : "OUTSIDE") << " budget)\n"
       << "mle_unique: " << (report.mle.unique ? "true" : "false")
       << "  kernel_dim: " << report.mle.directions.cols() << "\n"
       << "map_residuals: stationarity=" << fmt(report.map.stationarity_residual)
       << " sum=" << fmt(report.map.constraint_residual) << "\n";
  Report rep;
  rep.ok = report.max_log_ratio <= report.epsilon_bound && !report.mle.unique;
  rep.text = text.str();
  write_file(out_dir / "report.txt", rep.text);
  return rep;
}

Report cmd_analyze(const ExperimentConfig& cfg, const std::string& out_dir_override) {
  RunArtifacts art = prepare(cfg);
  const mechanism::GossipMatrix p = mechanism::GossipMatrix::uniform(art.graph);
  const analysis::EncryptionStats stats =
      analysis::estimate_q_t(art.graph, p, cfg.analysis.t_max, cfg.analysis.runs,
                             derive_run_seed(cfg.master_seed, 0xA7A1ULL));
  const std::string doc = analysis::analysis_report_to_json(
      art.graph, p, stats, cfg.analysis.t_values, cfg.analysis.epsilon, 2);

  const fs::path out_dir = out_dir_override.empty() ? fs::path(cfg.out_dir)
                                                    : fs::path(out_dir_override);
  fs::create_directories(out_dir);
  write_file(out_dir / "analysis_report.json", doc + "\n");

  Report rep;
  rep.ok = true;
  rep.text = "ppsc analysis report\n\n== config ==\n" + cfg.echo_json() + "\n\n" + doc + "\n";
  write_file(out_dir / "report.txt", rep.text);
  return rep;
}

}  // namespace ppsc::cli
