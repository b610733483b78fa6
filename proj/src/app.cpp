#include "steiner/app.hpp"

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <thread>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "steiner/analysis.hpp"
#include "steiner/geodesic.hpp"
#include "steiner/io.hpp"
#include "steiner/optimizer.hpp"

namespace steiner {

namespace fs = std::filesystem;

namespace {

std::ofstream open_out(const fs::path& p) {
  std::ofstream os(p);
  if (!os) throw Error("cannot write '" + p.string() + "'");
  return os;
}

nlohmann::ordered_json read_json(const fs::path& p) {
  std::ifstream in(p);
  if (!in) throw Error("missing artifact '" + p.string() + "'");
  try {
    return nlohmann::ordered_json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error("unreadable artifact '" + p.string() + "': " + e.what());
  }
}

std::optional<SteinerTree> oracle_for(const std::vector<Vec2>& terms) {
  if (terms.size() < 2 || terms.size() > 4) return std::nullopt;
  return exact_steiner(terms);
}

int thread_cap(std::size_t jobs) {
  unsigned n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("STEINER_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) n = static_cast<unsigned>(v);
  }
  return static_cast<int>(std::min<std::size_t>(n, jobs));
}

}  // namespace

int solve_config(const RunConfig& cfg, std::ostream& log) {
  for (const std::string& w : config_warnings(cfg)) log << "warning: " << w << "\n";
  const Problem prob = build_problem(cfg);
  const Domain& dom = prob.domain;
  const DiscreteMeasure& mu = prob.measure;

  ContinuationOptions opts;
  opts.alternate.tol = cfg.tol;
  opts.alternate.max_iter = cfg.max_iter;
  opts.restarts = cfg.restarts;
  opts.seed = cfg.seed;

  std::vector<SolveTrace> traces;
  try {
    traces = continuation(mu, dom, cfg.schedule, cfg.beta_exp, opts);
  } catch (const SolverError& e) {
    log << "error: " << e.what() << "\n";
    return exit_code::not_converged;
  }

  const fs::path dir(cfg.out_dir);
  fs::create_directories(dir);
  {
    auto os = open_out(dir / "config.ini");
    write_config(os, cfg);
  }

  nlohmann::ordered_json doc;
  doc["seed"] = cfg.seed;
  auto rungs = nlohmann::ordered_json::array();
  bool converged = true;
  log << std::setw(4) << "rung" << std::setw(10) << "epsilon" << std::setw(14) << "total" << std::setw(14)
      << "diffuse" << std::setw(14) << "geodesic" << std::setw(10) << "length" << std::setw(7) << "iters" << "\n";
  for (std::size_t r = 0; r < traces.size(); ++r) {
    const SolveTrace& t = traces[r];
    const bool last = r + 1 == traces.size();
    const std::string field_name = last ? "field_final.txt" : "field_r" + std::to_string(r) + ".txt";
    save_field((dir / field_name).string(), *t.u);
    rungs.push_back(trace_json(t, field_name));
    converged = converged && t.converged;
    const IterationRecord& it = t.iterations.back();
    log << std::setw(4) << r << std::setw(10) << t.params.epsilon << std::fixed << std::setprecision(6)
        << std::setw(14) << it.total << std::setw(14) << it.diffuse << std::setw(14) << it.geodesic
        << std::setprecision(4) << std::setw(10) << it.length << std::defaultfloat << std::setw(7)
        << t.iterations.size() << (t.converged ? "" : "  (not converged)") << "\n";
  }
  doc["rungs"] = std::move(rungs);
  {
    auto os = open_out(dir / "trace.json");
    os << doc.dump(2) << "\n";
  }
  {
    auto os = open_out(dir / "trace.csv");
    write_trace_csv(os, traces);
  }

  const SolveTrace& fin = traces.back();
  for (std::size_t i = 0; i < fin.bundle.size(); ++i) {
    auto os = open_out(dir / ("curve_" + std::to_string(i) + ".txt"));
    write_polyline(os, fin.bundle.curves[i]);
  }
  const std::vector<Vec2> sub = sublevel_set(*fin.u, cfg.threshold, dom);
  save_points((dir / "sublevel.txt").string(), sub);

  const std::vector<Vec2> terms = terminals(cfg);
  const std::optional<SteinerTree> oracle = oracle_for(terms);
  if (oracle) {
    auto os = open_out(dir / "oracle.json");
    os << tree_json(*oracle).dump(2) << "\n";
  }
  {
    auto os = open_out(dir / "plot.svg");
    write_svg(os, dom, *fin.u, cfg.threshold, fin.bundle, terms, oracle ? &*oracle : nullptr);
  }
  return converged ? exit_code::ok : exit_code::not_converged;
}

int run_solve(const SolveRequest& req, std::ostream& out, std::ostream& err) {
  if (req.configs.empty()) {
    err << "error: no config given\n";
    return exit_code::config_error;
  }
  std::vector<RunConfig> cfgs;
  try {
    for (const std::string& path : req.configs) {
      RunConfig c = load_config(path);
      if (req.seed) c.seed = *req.seed;
      if (req.out) {
        c.out_dir = req.configs.size() == 1 ? *req.out : (fs::path(*req.out) / fs::path(path).stem()).string();
      }
      build_problem(c);
      cfgs.push_back(std::move(c));
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code::config_error;
  }

  std::vector<int> codes(cfgs.size(), exit_code::ok);
  std::vector<std::string> logs(cfgs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < cfgs.size(); k = next++) {
      std::ostringstream log;
      try {
        codes[k] = solve_config(cfgs[k], log);
      } catch (const Error& e) {
        log << "error: " << e.what() << "\n";
        codes[k] = exit_code::config_error;
      }
      logs[k] = log.str();
    }
  };
  const int n_threads = thread_cap(cfgs.size());
  std::vector<std::thread> pool;
  for (int t = 1; t < n_threads; ++t) pool.emplace_back(worker);
  worker();
  for (std::thread& t : pool) t.join();

  int code = exit_code::ok;
  for (std::size_t k = 0; k < cfgs.size(); ++k) {
    if (cfgs.size() > 1) out << "== " << req.configs[k] << " -> " << cfgs[k].out_dir << "\n";
    (codes[k] == exit_code::ok ? out : err) << logs[k];
    code = std::max(code, codes[k]);
  }
  return code;
}

int run_oracle(const std::string& points, std::ostream& out, std::ostream& err) {
  std::vector<Vec2> pts;
  try {
    pts = parse_point_list(points);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code::config_error;
  }
  if (pts.size() < 2 || pts.size() > 4) {
    err << "usage: oracle --points \"x1,y1;x2,y2[;...]\" takes 2 to 4 points, got " << pts.size() << "\n";
    return exit_code::config_error;
  }
  try {
    out << std::setprecision(17) << tree_json(exact_steiner(pts)).dump() << "\n";
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code::config_error;
  }
  return exit_code::ok;
}

Thresholds load_thresholds(const std::string& path) {
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::read_ini(path, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError(std::string("thresholds: ") + e.what());
  }
  Thresholds th;
  auto read = [&](const char* key, double& v) {
    if (auto s = tree.get_optional<std::string>(std::string("thresholds.") + key)) {
      try {
        v = std::stod(*s);
      } catch (const std::exception&) {
        throw ConfigError(std::string("thresholds: malformed value for ") + key);
      }
    }
  };
  read("energy_rel", th.energy_rel);
  read("hausdorff", th.hausdorff);
  read("distance", th.distance);
  read("far_field", th.far_field);
  read("far_distance", th.far_distance);
  return th;
}

CompareReport compare_run(const std::string& run_dir, const Thresholds& th) {
  const fs::path dir(run_dir);
  if (!fs::exists(dir / "config.ini")) throw Error("missing artifact '" + (dir / "config.ini").string() + "'");
  const RunConfig cfg = load_config((dir / "config.ini").string());
  const Problem prob = build_problem(cfg);
  const nlohmann::ordered_json doc = read_json(dir / "trace.json");
  if (!fs::exists(dir / "field_final.txt")) throw Error("missing artifact '" + (dir / "field_final.txt").string() + "'");
  const ScalarField u = load_field((dir / "field_final.txt").string());
  if (!(u.grid() == prob.domain.grid())) throw Error("final field does not match the configured grid");

  CompareReport rep;
  const auto& last = doc.at("rungs").back();
  rep.final_energy = last.at("iterations").back().at("total").get<double>();
  const Params params =
      make_params(last.at("params").at("lambda").get<double>(), cfg.beta_exp, last.at("params").at("epsilon").get<double>());

  const std::vector<Vec2> sub = sublevel_set(u, cfg.threshold, prob.domain);
  rep.sublevel_nonempty = !sub.empty();
  const std::optional<SteinerTree> oracle = oracle_for(terminals(cfg));
  if (!oracle) return rep;
  rep.has_oracle = true;
  rep.oracle = *oracle;
  rep.energy_rel = std::abs(rep.final_energy - oracle->length) / oracle->length;
  const std::vector<Vec2> K = sample_tree(*oracle, 0.25 * prob.domain.grid().hmin());
  rep.hausdorff = sub.empty() ? std::numeric_limits<double>::infinity() : hausdorff(sub, K);
  const DistanceField df = distance_field(metric_field(u, params), prob.measure.base_point(), prob.domain);
  rep.distance = compare_distance_fields(df, K, prob.domain);
  rep.far_field = far_field_deviation(u, K, th.far_distance, prob.domain);
  return rep;
}

int run_compare(const std::string& run_dir, const std::optional<std::string>& thresholds_path, std::ostream& out,
                std::ostream& err) {
  Thresholds th;
  CompareReport rep;
  try {
    if (thresholds_path) th = load_thresholds(*thresholds_path);
    rep = compare_run(run_dir, th);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code::config_error;
  }

  bool ok = true;
  nlohmann::ordered_json j;
  j["final_energy"] = rep.final_energy;
  auto line = [&](const char* name, double value, double limit) {
    const bool pass = value <= limit;
    ok = ok && pass;
    out << std::left << std::setw(22) << name << std::right << std::setw(14) << std::setprecision(6) << value
        << "  limit " << std::setw(10) << limit << "  " << (pass ? "ok" : "FAIL") << "\n";
    j[name] = {{"value", value}, {"limit", limit}, {"pass", pass}};
  };
  out << std::left << std::setw(22) << "sublevel_nonempty" << std::right << std::setw(14)
      << (rep.sublevel_nonempty ? "yes" : "no") << "  " << (rep.sublevel_nonempty ? "ok" : "FAIL") << "\n";
  j["sublevel_nonempty"] = rep.sublevel_nonempty;
  ok = ok && rep.sublevel_nonempty;
  if (rep.has_oracle) {
    j["oracle_length"] = rep.oracle.length;
    line("energy_rel", rep.energy_rel, th.energy_rel);
    line("hausdorff", rep.hausdorff, th.hausdorff);
    line("distance_sup", rep.distance, th.distance);
    line("far_field", rep.far_field, th.far_field);
  } else {
    out << "no exact tree for this terminal count; oracle metrics skipped\n";
  }
  j["pass"] = ok;

  try {
    const fs::path trace = fs::path(run_dir) / "trace.json";
    nlohmann::ordered_json doc = read_json(trace);
    doc["comparison"] = j;
    auto os = open_out(trace);
    os << doc.dump(2) << "\n";
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code::config_error;
  }
  return ok ? exit_code::ok : exit_code::threshold_failure;
}

}  // namespace steiner
