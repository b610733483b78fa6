#include "steiner/config.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

#include <boost/algorithm/string.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

namespace steiner {

namespace pt = boost::property_tree;

namespace {

double parse_real(const std::string& text, const std::string& key) {
  const std::string t = boost::algorithm::trim_copy(text);
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(t, &used);
  } catch (const std::exception&) {
    throw ConfigError("malformed number for '" + key + "': '" + text + "'");
  }
  if (used != t.size() || !std::isfinite(v)) throw ConfigError("malformed number for '" + key + "': '" + text + "'");
  return v;
}

std::vector<double> parse_reals(const std::string& text, const std::string& key) {
  std::vector<std::string> parts;
  boost::algorithm::split(parts, text, boost::algorithm::is_any_of(","));
  std::vector<double> out;
  for (const std::string& p : parts) out.push_back(parse_real(p, key));
  return out;
}

Vec2 parse_point(const std::string& text, const std::string& key) {
  const std::vector<double> xy = parse_reals(text, key);
  if (xy.size() != 2) throw ConfigError("'" + key + "' expects points written as x,y");
  return {xy[0], xy[1]};
}

std::vector<Vec2> parse_points(const std::string& text, const std::string& key) {
  std::vector<std::string> parts;
  boost::algorithm::split(parts, text, boost::algorithm::is_any_of(";"));
  std::vector<Vec2> out;
  for (const std::string& p : parts) {
    if (boost::algorithm::trim_copy(p).empty()) continue;
    out.push_back(parse_point(p, key));
  }
  return out;
}

std::string get(const pt::ptree& tree, const std::string& key) {
  const auto v = tree.get_optional<std::string>(pt::ptree::path_type(key, '.'));
  if (!v) throw ConfigError("missing key '" + key + "'");
  return *v;
}

std::optional<std::string> get_opt(const pt::ptree& tree, const std::string& key) {
  if (auto v = tree.get_optional<std::string>(pt::ptree::path_type(key, '.'))) return *v;
  return std::nullopt;
}

long long parse_integer(const std::string& text, const std::string& key) {
  const std::string t = boost::algorithm::trim_copy(text);
  std::size_t used = 0;
  long long v = 0;
  try {
    v = std::stoll(t, &used);
  } catch (const std::exception&) {
    throw ConfigError("malformed integer for '" + key + "': '" + text + "'");
  }
  if (used != t.size()) throw ConfigError("malformed integer for '" + key + "': '" + text + "'");
  return v;
}

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

std::string fmt(Vec2 p) { return fmt(p.x) + "," + fmt(p.y); }

std::string fmt_points(const std::vector<Vec2>& pts) {
  std::string s;
  for (std::size_t k = 0; k < pts.size(); ++k) s += (k ? "; " : "") + fmt(pts[k]);
  return s;
}

std::string fmt_reals(const std::vector<double>& v) {
  std::string s;
  for (std::size_t k = 0; k < v.size(); ++k) s += (k ? ", " : "") + fmt(v[k]);
  return s;
}

void validate(const RunConfig& c) {
  if (c.nx < 8 || c.ny < 8) throw ConfigError("grid needs at least 8 nodes per direction");
  if (c.atoms.empty()) throw ConfigError("measure needs at least one atom");
  if (c.weights.size() != c.atoms.size()) throw ConfigError("weights and atoms differ in count");
  for (double w : c.weights)
    if (!(w > 0.0)) throw ConfigError("weights must be positive");
  if (!(c.tol > 0.0)) throw ConfigError("tol must be positive");
  if (c.max_iter < 1) throw ConfigError("max_iter must be at least 1");
  if (c.restarts < 0) throw ConfigError("restarts must be nonnegative");
  if (!(c.threshold > 0.0 && c.threshold < 1.0)) throw ConfigError("threshold must lie in (0,1)");
  if (c.eta0 && !(*c.eta0 > 0.0)) throw ConfigError("eta0 must be positive");
  try {
    validate_schedule(c.schedule, c.beta_exp);
  } catch (const ParameterError& e) {
    throw ConfigError(e.what());
  }
}

}  // namespace

bool operator==(const RunConfig& a, const RunConfig& b) {
  auto same_schedule = [](const std::vector<Rung>& x, const std::vector<Rung>& y) {
    if (x.size() != y.size()) return false;
    for (std::size_t k = 0; k < x.size(); ++k)
      if (x[k].epsilon != y[k].epsilon || x[k].lambda != y[k].lambda) return false;
    return true;
  };
  return a.polygon == b.polygon && a.nx == b.nx && a.ny == b.ny && a.eta0 == b.eta0 && a.base == b.base &&
         a.atoms == b.atoms && a.weights == b.weights && same_schedule(a.schedule, b.schedule) &&
         a.beta_exp == b.beta_exp && a.tol == b.tol && a.max_iter == b.max_iter && a.restarts == b.restarts &&
         a.seed == b.seed && a.out_dir == b.out_dir && a.threshold == b.threshold;
}

std::vector<Vec2> parse_point_list(const std::string& text) { return parse_points(text, "points"); }

RunConfig parse_config(std::istream& is) {
  pt::ptree tree;
  try {
    pt::read_ini(is, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("config syntax: ") + e.what());
  }

  RunConfig c;
  c.polygon = parse_points(get(tree, "domain.polygon"), "domain.polygon");
  c.nx = static_cast<int>(parse_integer(get(tree, "domain.nx"), "domain.nx"));
  c.ny = static_cast<int>(parse_integer(get(tree, "domain.ny"), "domain.ny"));
  if (auto v = get_opt(tree, "domain.eta0")) c.eta0 = parse_real(*v, "domain.eta0");

  c.base = parse_point(get(tree, "measure.base"), "measure.base");
  c.atoms = parse_points(get(tree, "measure.atoms"), "measure.atoms");
  if (auto v = get_opt(tree, "measure.weights")) {
    c.weights = parse_reals(*v, "measure.weights");
  } else {
    c.weights.assign(c.atoms.size(), 1.0 / static_cast<double>(c.atoms.size() + 1));
  }

  const std::vector<double> eps = parse_reals(get(tree, "schedule.epsilon"), "schedule.epsilon");
  std::vector<double> lam = eps;
  if (auto v = get_opt(tree, "schedule.lambda")) lam = parse_reals(*v, "schedule.lambda");
  if (lam.size() != eps.size()) throw ConfigError("schedule.lambda and schedule.epsilon differ in length");
  for (std::size_t k = 0; k < eps.size(); ++k) c.schedule.push_back({eps[k], lam[k]});
  c.beta_exp = parse_real(get(tree, "schedule.beta"), "schedule.beta");
  if (auto v = get_opt(tree, "schedule.tol")) c.tol = parse_real(*v, "schedule.tol");
  if (auto v = get_opt(tree, "schedule.max_iter"))
    c.max_iter = static_cast<int>(parse_integer(*v, "schedule.max_iter"));
  if (auto v = get_opt(tree, "schedule.restarts"))
    c.restarts = static_cast<int>(parse_integer(*v, "schedule.restarts"));
  if (auto v = get_opt(tree, "schedule.seed")) {
    const long long s = parse_integer(*v, "schedule.seed");
    if (s < 0) throw ConfigError("schedule.seed must be nonnegative");
    c.seed = static_cast<std::uint64_t>(s);
  }

  if (auto v = get_opt(tree, "output.dir")) c.out_dir = boost::algorithm::trim_copy(*v);
  if (auto v = get_opt(tree, "output.threshold")) c.threshold = parse_real(*v, "output.threshold");

  validate(c);
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config '" + path + "'");
  return parse_config(in);
}

void write_config(std::ostream& os, const RunConfig& c) {
  std::vector<double> eps, lam;
  for (const Rung& r : c.schedule) {
    eps.push_back(r.epsilon);
    lam.push_back(r.lambda);
  }
  os << "[domain]\n";
  os << "polygon = " << fmt_points(c.polygon) << "\n";
  os << "nx = " << c.nx << "\nny = " << c.ny << "\n";
  if (c.eta0) os << "eta0 = " << fmt(*c.eta0) << "\n";
  os << "\n[measure]\n";
  os << "base = " << fmt(c.base) << "\n";
  os << "atoms = " << fmt_points(c.atoms) << "\n";
  os << "weights = " << fmt_reals(c.weights) << "\n";
  os << "\n[schedule]\n";
  os << "epsilon = " << fmt_reals(eps) << "\n";
  os << "lambda = " << fmt_reals(lam) << "\n";
  os << "beta = " << fmt(c.beta_exp) << "\n";
  os << "tol = " << fmt(c.tol) << "\n";
  os << "max_iter = " << c.max_iter << "\n";
  os << "restarts = " << c.restarts << "\n";
  os << "seed = " << c.seed << "\n";
  os << "\n[output]\n";
  os << "dir = " << c.out_dir << "\n";
  os << "threshold = " << fmt(c.threshold) << "\n";
}

Problem build_problem(const RunConfig& c) {
  try {
    ConvexPolygon poly(c.polygon);
    std::vector<Atom> atoms;
    for (std::size_t k = 0; k < c.atoms.size(); ++k) atoms.push_back({c.atoms[k], c.weights[k]});
    DiscreteMeasure mu(std::move(atoms), c.base, poly);
    return {Domain(poly, c.nx, c.ny, c.eta0), std::move(mu)};
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
}

std::vector<Vec2> terminals(const RunConfig& c) {
  std::vector<Vec2> t{c.base};
  for (const Vec2& a : c.atoms)
    if (std::find(t.begin(), t.end(), a) == t.end()) t.push_back(a);
  return t;
}

std::vector<std::string> config_warnings(const RunConfig& c) {
  std::vector<std::string> out;
  const Problem p = build_problem(c);
  const double h = std::max(p.domain.grid().hx, p.domain.grid().hy);
  for (const Rung& r : c.schedule) {
    if (h > r.epsilon / 3.0) {
      std::ostringstream os;
      os << "grid spacing " << h << " exceeds epsilon/3 = " << r.epsilon / 3.0 << " at epsilon " << r.epsilon;
      out.push_back(os.str());
    }
  }
  return out;
}

}  // namespace steiner
