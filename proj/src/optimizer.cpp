#include "steiner/optimizer.hpp"

#include <algorithm>
#include <iomanip>
#include <numeric>
#include <ostream>
#include <random>

#include "steiner/curves.hpp"
#include "steiner/geodesic.hpp"

namespace steiner {

ScalarField metric_field(const ScalarField& u, const Params& params) {
  std::vector<double> w(u.values().begin(), u.values().end());
  for (double& v : w) v = params.delta + v * v;
  return ScalarField(u.grid(), std::move(w));
}

EnergyBreakdown energy(const ScalarField& u, const CurveBundle& bundle, const DiscreteMeasure& mu,
                       const Params& params, const Domain& dom) {
  check_bundle(bundle, mu, 1e-9);
  EnergyBreakdown e;
  e.diffuse = diffuse_energy(u, params, dom);
  const ScalarField w = metric_field(u, params);
  double g = 0.0;
  for (std::size_t i = 0; i < bundle.size(); ++i) g += mu.atoms()[i].weight * path_integral(w, bundle.curves[i]);
  e.geodesic = g / params.lambda;
  e.total = e.diffuse + e.geodesic;
  return e;
}

CurveBundle best_curves(const ScalarField& u, const DiscreteMeasure& mu, const Params& params, const Domain& dom) {
  const ScalarField w = metric_field(u, params);
  const DistanceField df = distance_field(w, mu.base_point(), dom);
  const double spacing = 0.5 * dom.grid().hmin();
  CurveBundle out;
  out.curves.reserve(mu.size());
  for (const Atom& atom : mu.atoms()) {
    if (atom.point == mu.base_point()) {
      out.curves.emplace_back(std::vector<Vec2>{atom.point, atom.point});
      continue;
    }
    const Polyline path = shortest_path(df, atom.point, dom);
    const int n = std::max(2, static_cast<int>(std::ceil(path.length() / spacing)) + 1);
    out.curves.push_back(reparametrize_constant_speed(path, n));
  }
  return out;
}

SolveTrace alternate(const DiscreteMeasure& mu, const Params& params, const Domain& dom, const CurveBundle& init,
                     const AlternateOptions& opts, const ScalarField* init_u) {
  check_bundle(init, mu, 1e-9);
  SolveTrace trace;
  trace.params = params;
  trace.bundle = init;
  std::optional<ScalarField> u;
  if (init_u) u = *init_u;

  double previous = 0.0;
  for (int k = 1; k <= opts.max_iter; ++k) {
    EllipticSolution sol = solve_potential(trace.bundle, mu, params, dom, u ? &*u : nullptr, opts.solver);
    u = std::move(sol.u);

    const EnergyBreakdown current = energy(*u, trace.bundle, mu, params, dom);
    EnforceResult cand = enforce_ahlfors(best_curves(*u, mu, params, dom), *u, params, dom.omega0());
    const EnergyBreakdown proposed = energy(*u, cand.bundle, mu, params, dom);

    IterationRecord rec;
    rec.k = k;
    rec.cg_iters = sol.iterations;
    rec.replacements = cand.replacements;
    EnergyBreakdown kept = current;
    if (proposed.total <= current.total) {
      trace.bundle = std::move(cand.bundle);
      kept = proposed;
    } else {
      rec.curves_accepted = false;
    }
    rec.total = kept.total;
    rec.diffuse = kept.diffuse;
    rec.geodesic = kept.geodesic;
    rec.length = trace.bundle.total_length();
    trace.iterations.push_back(rec);

    if (k > 1) {
      const double drop = previous - kept.total;
      const double scale = std::max(std::abs(previous), 1e-300);
      if (drop / scale < opts.tol) {
        trace.converged = true;
        break;
      }
    }
    previous = kept.total;
  }
  trace.u = std::move(u);
  return trace;
}

void validate_schedule(const std::vector<Rung>& schedule, double beta_exp) {
  if (schedule.empty()) throw ParameterError("schedule is empty");
  for (std::size_t r = 0; r < schedule.size(); ++r) {
    make_params(schedule[r].lambda, beta_exp, schedule[r].epsilon);
    if (r > 0 && !(schedule[r].epsilon < schedule[r - 1].epsilon))
      throw ParameterError("schedule epsilon must be strictly decreasing");
  }
}

CurveBundle chained_bundle(const DiscreteMeasure& mu, const std::vector<std::size_t>& order) {
  CurveBundle b;
  b.curves.assign(mu.size(), Polyline({mu.base_point(), mu.base_point()}));
  std::vector<Vec2> chain{mu.base_point()};
  for (std::size_t idx : order) {
    chain.push_back(mu.atoms()[idx].point);
    b.curves[idx] = Polyline(chain).simplified();
  }
  return b;
}

std::vector<SolveTrace> continuation(const DiscreteMeasure& mu, const Domain& dom, const std::vector<Rung>& schedule,
                                     double beta_exp, const ContinuationOptions& opts) {
  validate_schedule(schedule, beta_exp);
  std::vector<SolveTrace> traces;
  for (std::size_t r = 0; r < schedule.size(); ++r) {
    const Params params = make_params(schedule[r].lambda, beta_exp, schedule[r].epsilon);
    if (r == 0) {
      SolveTrace best = alternate(mu, params, dom, straight_bundle(mu), opts.alternate);
      std::mt19937_64 rng(opts.seed);
      for (int s = 0; s < opts.restarts; ++s) {
        std::vector<std::size_t> order(mu.size());
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::shuffle(order.begin(), order.end(), rng);
        SolveTrace t = alternate(mu, params, dom, chained_bundle(mu, order), opts.alternate);
        if (t.iterations.back().total < best.iterations.back().total) best = std::move(t);
      }
      traces.push_back(std::move(best));
    } else {
      const SolveTrace& prev = traces.back();
      const ScalarField* warm = (opts.warm_start_u && prev.u) ? &*prev.u : nullptr;
      traces.push_back(alternate(mu, params, dom, prev.bundle, opts.alternate, warm));
    }
  }
  return traces;
}

double max_relative_increase(const SolveTrace& trace) {
  if (trace.iterations.empty()) return 0.0;
  const double scale = 1.0 + std::abs(trace.iterations.front().total);
  double worst = 0.0;
  for (std::size_t k = 1; k < trace.iterations.size(); ++k)
    worst = std::max(worst, (trace.iterations[k].total - trace.iterations[k - 1].total) / scale);
  return worst;
}

nlohmann::ordered_json params_json(const Params& p) {
  return {{"epsilon", p.epsilon},
          {"lambda", p.lambda},
          {"delta", p.delta},
          {"beta_exp", p.beta_exp},
          {"lambda_cap", p.lambda_cap}};
}

nlohmann::ordered_json trace_json(const SolveTrace& trace, const std::string& field_ref) {
  nlohmann::ordered_json j;
  j["params"] = params_json(trace.params);
  auto iters = nlohmann::ordered_json::array();
  for (const IterationRecord& r : trace.iterations) {
    iters.push_back({{"k", r.k},
                     {"total", r.total},
                     {"diffuse", r.diffuse},
                     {"geodesic", r.geodesic},
                     {"length", r.length},
                     {"replacements", r.replacements},
                     {"cg_iters", r.cg_iters},
                     {"curves_accepted", r.curves_accepted}});
  }
  j["iterations"] = std::move(iters);
  auto curves = nlohmann::ordered_json::array();
  for (const Polyline& c : trace.bundle.curves) {
    auto pts = nlohmann::ordered_json::array();
    for (const Vec2& p : c.points()) pts.push_back({p.x, p.y});
    curves.push_back(std::move(pts));
  }
  j["final"] = {{"field_ref", field_ref}, {"converged", trace.converged}, {"curves", std::move(curves)}};
  return j;
}

void write_trace_csv(std::ostream& os, const std::vector<SolveTrace>& traces) {
  os << "rung,epsilon,lambda,k,total,diffuse,geodesic,length,replacements,cg_iters\n";
  os << std::setprecision(17);
  for (std::size_t r = 0; r < traces.size(); ++r)
    for (const IterationRecord& it : traces[r].iterations)
      os << r << ',' << traces[r].params.epsilon << ',' << traces[r].params.lambda << ',' << it.k << ',' << it.total
         << ',' << it.diffuse << ',' << it.geodesic << ',' << it.length << ',' << it.replacements << ','
         << it.cg_iters << '\n';
}

}  // namespace steiner
