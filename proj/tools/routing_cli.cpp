/**
 * routing — command-line front end for the selfish-routing toolkit.
 *
 * Subcommands:
 *   bounds          price-of-anarchy bound for a polynomial class (JSON)
 *   table1          bound table for all classes [q,p], p <= 4 (CSV)
 *   curves          bound-vs-theta curves for one class (CSV)
 *   solve           equilibrium flow for an instance file (JSON report)
 *   poa             equilibrium/optimum pair and their ratio (JSON report)
 *   generate        worst-case instance constructions (+ sidecar metadata)
 *   estimate-theta  free-flow deviation estimates from GPS traces (CSV+JSON)
 *
 * Exit codes: 0 success, 2 usage or validation failure, 3 file I/O failure,
 * 4 solver did not certify convergence. Results go to stdout; `-o` redirects
 * the bulky artifact (CSV or instance JSON) into a file.
 */

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "routing/bounds.hpp"
#include "routing/errors.hpp"
#include "routing/estimator.hpp"
#include "routing/generators.hpp"
#include "routing/io.hpp"
#include "routing/network_solver.hpp"
#include "routing/solver.hpp"

namespace {

using namespace routing;

[[noreturn]] void usage_error(const std::string& message) {
  throw std::invalid_argument("cli: " + message);
}

// theta on the command line: a nonnegative number or the literal "inf".
double parse_theta(const std::string& text) {
  if (text == "inf") return std::numeric_limits<double>::infinity();
  try {
    std::size_t used = 0;
    const double value = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return value;
  } catch (const std::exception&) {
    usage_error("theta must be a number or \"inf\", got '" + text + "'");
  }
}

Topology parse_topology(const std::string& text) {
  if (text == "general") return Topology::General;
  if (text == "path-disjoint") return Topology::PathDisjoint;
  usage_error("topology must be \"general\" or \"path-disjoint\"");
}

std::string six(double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.6f", value);
  return buffer;
}

// Streams either to stdout or to a file that must open; used by the CSV
// commands so `-o` and terminal output share one code path.
class OutputTarget {
 public:
  explicit OutputTarget(const std::string& path) {
    if (path.empty()) return;
    file_.open(path);
    if (!file_) throw io_error("cli: cannot write '" + path + "'");
  }
  std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }
  void finish(const std::string& path) {
    if (!file_.is_open()) return;
    file_.flush();
    if (!file_) throw io_error("cli: failed while writing '" + path + "'");
  }

 private:
  std::ofstream file_;
};

// ---------------------------------------------------------------- bounds

int run_bounds(int p, int q, const std::string& theta_text,
               const std::string& topology_text) {
  BoundQuery query;
  query.p = p;
  query.q = q;
  query.theta = parse_theta(theta_text);
  query.topology = parse_topology(topology_text);
  const BoundResult result = poa_bound(query);

  // Hand-rendered JSON: the contract is six decimals, not full precision.
  std::string theta_field = std::isfinite(query.theta)
                                ? six(query.theta)
                                : std::string("\"inf\"");
  std::cout << "{\n"
            << "  \"p\": " << query.p << ",\n"
            << "  \"q\": " << query.q << ",\n"
            << "  \"theta\": " << theta_field << ",\n"
            << "  \"topology\": \"" << topology_text << "\",\n"
            << "  \"value\": " << six(result.value) << ",\n"
            << "  \"gamma\": " << six(result.gamma) << ",\n"
            << "  \"theta_component\": " << six(result.theta_component)
            << ",\n"
            << "  \"method\": \""
            << (result.method == BoundMethod::ClosedForm ? "closed-form"
                                                         : "numeric")
            << "\"\n}\n";
  return 0;
}

// ---------------------------------------------------------------- table1

int run_table1(const std::string& out_path) {
  const double inf = std::numeric_limits<double>::infinity();
  const std::vector<BoundTableRow> rows =
      poly_bound_table(4, {0.0, 0.5, 1.0, inf});
  OutputTarget target(out_path);
  write_bound_table_csv(target.stream(), rows);
  target.finish(out_path);
  return 0;
}

// ---------------------------------------------------------------- curves

int run_curves(int p, int q, double theta_max, int steps,
               const std::string& out_path) {
  if (steps < 2) usage_error("curves needs at least 2 steps");
  if (!(theta_max > 0.0) || !std::isfinite(theta_max)) {
    usage_error("theta-max must be positive and finite");
  }
  std::vector<double> grid;
  for (int i = 0; i < steps; ++i) {
    grid.push_back(theta_max * i / (steps - 1));
  }
  const auto general = bound_curve(p, q, grid, Topology::General);
  const auto disjoint = bound_curve(p, q, grid, Topology::PathDisjoint);
  const double limit = gamma_infinity_poly(p);

  OutputTarget target(out_path);
  std::ostream& out = target.stream();
  out << "theta,general,path_disjoint,gamma_inf\n";
  for (int i = 0; i < steps; ++i) {
    out << six(grid[i]) << ',' << six(general[i].second) << ','
        << six(disjoint[i].second) << ',' << six(limit) << '\n';
  }
  target.finish(out_path);
  return 0;
}

// ------------------------------------------------------------- solve/poa

int run_solve(const std::string& instance_path, double tol, long max_iters) {
  const ParsedInstance instance = load_instance(instance_path);
  SolveOptions options;
  options.tol = tol;
  options.max_iters = max_iters;
  if (instance.network) {
    const PathSolution solution =
        solve_equilibrium_paths(*instance.network, options);
    std::cout << path_solution_json(*instance.network, solution);
    return solution.report.converged ? 0 : 4;
  }
  const SolveReport report = solve_equilibrium(*instance.game, options);
  std::cout << solve_report_json(*instance.game, report);
  return report.converged ? 0 : 4;
}

int run_poa(const std::string& instance_path, double tol) {
  const ParsedInstance instance = load_instance(instance_path);
  if (instance.network) {
    const NetworkPoAReport report =
        network_price_of_anarchy(*instance.network, tol);
    std::cout << network_poa_json(*instance.network, report);
  } else {
    const PoAReport report = price_of_anarchy(*instance.game, tol);
    std::cout << poa_report_json(*instance.game, report);
  }
  return 0;
}

// -------------------------------------------------------------- generate

GeneratorKind parse_kind(const std::string& name) {
  if (name == "pigou") return GeneratorKind::PigouLike;
  if (name == "multilevel") return GeneratorKind::MultiLevelLB;
  if (name == "parallel-gamma") return GeneratorKind::ParallelGamma;
  if (name == "twolink-eta") return GeneratorKind::TwoLinkEta;
  if (name == "expansion") return GeneratorKind::NetworkExpansion;
  usage_error("unknown construction '" + name + "'");
}

// foo.json -> foo.meta.json; anything else just gains ".meta.json".
std::string sidecar_path(const std::string& out_path) {
  const std::string suffix = ".json";
  if (out_path.size() > suffix.size() &&
      out_path.compare(out_path.size() - suffix.size(), suffix.size(),
                       suffix) == 0) {
    return out_path.substr(0, out_path.size() - suffix.size()) + ".meta.json";
  }
  return out_path + ".meta.json";
}

int run_generate(const GeneratorSpec& spec, const std::string& out_path) {
  const GeneratedInstance instance = generate(spec);
  const std::string instance_json = instance.network
                                        ? network_to_json(*instance.network)
                                        : game_to_json(instance.game);
  if (out_path.empty()) {
    std::cout << instance_json << sidecar_json(instance);
  } else {
    write_text_file(out_path, instance_json);
    write_text_file(sidecar_path(out_path), sidecar_json(instance));
  }
  char line[64];
  std::snprintf(line, sizeof(line), "predicted_poa %.12g\n",
                instance.predicted_poa);
  std::cout << line;
  return 0;
}

// -------------------------------------------------------- estimate-theta

int run_estimate_theta(const std::string& nodes_path,
                       const std::string& edges_path,
                       const std::string& trips_path,
                       const std::string& out_path, double snap_radius,
                       double small_gap) {
  const RoadGraph graph = RoadGraph::from_csv(nodes_path, edges_path);
  const std::vector<Trace> traces = read_traces_csv(trips_path, graph);
  EstimateConfig config;
  config.snap_radius_m = snap_radius;
  config.small_gap_threshold_m = small_gap;

  std::vector<TripEstimate> estimates;
  estimates.reserve(traces.size());
  for (const Trace& trace : traces) {
    estimates.push_back(estimate_trip(graph, trace, config));
  }
  if (out_path.empty()) {
    write_estimates_csv(std::cout, estimates);
  } else {
    write_estimates_csv(out_path, estimates);
  }

  const DeviationSummary summary = deviation_distribution(estimates);
  nlohmann::json deciles = nlohmann::json::array();
  for (double d : summary.deciles) deciles.push_back(d);
  nlohmann::json fractions = nlohmann::json::object();
  for (const auto& [threshold, fraction] : summary.fraction_below) {
    char key[32];
    std::snprintf(key, sizeof(key), "%g", threshold);
    fractions[key] = fraction;
  }
  const nlohmann::json doc{{"count", summary.count},
                           {"deciles", std::move(deciles)},
                           {"fraction_below", std::move(fractions)}};
  std::cout << doc.dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Selfish-routing toolkit: price-of-anarchy bounds for free-flow "
      "games, equilibrium solving, worst-case instance generation, and "
      "free-flow deviation estimation from GPS traces."};
  app.require_subcommand(1);

  // bounds
  int bounds_p = 1, bounds_q = 1;
  std::string bounds_theta, bounds_topology = "general";
  CLI::App* bounds_cmd = app.add_subcommand(
      "bounds",
      "Price-of-anarchy bound for polynomial latencies with degrees in "
      "[q, p] and free-flow spread theta. Prints a JSON object (six "
      "decimals) with the bound, its two components, and the method.");
  bounds_cmd->add_option("-p,--p", bounds_p, "largest degree (>= 1)")
      ->required();
  bounds_cmd->add_option("-q,--q", bounds_q, "smallest degree (1 <= q <= p)")
      ->required();
  bounds_cmd
      ->add_option("-t,--theta", bounds_theta,
                   "free-flow spread: nonnegative number or \"inf\"")
      ->required();
  bounds_cmd->add_option("-T,--topology", bounds_topology,
                         "\"general\" or \"path-disjoint\" [general]");

  // table1
  std::string table1_out;
  CLI::App* table1_cmd = app.add_subcommand(
      "table1",
      "Bound table for every class [q, p] with p <= 4 at theta in "
      "{0, 0.5, 1, inf}: CSV `p,q,theta,general,path_disjoint,method` "
      "with four-decimal values.");
  table1_cmd->add_option("-o,--out", table1_out, "write CSV here instead of stdout");

  // curves
  int curves_p = 1, curves_q = 1, curves_steps = 101;
  double curves_theta_max = 1.0;
  std::string curves_out;
  CLI::App* curves_cmd = app.add_subcommand(
      "curves",
      "Bound-vs-theta curves for one class [q, p] on a uniform grid over "
      "[0, theta-max]: CSV `theta,general,path_disjoint,gamma_inf`.");
  curves_cmd->add_option("-p,--p", curves_p, "largest degree (>= 1)")
      ->required();
  curves_cmd->add_option("-q,--q", curves_q, "smallest degree (1 <= q <= p)")
      ->required();
  curves_cmd->add_option("-t,--theta-max", curves_theta_max,
                         "grid endpoint (> 0) [1]");
  curves_cmd->add_option("-s,--steps", curves_steps,
                         "number of grid points (>= 2) [101]");
  curves_cmd->add_option("-o,--out", curves_out,
                         "write CSV here instead of stdout");

  // solve
  std::string solve_instance;
  double solve_tol = 1e-8;
  long solve_iters = 200000;
  CLI::App* solve_cmd = app.add_subcommand(
      "solve",
      "Equilibrium flow for a JSON instance (explicit strategy sets, or a "
      "network with nodes/edges/commodities). Prints a JSON report with "
      "objective, certified gap, profile, and loads. Exit 4 if the gap "
      "is not certified.");
  solve_cmd->add_option("-i,--instance", solve_instance, "instance JSON file")
      ->required();
  solve_cmd->add_option("-t,--tol", solve_tol,
                        "normalized duality-gap target [1e-8]");
  solve_cmd->add_option("-m,--max-iters", solve_iters,
                        "iteration budget [200000]");

  // poa
  std::string poa_instance;
  double poa_tol = 1e-8;
  CLI::App* poa_cmd = app.add_subcommand(
      "poa",
      "Equilibrium and optimum side by side with their total-latency "
      "ratio. Same instance formats as `solve`; exit 4 when either solve "
      "misses the tolerance.");
  poa_cmd->add_option("-i,--instance", poa_instance, "instance JSON file")
      ->required();
  poa_cmd->add_option("-t,--tol", poa_tol,
                      "normalized duality-gap target [1e-8]");

  // generate
  std::string gen_kind, gen_latency, gen_latency2, gen_out;
  double gen_c = 0, gen_k = 0, gen_l = 0, gen_theta = 0, gen_beta = 0;
  double gen_k1 = 0, gen_l1 = 0, gen_k2 = 0, gen_l2 = 0;
  int gen_n = 0, gen_m = 0, gen_h = 0;
  CLI::App* gen_cmd = app.add_subcommand(
      "generate",
      "Worst-case constructions. Kinds: `pigou` (-c), `multilevel` (-k -l "
      "-t -n -m -f), `parallel-gamma` (--k1 --l1 --k2 --l2 -n -f -g), "
      "`twolink-eta` (-k -l -t -f), `expansion` (multilevel plus -H -B). "
      "Writes the instance JSON (and a .meta.json sidecar with "
      "predicted_poa/theta when -o is given) and prints predicted_poa.");
  gen_cmd->add_option("kind", gen_kind,
                      "pigou | multilevel | parallel-gamma | twolink-eta | "
                      "expansion")
      ->required();
  gen_cmd->add_option("-c,--c", gen_c, "pigou: constant offset in [0, 1]");
  gen_cmd->add_option("-k,--k", gen_k, "equilibrium load (> l)");
  gen_cmd->add_option("-l,--l", gen_l, "optimum load (> 0)");
  gen_cmd->add_option("-t,--theta", gen_theta, "free-flow spread (> 0)");
  gen_cmd->add_option("-n,--n", gen_n, "fan-out / link-group size (>= 1)");
  gen_cmd->add_option("-m,--m", gen_m, "number of levels (>= 2)");
  gen_cmd->add_option("-f,--latency", gen_latency,
                      "base latency, e.g. \"x\", \"x^2\", \"0.5*x^3+x\"");
  gen_cmd->add_option("-g,--latency2", gen_latency2,
                      "parallel-gamma: latency of the underloaded links");
  gen_cmd->add_option("--k1", gen_k1, "parallel-gamma: overloaded eq load");
  gen_cmd->add_option("--l1", gen_l1, "parallel-gamma: overloaded opt load");
  gen_cmd->add_option("--k2", gen_k2, "parallel-gamma: underloaded eq load");
  gen_cmd->add_option("--l2", gen_l2, "parallel-gamma: underloaded opt load");
  gen_cmd->add_option("-H,--height", gen_h,
                      "expansion: edges per unit latency (>= 1)");
  gen_cmd->add_option("-B,--beta", gen_beta,
                      "expansion: constant-edge latency (> 0)");
  gen_cmd->add_option("-o,--out", gen_out,
                      "instance file; sidecar goes to <out>.meta.json");

  // estimate-theta
  std::string est_nodes, est_edges, est_trips, est_out;
  double est_snap = 30.0, est_gap = 300.0;
  CLI::App* est_cmd = app.add_subcommand(
      "estimate-theta",
      "Per-trip free-flow deviation from GPS traces. Inputs: node CSV "
      "`id,lat,lon`, edge CSV `id,from,to,length_m,speed_mps,road_type` "
      "(blank speeds fall back by road type), trace CSV "
      "`trip_id,timestamp,lat,lon`. Writes the per-trip CSV (stdout or "
      "-o) and prints a JSON summary with theta-hat deciles and the "
      "fraction of trips below 0.25/0.5/0.88/1.");
  est_cmd->add_option("--nodes", est_nodes, "node CSV file")->required();
  est_cmd->add_option("--edges", est_edges, "edge CSV file")->required();
  est_cmd->add_option("--trips", est_trips, "trace CSV file")->required();
  est_cmd->add_option("-o,--out", est_out,
                      "write the per-trip CSV here instead of stdout");
  est_cmd->add_option("-r,--snap-radius", est_snap,
                      "matching radius in meters (> 0) [30]");
  est_cmd->add_option("-g,--small-gap", est_gap,
                      "bridged-gap threshold in meters [300]");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (bounds_cmd->parsed()) {
      return run_bounds(bounds_p, bounds_q, bounds_theta, bounds_topology);
    }
    if (table1_cmd->parsed()) return run_table1(table1_out);
    if (curves_cmd->parsed()) {
      return run_curves(curves_p, curves_q, curves_theta_max, curves_steps,
                        curves_out);
    }
    if (solve_cmd->parsed()) {
      return run_solve(solve_instance, solve_tol, solve_iters);
    }
    if (poa_cmd->parsed()) return run_poa(poa_instance, poa_tol);
    if (gen_cmd->parsed()) {
      GeneratorSpec spec;
      spec.kind = parse_kind(gen_kind);
      spec.latency = gen_latency;
      spec.latency2 = gen_latency2;
      const auto set_if = [&](const char* flag, const char* name,
                              double value) {
        if (gen_cmd->count(flag)) spec.parameters[name] = value;
      };
      set_if("-c", "c", gen_c);
      set_if("-k", "k", gen_k);
      set_if("-l", "l", gen_l);
      set_if("-t", "theta", gen_theta);
      set_if("-n", "n", gen_n);
      set_if("-m", "m", gen_m);
      set_if("--k1", "k1", gen_k1);
      set_if("--l1", "l1", gen_l1);
      set_if("--k2", "k2", gen_k2);
      set_if("--l2", "l2", gen_l2);
      set_if("-H", "h", gen_h);
      set_if("-B", "beta", gen_beta);
      return run_generate(spec, gen_out);
    }
    if (est_cmd->parsed()) {
      return run_estimate_theta(est_nodes, est_edges, est_trips, est_out,
                                est_snap, est_gap);
    }
  } catch (const io_error& e) {
    std::cerr << e.what() << "\n";
    return 3;
  } catch (const convergence_error& e) {
    std::cerr << e.what() << "\n";
    return 4;
  } catch (const std::invalid_argument& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "unexpected error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
