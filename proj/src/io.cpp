#include "routing/io.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <utility>
#include <vector>

#include "json.hpp"
#include "routing/errors.hpp"

namespace routing {
namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& message) {
  throw std::invalid_argument("io: " + message);
}

// JSON has no infinity literal; non-finite values travel as strings.
json number_or_inf(double value) {
  if (std::isfinite(value)) return value;
  return value > 0 ? "inf" : "-inf";
}

json latency_to_json(const LatencyFunction& f) {
  json coeffs = json::object();
  for (const auto& [degree, alpha] : f.coefficients()) {
    coeffs[std::to_string(degree)] = alpha;
  }
  return json{{"coeffs", std::move(coeffs)}, {"beta", f.constant_term()}};
}

double require_number(const json& value, const std::string& where) {
  if (!value.is_number()) fail(where + " must be a number");
  return value.get<double>();
}

std::string require_string(const json& value, const std::string& where) {
  if (!value.is_string()) fail(where + " must be a string");
  return value.get<std::string>();
}

const json& require_array(const json& object, const std::string& key,
                          const std::string& where) {
  if (!object.contains(key) || !object[key].is_array()) {
    fail(where + " needs a \"" + key + "\" array");
  }
  return object[key];
}

LatencyFunction latency_from_json(const json& value,
                                  const std::string& where) {
  if (!value.is_object()) fail(where + " must be an object");
  std::map<int, double> coeffs;
  if (value.contains("coeffs")) {
    if (!value["coeffs"].is_object()) {
      fail(where + ".coeffs must map degrees to coefficients");
    }
    for (const auto& [key, alpha] : value["coeffs"].items()) {
      int degree = 0;
      try {
        std::size_t used = 0;
        degree = std::stoi(key, &used);
        if (used != key.size()) throw std::invalid_argument(key);
      } catch (const std::exception&) {
        fail(where + ".coeffs has non-integer degree \"" + key + "\"");
      }
      coeffs[degree] = require_number(alpha, where + ".coeffs[" + key + "]");
    }
  }
  const double beta =
      value.contains("beta") ? require_number(value["beta"], where + ".beta")
                             : 0.0;
  return LatencyFunction(std::move(coeffs), beta);
}

CongestionGame game_from_json(const json& doc) {
  std::vector<std::string> ids;
  std::vector<LatencyFunction> latencies;
  std::map<std::string, int> index;
  for (const json& resource : require_array(doc, "resources", "instance")) {
    if (!resource.is_object() || !resource.contains("id") ||
        !resource.contains("latency")) {
      fail("each resource needs \"id\" and \"latency\"");
    }
    const std::string id = require_string(resource["id"], "resource id");
    index.emplace(id, static_cast<int>(ids.size()));
    ids.push_back(id);
    latencies.push_back(
        latency_from_json(resource["latency"], "resource \"" + id + "\""));
  }
  std::vector<PlayerType> types;
  for (const json& type : require_array(doc, "types", "instance")) {
    if (!type.is_object() || !type.contains("demand")) {
      fail("each type needs \"demand\" and \"strategies\"");
    }
    PlayerType player;
    player.demand = require_number(type["demand"], "type demand");
    const std::string where = "type " + std::to_string(types.size());
    for (const json& strategy : require_array(type, "strategies", where)) {
      if (!strategy.is_array()) fail(where + " strategies must be arrays");
      std::vector<int> resources;
      for (const json& ref : strategy) {
        const std::string id = require_string(ref, where + " resource");
        const auto it = index.find(id);
        if (it == index.end()) {
          fail(where + " references unknown resource \"" + id + "\"");
        }
        resources.push_back(it->second);
      }
      player.strategies.push_back(std::move(resources));
    }
    types.push_back(std::move(player));
  }
  return CongestionGame(std::move(ids), std::move(latencies),
                        std::move(types));
}

NetworkCongestionGame network_from_json(const json& doc) {
  std::vector<std::string> nodes;
  for (const json& node : require_array(doc, "nodes", "network instance")) {
    nodes.push_back(require_string(node, "node name"));
  }
  std::vector<NetworkEdge> edges;
  for (const json& edge : require_array(doc, "edges", "network instance")) {
    if (!edge.is_object() || !edge.contains("id") || !edge.contains("from") ||
        !edge.contains("to") || !edge.contains("latency")) {
      fail("each edge needs \"id\", \"from\", \"to\", and \"latency\"");
    }
    const std::string id = require_string(edge["id"], "edge id");
    edges.push_back(NetworkEdge{
        id, require_string(edge["from"], "edge \"" + id + "\" endpoint"),
        require_string(edge["to"], "edge \"" + id + "\" endpoint"),
        latency_from_json(edge["latency"], "edge \"" + id + "\"")});
  }
  std::vector<Commodity> commodities;
  for (const json& commodity :
       require_array(doc, "commodities", "network instance")) {
    if (!commodity.is_object() || !commodity.contains("source") ||
        !commodity.contains("sink") || !commodity.contains("demand")) {
      fail("each commodity needs \"source\", \"sink\", and \"demand\"");
    }
    commodities.push_back(
        Commodity{require_string(commodity["source"], "commodity source"),
                  require_string(commodity["sink"], "commodity sink"),
                  require_number(commodity["demand"], "commodity demand")});
  }
  return NetworkCongestionGame(std::move(nodes), std::move(edges),
                               std::move(commodities));
}

json profile_to_json(const CongestionGame& game, const FlowProfile& profile) {
  json types = json::array();
  for (int i = 0; i < game.num_types(); ++i) {
    json flows = json::array();
    const int count = static_cast<int>(game.type(i).strategies.size());
    for (int s = 0; s < count; ++s) flows.push_back(profile(i, s));
    types.push_back(std::move(flows));
  }
  return types;
}

json loads_to_json(const CongestionGame& game, const FlowProfile& profile) {
  const Eigen::VectorXd loads = edge_loads(game, profile);
  json by_id = json::object();
  for (int e = 0; e < game.num_resources(); ++e) {
    by_id[game.resource_id(e)] = loads[e];
  }
  return by_id;
}

json solve_report_to_json(const CongestionGame& game,
                          const SolveReport& report) {
  return json{{"objective", report.objective},
              {"wardrop_gap", report.wardrop_gap},
              {"iterations", report.iterations},
              {"converged", report.converged},
              {"profile", profile_to_json(game, report.profile)},
              {"loads", loads_to_json(game, report.profile)}};
}

json path_solution_to_json(const NetworkCongestionGame& network,
                           const PathSolution& solution) {
  const CongestionGame& game = solution.path_game;
  json paths = json::array();
  int flat = 0;
  for (int i = 0; i < game.num_types(); ++i) {
    const int count = static_cast<int>(game.type(i).strategies.size());
    for (int s = 0; s < count; ++s, ++flat) {
      const std::vector<int>& edges = solution.paths[flat];
      json nodes = json::array();
      if (!edges.empty()) {
        nodes.push_back(network.edges()[edges.front()].from);
        for (int e : edges) nodes.push_back(network.edges()[e].to);
      }
      paths.push_back(json{{"commodity", i},
                           {"nodes", std::move(nodes)},
                           {"flow", solution.report.profile(i, s)}});
    }
  }
  return json{{"objective", solution.report.objective},
              {"wardrop_gap", solution.report.wardrop_gap},
              {"iterations", solution.report.iterations},
              {"converged", solution.report.converged},
              {"paths", std::move(paths)},
              {"loads", loads_to_json(game, solution.report.profile)}};
}

std::string dump(const json& value) { return value.dump(2) + "\n"; }

}  // namespace

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("io: cannot open '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw io_error("io: cannot write '" + path + "'");
  out << text;
  out.flush();
  if (!out) throw io_error("io: failed while writing '" + path + "'");
}

std::string game_to_json(const CongestionGame& game) {
  json resources = json::array();
  for (int e = 0; e < game.num_resources(); ++e) {
    resources.push_back(json{{"id", game.resource_id(e)},
                             {"latency", latency_to_json(game.latency(e))}});
  }
  json types = json::array();
  for (const PlayerType& type : game.types()) {
    json strategies = json::array();
    for (const std::vector<int>& strategy : type.strategies) {
      json ids = json::array();
      for (int e : strategy) ids.push_back(game.resource_id(e));
      strategies.push_back(std::move(ids));
    }
    types.push_back(
        json{{"demand", type.demand}, {"strategies", std::move(strategies)}});
  }
  return dump(json{{"resources", std::move(resources)},
                   {"types", std::move(types)}});
}

std::string network_to_json(const NetworkCongestionGame& network) {
  json nodes = json::array();
  for (const std::string& node : network.nodes()) nodes.push_back(node);
  json edges = json::array();
  for (const NetworkEdge& edge : network.edges()) {
    edges.push_back(json{{"id", edge.id},
                         {"from", edge.from},
                         {"to", edge.to},
                         {"latency", latency_to_json(edge.latency)}});
  }
  json commodities = json::array();
  for (const Commodity& commodity : network.commodities()) {
    commodities.push_back(json{{"source", commodity.source},
                               {"sink", commodity.sink},
                               {"demand", commodity.demand}});
  }
  return dump(json{{"nodes", std::move(nodes)},
                   {"edges", std::move(edges)},
                   {"commodities", std::move(commodities)}});
}

ParsedInstance parse_instance(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& error) {
    fail(std::string("malformed JSON: ") + error.what());
  }
  if (!doc.is_object()) fail("instance must be a JSON object");
  ParsedInstance parsed;
  if (doc.contains("nodes")) {
    parsed.network = network_from_json(doc);
  } else {
    parsed.game = game_from_json(doc);
  }
  return parsed;
}

ParsedInstance load_instance(const std::string& path) {
  return parse_instance(read_text_file(path));
}

std::string solve_report_json(const CongestionGame& game,
                              const SolveReport& report) {
  return dump(solve_report_to_json(game, report));
}

std::string poa_report_json(const CongestionGame& game,
                            const PoAReport& report) {
  return dump(json{{"eq_cost", report.eq_cost},
                   {"opt_cost", report.opt_cost},
                   {"ratio", report.ratio},
                   {"eq", solve_report_to_json(game, report.eq)},
                   {"opt", solve_report_to_json(game, report.opt)}});
}

std::string path_solution_json(const NetworkCongestionGame& network,
                               const PathSolution& solution) {
  return dump(path_solution_to_json(network, solution));
}

std::string network_poa_json(const NetworkCongestionGame& network,
                             const NetworkPoAReport& report) {
  return dump(json{{"eq_cost", report.eq_cost},
                   {"opt_cost", report.opt_cost},
                   {"ratio", report.ratio},
                   {"eq", path_solution_to_json(network, report.eq)},
                   {"opt", path_solution_to_json(network, report.opt)}});
}

std::string sidecar_json(const GeneratedInstance& instance) {
  json parameters = json::object();
  for (const auto& [name, value] : instance.parameters) {
    parameters[name] = number_or_inf(value);
  }
  return dump(json{{"predicted_poa", number_or_inf(instance.predicted_poa)},
                   {"theta", number_or_inf(instance.theta)},
                   {"construction", instance.construction},
                   {"parameters", std::move(parameters)}});
}

}  // namespace routing
