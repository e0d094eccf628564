#pragma once

#include <optional>
#include <string>

#include "routing/game.hpp"
#include "routing/generators.hpp"
#include "routing/network.hpp"
#include "routing/network_solver.hpp"
#include "routing/solver.hpp"

namespace routing {

// Whole-file text helpers. Both throw io_error when the file cannot be
// opened (reading) or created/flushed (writing).
std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

// Instance as JSON:
//
//   { "resources": [ { "id": str,
//                      "latency": { "coeffs": { "<degree>": alpha, ... },
//                                   "beta": beta } }, ... ],
//     "types":     [ { "demand": r,
//                      "strategies": [ [ resource-id, ... ], ... ] }, ... ] }
//
// The network variant replaces resources/types with
//
//   { "nodes": [ str, ... ],
//     "edges": [ { "id", "from", "to", "latency" }, ... ],
//     "commodities": [ { "source", "sink", "demand" }, ... ] }.
//
// Serialization is 2-space pretty-printed with round-trip float precision.
std::string game_to_json(const CongestionGame& game);
std::string network_to_json(const NetworkCongestionGame& network);

// Exactly one member is set, depending on which variant the document is
// (the presence of a "nodes" key selects the network reading).
struct ParsedInstance {
  std::optional<CongestionGame> game;
  std::optional<NetworkCongestionGame> network;
};

// Decodes either instance variant. Malformed JSON, wrong shapes, unknown
// resource ids, and constructor rejections all surface as
// std::invalid_argument; load_instance additionally throws io_error when
// the file cannot be opened.
ParsedInstance parse_instance(const std::string& json_text);
ParsedInstance load_instance(const std::string& path);

// Solve outcomes as JSON objects: objective, wardrop_gap, iterations,
// converged, the per-type flow profile, and per-resource loads keyed by
// resource id. The PoA variants nest the two solves beside eq_cost,
// opt_cost, and ratio.
std::string solve_report_json(const CongestionGame& game,
                              const SolveReport& report);
std::string poa_report_json(const CongestionGame& game,
                            const PoAReport& report);

// Network counterparts: the profile is reported per discovered path (its
// commodity, node sequence, and flow) with loads keyed by edge id.
std::string path_solution_json(const NetworkCongestionGame& network,
                               const PathSolution& solution);
std::string network_poa_json(const NetworkCongestionGame& network,
                             const NetworkPoAReport& report);

// Generator sidecar { "predicted_poa", "theta", "construction",
// "parameters" }. Non-finite theta is written as the string "inf" (JSON
// has no infinity literal).
std::string sidecar_json(const GeneratedInstance& instance);

}  // namespace routing
