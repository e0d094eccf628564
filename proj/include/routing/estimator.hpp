#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "routing/dijkstra.hpp"

namespace routing {

// Straight-line distance in meters under the equirectangular approximation
// (Earth radius 6371 km) — well under 0.1% error at city scale.
double geo_distance_m(double lat1, double lon1, double lat2, double lon2);

struct RoadNode {
  std::string id;
  double lat = 0.0;
  double lon = 0.0;
};

// One directed road segment with resolved endpoint indices.
struct RoadEdge {
  std::string id;
  int from = -1;
  int to = -1;
  double length_m = 0.0;
  double speed_mps = 0.0;
  std::string road_type;
  double free_flow_s() const { return length_m / speed_mps; }
};

// Edge row as it arrives from input, before node names are resolved. A
// non-positive speed means "look it up from the road type".
struct RoadEdgeSpec {
  std::string id;
  std::string from;
  std::string to;
  double length_m = 0.0;
  double speed_mps = 0.0;
  std::string road_type;
};

// Fallback free-flow speeds by road type, used when an edge row carries no
// speed: expressway 25 m/s, arterial 16.7 m/s, local 13.9 m/s.
const std::map<std::string, double>& default_road_speeds();

// Directed edges sharing the same endpoint pair, collapsed into one
// geometric segment for matching. `forward_edge` is the lowest-index edge
// and fixes the canonical direction node_a -> node_b; `reverse_edge` is the
// lowest-index opposite edge, or -1 on one-way segments.
struct SegmentGroup {
  int node_a = -1;
  int node_b = -1;
  int forward_edge = -1;
  int reverse_edge = -1;
};

// Immutable road network with geometry. Shortest-path queries use
// free-flow seconds as edge costs and break ties toward the
// lexicographically smallest node sequence.
class RoadGraph {
 public:
  // Throws std::invalid_argument on empty/duplicate ids, unknown endpoints,
  // self-loops, non-positive lengths, or a missing speed whose road type is
  // not in `road_speeds`.
  RoadGraph(std::vector<RoadNode> nodes, std::vector<RoadEdgeSpec> edges,
            const std::map<std::string, double>& road_speeds =
                default_road_speeds());

  // Loads `id,lat,lon` and `id,from,to,length_m,speed_mps,road_type` CSV
  // files. Throws io_error when a file cannot be opened and
  // std::invalid_argument on malformed content.
  static RoadGraph from_csv(const std::string& nodes_path,
                            const std::string& edges_path,
                            const std::map<std::string, double>& road_speeds =
                                default_road_speeds());

  int num_nodes() const { return static_cast<int>(nodes_.size()); }
  int num_edges() const { return static_cast<int>(edges_.size()); }
  const std::vector<RoadNode>& nodes() const { return nodes_; }
  const std::vector<RoadEdge>& edges() const { return edges_; }
  const std::vector<SegmentGroup>& segment_groups() const { return groups_; }

  // Index lookups return -1 when the name is unknown.
  int node_index(const std::string& id) const;
  int edge_index(const std::string& id) const;

  // Closest node to a coordinate; ties go to the smaller index.
  int nearest_node(double lat, double lon) const;

  // Free-flow shortest path between node indices (seconds).
  detail::PathResult shortest_ff_path(int from, int to) const;

 private:
  std::vector<RoadNode> nodes_;
  std::vector<RoadEdge> edges_;
  std::vector<SegmentGroup> groups_;
  std::unordered_map<std::string, int> node_index_;
  std::unordered_map<std::string, int> edge_index_;
  std::vector<std::vector<detail::Arc>> adjacency_;  // cost = seconds
};

struct TracePoint {
  double t = 0.0;  // seconds
  double lat = 0.0;
  double lon = 0.0;
};

// One trip's location samples, time-ordered, plus the snapped endpoint
// nodes the trip is judged against.
struct Trace {
  std::string trip_id;
  std::vector<TracePoint> points;
  std::string origin;       // snapped node id; empty = snap on demand
  std::string destination;
};

// Discontinuity between consecutive matched edges: the route jumps from
// target(edges[after_edge]) to source(edges[after_edge + 1]).
struct RouteGap {
  int after_edge = -1;
  double straight_m = 0.0;          // node-to-node straight-line length
  double elapsed_s = 0.0;           // between the bounding trace points
  double measured_speed_mps = 0.0;  // bounding points' speed; 0 if unusable
};

// Directed edge sequence recovered from a trace.
struct MatchedRoute {
  std::vector<int> edges;
  std::vector<RouteGap> gaps;
  double average_speed_mps = 0.0;  // whole-trace fallback speed
};

struct GapReport {
  int n_small = 0;
  int n_large = 0;
  double small_length_m = 0.0;
  double large_length_m = 0.0;
};

struct TripEstimate {
  std::string trip_id;
  double best_ff_s = 0.0;
  double data_ff_s = 0.0;
  double deviation = 0.0;
  double theta_hat = 0.0;
  GapReport gaps;
};

struct EstimateConfig {
  double snap_radius_m = 30.0;
  double small_gap_threshold_m = 300.0;
};

// Decile table (0%, 10%, ..., 100%, linearly interpolated) of theta_hat
// plus the fraction of trips strictly below each reference threshold.
struct DeviationSummary {
  int count = 0;
  std::array<double, 11> deciles{};
  std::array<std::pair<double, double>, 4> fraction_below{};  // (threshold, f)
};

// Free-flow travel time of the fastest route between two node ids, in
// seconds. Throws std::invalid_argument on unknown node ids or an
// unreachable destination.
double best_free_flow_time(const RoadGraph& graph, const std::string& origin,
                           const std::string& destination);

// Associates every trace point with the nearest segment within
// `snap_radius_m` (farther points are left out and surface as gaps), then
// assembles the directed edge sequence:
//  - near-ties (within 1e-6 m) stick with the previous point's segment so
//    samples on top of an intersection don't hop to a cross street;
//  - runs of the same segment collapse to one visit; an isolated
//    single-point visit is treated as lateral noise and dropped when its
//    removal leaves its neighbors sharing a node, or when its lone point
//    also lies within the snap radius of a neighbor's segment;
//  - each visit's direction minimizes endpoint mismatch with its
//    neighbors, score = dist(target(prev), source(e)) +
//    dist(target(e), source(next)); ties follow the travel direction the
//    visit's own timestamps imply (single-point visits default to the
//    canonical direction);
//  - consecutive visits whose endpoints do not meet become RouteGaps.
// Throws std::invalid_argument when no point matches any edge, on a
// non-positive snap radius, or on non-increasing timestamps.
MatchedRoute match_trace(const RoadGraph& graph, const Trace& trace,
                         double snap_radius_m = 30.0);

// Free-flow seconds for a matched route: the sum of its edges' free-flow
// times, plus per gap either straight-line length over the bounding
// points' measured speed (falling back to the trace average) when the gap
// is shorter than `small_gap_threshold_m`, or the free-flow shortest-path
// time across the gap otherwise (also the fallback when no usable speed
// exists). Throws std::invalid_argument on an empty route or on a
// large gap whose endpoints are disconnected.
std::pair<double, GapReport> data_free_flow_time(
    const RoadGraph& graph, const MatchedRoute& matched,
    double small_gap_threshold_m = 300.0);

// Full per-trip pipeline: match the trace, anchor the matched route to the
// trace's endpoint nodes (snapped to the nearest node from the first/last
// points when the trace does not carry them), price its free-flow time,
// and compare against the best free-flow time between those nodes.
// Anchoring trims leading/trailing matched edges while the trim strictly
// shortens the priced trip — a noisy endpoint sample that snaps onto a
// cross street adds an edge pointing away from the trip, which always
// prices above the direct connection — and any remaining offset between
// the route's ends and the endpoint nodes is priced as a free-flow
// connection and reported as a large gap. theta_hat = data_ff/best_ff - 1.
// Throws std::invalid_argument when the endpoints coincide.
TripEstimate estimate_trip(const RoadGraph& graph, const Trace& trace,
                           const EstimateConfig& config = {});

// Decile table and threshold fractions (thresholds 0.25, 0.5, 0.88, 1.0)
// of the estimates' theta_hat values. Throws std::invalid_argument on an
// empty list.
DeviationSummary deviation_distribution(
    const std::vector<TripEstimate>& estimates);

// Walks `route` (contiguous directed edge indices) at per-edge free-flow
// speed, sampling every `sample_interval_s` seconds plus the final arrival,
// then perturbs each point with isotropic Gaussian noise of `noise_std_m`
// meters and drops interior points independently with `drop_prob` (the
// first and last points always survive). Deterministic for a fixed seed.
Trace synth_trace(const RoadGraph& graph, const std::vector<int>& route,
                  double sample_interval_s, double noise_std_m,
                  double drop_prob, std::uint64_t seed);

// Reads a `trip_id,timestamp,lat,lon` CSV into per-trip traces (trips in
// first-appearance order, points sorted by timestamp) and snaps each
// trace's endpoints to the nearest nodes. Throws io_error when the file
// cannot be opened, std::invalid_argument on malformed rows or duplicate
// timestamps within a trip.
std::vector<Trace> read_traces_csv(const std::string& path,
                                   const RoadGraph& graph);

// Writes `trip_id,best_ff_s,data_ff_s,deviation,theta_hat,n_small_gaps,
// n_large_gaps` rows (times and ratios with six decimals).
void write_estimates_csv(std::ostream& out,
                         const std::vector<TripEstimate>& estimates);
void write_estimates_csv(const std::string& path,
                         const std::vector<TripEstimate>& estimates);

}  // namespace routing
