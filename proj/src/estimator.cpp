#include "routing/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <stdexcept>
#include <utility>

#include "routing/errors.hpp"

namespace routing {
namespace {

constexpr double kEarthRadiusM = 6371000.0;
constexpr double kDegToRad = 3.14159265358979323846 / 180.0;
constexpr double kMetersPerDegLat = kEarthRadiusM * kDegToRad;
constexpr double kSnapTieM = 1e-6;

[[noreturn]] void fail(const std::string& message) {
  throw std::invalid_argument("estimator: " + message);
}

// Planar frame for one trace: meters east/north of a reference latitude.
struct LocalFrame {
  double meters_per_deg_lon;
  double x(double lon) const { return lon * meters_per_deg_lon; }
  double y(double lat) const { return lat * kMetersPerDegLat; }
};

LocalFrame frame_at(double lat_ref) {
  return LocalFrame{kMetersPerDegLat * std::cos(lat_ref * kDegToRad)};
}

struct Projection {
  double dist_m = 0.0;
  double t = 0.0;  // clamped position along the canonical direction
};

Projection project_to_segment(double px, double py, double ax, double ay,
                              double bx, double by) {
  const double dx = bx - ax, dy = by - ay;
  const double len2 = dx * dx + dy * dy;
  double t = 0.0;
  if (len2 > 0.0) {
    t = ((px - ax) * dx + (py - ay) * dy) / len2;
    t = std::clamp(t, 0.0, 1.0);
  }
  const double qx = ax + t * dx, qy = ay + t * dy;
  return Projection{std::hypot(px - qx, py - qy), t};
}

// ---------------------------------------------------------------------------
// CSV plumbing

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream stream(line);
  while (std::getline(stream, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

double parse_number(const std::string& text, const std::string& context) {
  try {
    std::size_t used = 0;
    const double value = std::stod(text, &used);
    if (used != text.size()) fail(context + ": trailing text in '" + text + "'");
    return value;
  } catch (const std::invalid_argument&) {
    fail(context + ": '" + text + "' is not a number");
  } catch (const std::out_of_range&) {
    fail(context + ": '" + text + "' is out of range");
  }
}

std::ifstream open_or_throw(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error("estimator: cannot open '" + path + "'");
  return in;
}

void expect_header(std::istream& in, const std::string& expected,
                   const std::string& path) {
  std::string line;
  if (!std::getline(in, line)) fail(path + ": missing header");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != expected) {
    fail(path + ": expected header '" + expected + "', got '" + line + "'");
  }
}

// ---------------------------------------------------------------------------
// Matching internals

struct Visit {
  int group = -1;
  int first_point = -1;
  int last_point = -1;
  int count = 0;
};

bool groups_share_node(const SegmentGroup& a, const SegmentGroup& b) {
  return a.node_a == b.node_a || a.node_a == b.node_b ||
         a.node_b == b.node_a || a.node_b == b.node_b;
}

}  // namespace

double geo_distance_m(double lat1, double lon1, double lat2, double lon2) {
  const double mean_lat = 0.5 * (lat1 + lat2) * kDegToRad;
  const double x = (lon2 - lon1) * std::cos(mean_lat);
  const double y = lat2 - lat1;
  return kEarthRadiusM * kDegToRad * std::hypot(x, y);
}

const std::map<std::string, double>& default_road_speeds() {
  static const std::map<std::string, double> speeds{
      {"expressway", 25.0}, {"arterial", 16.7}, {"local", 13.9}};
  return speeds;
}

RoadGraph::RoadGraph(std::vector<RoadNode> nodes,
                     std::vector<RoadEdgeSpec> edges,
                     const std::map<std::string, double>& road_speeds)
    : nodes_(std::move(nodes)) {
  if (nodes_.empty()) fail("graph needs at least one node");
  for (int i = 0; i < static_cast<int>(nodes_.size()); ++i) {
    if (nodes_[i].id.empty()) fail("node ids must be non-empty");
    if (!node_index_.emplace(nodes_[i].id, i).second) {
      fail("duplicate node id '" + nodes_[i].id + "'");
    }
  }
  edges_.reserve(edges.size());
  adjacency_.assign(nodes_.size(), {});
  std::map<std::pair<int, int>, int> group_of;
  for (const RoadEdgeSpec& spec : edges) {
    if (spec.id.empty()) fail("edge ids must be non-empty");
    if (edge_index_.count(spec.id)) fail("duplicate edge id '" + spec.id + "'");
    const auto from = node_index_.find(spec.from);
    const auto to = node_index_.find(spec.to);
    if (from == node_index_.end() || to == node_index_.end()) {
      fail("edge '" + spec.id + "' references an unknown node");
    }
    if (from->second == to->second) {
      fail("edge '" + spec.id + "' is a self-loop");
    }
    if (!(spec.length_m > 0.0) || !std::isfinite(spec.length_m)) {
      fail("edge '" + spec.id + "' needs a positive length");
    }
    double speed = spec.speed_mps;
    if (!(speed > 0.0)) {
      const auto fallback = road_speeds.find(spec.road_type);
      if (fallback == road_speeds.end()) {
        fail("edge '" + spec.id + "' has no speed and unknown road type '" +
             spec.road_type + "'");
      }
      speed = fallback->second;
    }
    if (!std::isfinite(speed)) {
      fail("edge '" + spec.id + "' needs a finite speed");
    }
    const int index = static_cast<int>(edges_.size());
    edge_index_.emplace(spec.id, index);
    edges_.push_back(RoadEdge{spec.id, from->second, to->second, spec.length_m,
                              speed, spec.road_type});
    adjacency_[from->second].push_back(
        detail::Arc{to->second, index, edges_.back().free_flow_s()});

    const std::pair<int, int> key{std::min(from->second, to->second),
                                  std::max(from->second, to->second)};
    const auto [slot, inserted] =
        group_of.emplace(key, static_cast<int>(groups_.size()));
    if (inserted) {
      groups_.push_back(SegmentGroup{from->second, to->second, index, -1});
    } else {
      SegmentGroup& group = groups_[slot->second];
      if (group.node_a != from->second && group.reverse_edge < 0) {
        group.reverse_edge = index;
      }
    }
  }
}

int RoadGraph::node_index(const std::string& id) const {
  const auto it = node_index_.find(id);
  return it == node_index_.end() ? -1 : it->second;
}

int RoadGraph::edge_index(const std::string& id) const {
  const auto it = edge_index_.find(id);
  return it == edge_index_.end() ? -1 : it->second;
}

int RoadGraph::nearest_node(double lat, double lon) const {
  int best = 0;
  double best_dist = geo_distance_m(lat, lon, nodes_[0].lat, nodes_[0].lon);
  for (int i = 1; i < num_nodes(); ++i) {
    const double dist = geo_distance_m(lat, lon, nodes_[i].lat, nodes_[i].lon);
    if (dist < best_dist) {
      best = i;
      best_dist = dist;
    }
  }
  return best;
}

detail::PathResult RoadGraph::shortest_ff_path(int from, int to) const {
  std::vector<std::string> keys;
  keys.reserve(nodes_.size());
  for (const RoadNode& node : nodes_) keys.push_back(node.id);
  return detail::lex_dijkstra(adjacency_, keys, from, to);
}

RoadGraph RoadGraph::from_csv(const std::string& nodes_path,
                              const std::string& edges_path,
                              const std::map<std::string, double>& road_speeds) {
  std::ifstream nodes_in = open_or_throw(nodes_path);
  expect_header(nodes_in, "id,lat,lon", nodes_path);
  std::vector<RoadNode> nodes;
  std::string line;
  int row = 1;
  while (std::getline(nodes_in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    const std::string context = nodes_path + " row " + std::to_string(row);
    if (fields.size() != 3) fail(context + ": expected 3 fields");
    nodes.push_back(RoadNode{fields[0], parse_number(fields[1], context),
                             parse_number(fields[2], context)});
  }

  std::ifstream edges_in = open_or_throw(edges_path);
  expect_header(edges_in, "id,from,to,length_m,speed_mps,road_type",
                edges_path);
  std::vector<RoadEdgeSpec> edges;
  row = 1;
  while (std::getline(edges_in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    const std::string context = edges_path + " row " + std::to_string(row);
    if (fields.size() != 6) fail(context + ": expected 6 fields");
    const double speed =
        fields[4].empty() ? 0.0 : parse_number(fields[4], context);
    edges.push_back(RoadEdgeSpec{fields[0], fields[1], fields[2],
                                 parse_number(fields[3], context), speed,
                                 fields[5]});
  }
  return RoadGraph(std::move(nodes), std::move(edges), road_speeds);
}

double best_free_flow_time(const RoadGraph& graph, const std::string& origin,
                           const std::string& destination) {
  const int from = graph.node_index(origin);
  const int to = graph.node_index(destination);
  if (from < 0) fail("unknown origin node '" + origin + "'");
  if (to < 0) fail("unknown destination node '" + destination + "'");
  const detail::PathResult path = graph.shortest_ff_path(from, to);
  if (!path.reachable) {
    fail("no route from '" + origin + "' to '" + destination + "'");
  }
  return path.distance;
}

MatchedRoute match_trace(const RoadGraph& graph, const Trace& trace,
                         double snap_radius_m) {
  if (!(snap_radius_m > 0.0)) fail("snap radius must be positive");
  const int n = static_cast<int>(trace.points.size());
  for (int i = 1; i < n; ++i) {
    if (!(trace.points[i].t > trace.points[i - 1].t)) {
      fail("trace '" + trace.trip_id + "' has non-increasing timestamps");
    }
  }
  if (n == 0) fail("trace '" + trace.trip_id + "' is empty");

  const LocalFrame frame = frame_at(trace.points.front().lat);
  const auto& groups = graph.segment_groups();
  std::vector<double> node_x(graph.num_nodes()), node_y(graph.num_nodes());
  for (int v = 0; v < graph.num_nodes(); ++v) {
    node_x[v] = frame.x(graph.nodes()[v].lon);
    node_y[v] = frame.y(graph.nodes()[v].lat);
  }

  // Nearest segment per point, keeping every group within the tie window.
  std::vector<std::vector<int>> candidates(n);
  std::vector<int> chosen(n, -1);
  std::vector<bool> tied(n, false);
  int previous = -1;
  for (int i = 0; i < n; ++i) {
    const double px = frame.x(trace.points[i].lon);
    const double py = frame.y(trace.points[i].lat);
    double best = snap_radius_m;
    std::vector<double> dist(groups.size());
    for (std::size_t g = 0; g < groups.size(); ++g) {
      dist[g] = project_to_segment(px, py, node_x[groups[g].node_a],
                                   node_y[groups[g].node_a],
                                   node_x[groups[g].node_b],
                                   node_y[groups[g].node_b])
                    .dist_m;
      best = std::min(best, dist[g]);
    }
    if (best >= snap_radius_m) continue;  // unmatched point
    for (std::size_t g = 0; g < groups.size(); ++g) {
      if (dist[g] <= best + kSnapTieM) {
        candidates[i].push_back(static_cast<int>(g));
      }
    }
    const auto& set = candidates[i];
    if (previous >= 0 &&
        std::find(set.begin(), set.end(), previous) != set.end()) {
      chosen[i] = previous;
    } else {
      chosen[i] = *std::min_element(
          set.begin(), set.end(), [&](int a, int b) {
            return groups[a].forward_edge < groups[b].forward_edge;
          });
      tied[i] = set.size() > 1;
    }
    previous = chosen[i];
  }
  // Let an initial run of exact ties adopt the first firm decision after it
  // (covers a first sample sitting exactly on an intersection).
  for (int i = n - 2; i >= 0; --i) {
    if (chosen[i] < 0 || chosen[i + 1] < 0 || !tied[i]) continue;
    const auto& set = candidates[i];
    if (std::find(set.begin(), set.end(), chosen[i + 1]) != set.end()) {
      chosen[i] = chosen[i + 1];
      tied[i] = false;
    }
  }

  // Collapse matched points into segment visits (unmatched points are
  // transparent: they only stretch whatever gap they sit inside).
  std::vector<Visit> visits;
  for (int i = 0; i < n; ++i) {
    if (chosen[i] < 0) continue;
    if (!visits.empty() && visits.back().group == chosen[i]) {
      visits.back().last_point = i;
      visits.back().count += 1;
    } else {
      visits.push_back(Visit{chosen[i], i, i, 1});
    }
  }
  if (visits.empty()) {
    fail("trace '" + trace.trip_id +
         "' has no point within the snap radius of any edge");
  }

  // Drop isolated single-point visits that look like lateral-noise blips
  // onto cross streets: interior ones whose removal leaves the neighbors
  // able to meet at a node — or whose lone point also lies within the snap
  // radius of a neighbor's segment, so the sample is just as plausibly
  // noise off a street the trace demonstrably used — and boundary ones
  // hanging off a firm (multi-point) neighbor they already touch.
  // Re-collapse until stable.
  const auto point_near_group = [&](int point, int g) {
    const double px = frame.x(trace.points[point].lon);
    const double py = frame.y(trace.points[point].lat);
    return project_to_segment(px, py, node_x[groups[g].node_a],
                              node_y[groups[g].node_a],
                              node_x[groups[g].node_b],
                              node_y[groups[g].node_b])
               .dist_m < snap_radius_m;
  };
  bool changed = true;
  while (changed && visits.size() > 1) {
    changed = false;
    std::vector<Visit> kept;
    kept.reserve(visits.size());
    for (std::size_t j = 0; j < visits.size(); ++j) {
      if (visits[j].count == 1) {
        const Visit* prev = kept.empty() ? nullptr : &kept.back();
        const Visit* next = j + 1 < visits.size() ? &visits[j + 1] : nullptr;
        bool bridged = false;
        if (prev && next) {
          bridged = groups_share_node(groups[prev->group],
                                      groups[next->group]) ||
                    point_near_group(visits[j].first_point, prev->group) ||
                    point_near_group(visits[j].first_point, next->group);
        } else if (next && next->count >= 2) {
          bridged = groups_share_node(groups[visits[j].group],
                                      groups[next->group]);
        } else if (prev && !next && prev->count >= 2) {
          bridged = groups_share_node(groups[visits[j].group],
                                      groups[prev->group]);
        }
        if (bridged) {
          changed = true;
          continue;
        }
      }
      if (!kept.empty() && kept.back().group == visits[j].group) {
        kept.back().last_point = visits[j].last_point;
        kept.back().count += visits[j].count;
      } else {
        kept.push_back(visits[j]);
      }
    }
    visits = std::move(kept);
  }

  // Direction pass 1: the travel direction implied by each visit's own
  // samples (projection parameter along the canonical direction).
  const int v_count = static_cast<int>(visits.size());
  std::vector<bool> forward(v_count, true);
  for (int j = 0; j < v_count; ++j) {
    const SegmentGroup& group = groups[visits[j].group];
    const auto param = [&](int point) {
      return project_to_segment(frame.x(trace.points[point].lon),
                                frame.y(trace.points[point].lat),
                                node_x[group.node_a], node_y[group.node_a],
                                node_x[group.node_b], node_y[group.node_b])
          .t;
    };
    const double delta =
        param(visits[j].last_point) - param(visits[j].first_point);
    forward[j] = delta >= 0.0;
  }
  const std::vector<bool> timestamp_direction = forward;

  // Direction pass 2: minimize endpoint mismatch against the neighbors,
  // sweeping once left to right; ties keep the timestamp direction.
  const auto node_dist = [&](int a, int b) {
    return std::hypot(node_x[a] - node_x[b], node_y[a] - node_y[b]);
  };
  for (int j = 0; j < v_count; ++j) {
    const SegmentGroup& group = groups[visits[j].group];
    if (group.reverse_edge < 0) {
      forward[j] = true;
      continue;
    }
    double score[2] = {0.0, 0.0};  // [0]=forward, [1]=reverse
    for (int o = 0; o < 2; ++o) {
      const int source = o == 0 ? group.node_a : group.node_b;
      const int target = o == 0 ? group.node_b : group.node_a;
      if (j > 0) {
        const SegmentGroup& prev = groups[visits[j - 1].group];
        const int prev_target = forward[j - 1] ? prev.node_b : prev.node_a;
        score[o] += node_dist(prev_target, source);
      }
      if (j + 1 < v_count) {
        const SegmentGroup& next = groups[visits[j + 1].group];
        const int next_source = forward[j + 1] ? next.node_a : next.node_b;
        score[o] += node_dist(target, next_source);
      }
    }
    if (score[0] < score[1]) {
      forward[j] = true;
    } else if (score[1] < score[0]) {
      forward[j] = false;
    } else {
      forward[j] = timestamp_direction[j];
    }
  }

  // Assemble directed edges and the gaps between them.
  MatchedRoute route;
  route.edges.reserve(v_count);
  std::vector<int> visit_of_edge;
  for (int j = 0; j < v_count; ++j) {
    const SegmentGroup& group = groups[visits[j].group];
    const int edge = forward[j] ? group.forward_edge : group.reverse_edge;
    if (!route.edges.empty() && route.edges.back() == edge) {
      visit_of_edge.back() = j;  // merged; extend to the later visit
      continue;
    }
    route.edges.push_back(edge);
    visit_of_edge.push_back(j);
  }
  for (std::size_t e = 0; e + 1 < route.edges.size(); ++e) {
    const RoadEdge& a = graph.edges()[route.edges[e]];
    const RoadEdge& b = graph.edges()[route.edges[e + 1]];
    if (a.to == b.from) continue;
    const TracePoint& pa = trace.points[visits[visit_of_edge[e]].last_point];
    const TracePoint& pb =
        trace.points[visits[visit_of_edge[e + 1]].first_point];
    RouteGap gap;
    gap.after_edge = static_cast<int>(e);
    gap.straight_m = geo_distance_m(graph.nodes()[a.to].lat,
                                    graph.nodes()[a.to].lon,
                                    graph.nodes()[b.from].lat,
                                    graph.nodes()[b.from].lon);
    gap.elapsed_s = pb.t - pa.t;
    if (gap.elapsed_s > 0.0) {
      gap.measured_speed_mps =
          geo_distance_m(pa.lat, pa.lon, pb.lat, pb.lon) / gap.elapsed_s;
    }
    route.gaps.push_back(gap);
  }

  double path_m = 0.0;
  for (int i = 1; i < n; ++i) {
    path_m += geo_distance_m(trace.points[i - 1].lat, trace.points[i - 1].lon,
                             trace.points[i].lat, trace.points[i].lon);
  }
  const double duration = trace.points.back().t - trace.points.front().t;
  route.average_speed_mps = duration > 0.0 ? path_m / duration : 0.0;
  return route;
}

std::pair<double, GapReport> data_free_flow_time(const RoadGraph& graph,
                                                 const MatchedRoute& matched,
                                                 double small_gap_threshold_m) {
  if (matched.edges.empty()) fail("matched route is empty");
  double total = 0.0;
  for (int edge : matched.edges) total += graph.edges()[edge].free_flow_s();

  GapReport report;
  for (const RouteGap& gap : matched.gaps) {
    double speed = gap.measured_speed_mps;
    if (!(speed > 1e-6)) speed = matched.average_speed_mps;
    if (gap.straight_m < small_gap_threshold_m && speed > 1e-6) {
      total += gap.straight_m / speed;
      report.n_small += 1;
      report.small_length_m += gap.straight_m;
      continue;
    }
    // Large gap (or no usable speed): cross at free flow.
    const int from = graph.edges()[matched.edges[gap.after_edge]].to;
    const int to = graph.edges()[matched.edges[gap.after_edge + 1]].from;
    const detail::PathResult path = graph.shortest_ff_path(from, to);
    if (!path.reachable) {
      fail("gap endpoints '" + graph.nodes()[from].id + "' and '" +
           graph.nodes()[to].id + "' are disconnected");
    }
    total += path.distance;
    report.n_large += 1;
    report.large_length_m += gap.straight_m;
  }
  return {total, report};
}

TripEstimate estimate_trip(const RoadGraph& graph, const Trace& trace,
                           const EstimateConfig& config) {
  const MatchedRoute matched =
      match_trace(graph, trace, config.snap_radius_m);

  std::string origin = trace.origin;
  std::string destination = trace.destination;
  if (origin.empty()) {
    origin = graph.nodes()[graph.nearest_node(trace.points.front().lat,
                                              trace.points.front().lon)]
                 .id;
  }
  if (destination.empty()) {
    destination = graph.nodes()[graph.nearest_node(trace.points.back().lat,
                                                   trace.points.back().lon)]
                      .id;
  }
  if (origin == destination) {
    fail("trip '" + trace.trip_id + "' starts and ends at node '" + origin +
         "'");
  }
  const int origin_node = graph.node_index(origin);
  const int dest_node = graph.node_index(destination);

  // Free-flow seconds to reach node b from node a off the matched route.
  const auto connect_s = [&](int a, int b) {
    if (a == b) return 0.0;
    const detail::PathResult path = graph.shortest_ff_path(a, b);
    if (!path.reachable) {
      fail("endpoint '" + graph.nodes()[a].id + "' cannot reach '" +
           graph.nodes()[b].id + "'");
    }
    return path.distance;
  };

  // The sub-route keeping edges [lo, hi), with the gaps re-indexed; a gap
  // that no longer sits between two kept edges disappears.
  const auto window = [&](int lo, int hi) {
    MatchedRoute part;
    part.average_speed_mps = matched.average_speed_mps;
    part.edges.assign(matched.edges.begin() + lo, matched.edges.begin() + hi);
    for (const RouteGap& gap : matched.gaps) {
      if (gap.after_edge < lo || gap.after_edge + 1 >= hi) continue;
      RouteGap shifted = gap;
      shifted.after_edge -= lo;
      part.gaps.push_back(shifted);
    }
    return part;
  };
  // Priced origin-to-destination time when only [lo, hi) is kept: the
  // window's own free-flow time plus the connections from the origin node
  // to the window's first edge and from its last edge to the destination.
  const auto window_cost = [&](int lo, int hi) {
    return data_free_flow_time(graph, window(lo, hi),
                               config.small_gap_threshold_m)
               .first +
           connect_s(origin_node, graph.edges()[matched.edges[lo]].from) +
           connect_s(graph.edges()[matched.edges[hi - 1]].to, dest_node);
  };

  // Anchor the route to the endpoint nodes: trim leading/trailing edges
  // while doing so strictly shortens the priced trip. A point that blips
  // onto a cross street next to an endpoint adds an edge pointing away
  // from the trip, and pricing that edge plus the detour back always
  // exceeds the direct connection; trimming a genuinely traveled edge can
  // at best break even (the connection still has to cover the same
  // ground), so honest routes stop the loop immediately.
  constexpr double kTrimEps = 1e-9;
  int lo = 0;
  int hi = static_cast<int>(matched.edges.size());
  while (hi - lo > 1 &&
         window_cost(lo + 1, hi) + kTrimEps < window_cost(lo, hi)) {
    ++lo;
  }
  while (hi - lo > 1 &&
         window_cost(lo, hi - 1) + kTrimEps < window_cost(lo, hi)) {
    --hi;
  }

  const MatchedRoute anchored = window(lo, hi);
  auto [data_ff, report] =
      data_free_flow_time(graph, anchored, config.small_gap_threshold_m);
  const int ends[2][2] = {
      {origin_node, graph.edges()[anchored.edges.front()].from},
      {graph.edges()[anchored.edges.back()].to, dest_node}};
  for (const auto& [a, b] : ends) {
    if (a == b) continue;
    data_ff += connect_s(a, b);
    report.n_large += 1;
    report.large_length_m +=
        geo_distance_m(graph.nodes()[a].lat, graph.nodes()[a].lon,
                       graph.nodes()[b].lat, graph.nodes()[b].lon);
  }

  TripEstimate estimate;
  estimate.trip_id = trace.trip_id;
  estimate.best_ff_s = best_free_flow_time(graph, origin, destination);
  estimate.data_ff_s = data_ff;
  estimate.deviation = data_ff / estimate.best_ff_s;
  estimate.theta_hat = estimate.deviation - 1.0;
  estimate.gaps = report;
  return estimate;
}

DeviationSummary deviation_distribution(
    const std::vector<TripEstimate>& estimates) {
  if (estimates.empty()) fail("deviation summary needs at least one trip");
  std::vector<double> thetas;
  thetas.reserve(estimates.size());
  for (const TripEstimate& estimate : estimates) {
    thetas.push_back(estimate.theta_hat);
  }
  std::sort(thetas.begin(), thetas.end());

  DeviationSummary summary;
  summary.count = static_cast<int>(thetas.size());
  const int last = summary.count - 1;
  for (int d = 0; d <= 10; ++d) {
    const double position = last * (d / 10.0);
    const int lo = static_cast<int>(position);
    const int hi = std::min(lo + 1, last);
    const double fraction = position - lo;
    summary.deciles[d] = thetas[lo] * (1.0 - fraction) + thetas[hi] * fraction;
  }
  const std::array<double, 4> thresholds{0.25, 0.5, 0.88, 1.0};
  for (std::size_t i = 0; i < thresholds.size(); ++i) {
    const auto below = std::lower_bound(thetas.begin(), thetas.end(),
                                        thresholds[i]) -
                       thetas.begin();
    summary.fraction_below[i] = {thresholds[i],
                                 static_cast<double>(below) / summary.count};
  }
  return summary;
}

Trace synth_trace(const RoadGraph& graph, const std::vector<int>& route,
                  double sample_interval_s, double noise_std_m,
                  double drop_prob, std::uint64_t seed) {
  if (route.empty()) fail("synthetic route is empty");
  if (!(sample_interval_s > 0.0)) fail("sample interval must be positive");
  if (!(noise_std_m >= 0.0)) fail("noise must be nonnegative");
  if (!(drop_prob >= 0.0) || drop_prob > 1.0) {
    fail("drop probability must lie in [0, 1]");
  }
  for (std::size_t i = 0; i < route.size(); ++i) {
    if (route[i] < 0 || route[i] >= graph.num_edges()) {
      fail("route references an unknown edge index");
    }
    if (i > 0 &&
        graph.edges()[route[i - 1]].to != graph.edges()[route[i]].from) {
      fail("route edges are not contiguous");
    }
  }

  // Edge entry times under free flow.
  std::vector<double> starts(route.size() + 1, 0.0);
  for (std::size_t i = 0; i < route.size(); ++i) {
    starts[i + 1] = starts[i] + graph.edges()[route[i]].free_flow_s();
  }
  const double total = starts.back();
  const auto locate = [&](double t) {
    std::size_t i =
        std::upper_bound(starts.begin(), starts.end(), t) - starts.begin();
    i = std::min(std::max<std::size_t>(i, 1), route.size()) - 1;
    const RoadEdge& edge = graph.edges()[route[i]];
    const double u =
        std::clamp((t - starts[i]) / edge.free_flow_s(), 0.0, 1.0);
    const RoadNode& a = graph.nodes()[edge.from];
    const RoadNode& b = graph.nodes()[edge.to];
    return std::pair<double, double>{a.lat + u * (b.lat - a.lat),
                                     a.lon + u * (b.lon - a.lon)};
  };

  std::vector<double> sample_times;
  for (double t = 0.0; t < total; t += sample_interval_s) {
    sample_times.push_back(t);
  }
  if (sample_times.empty() || total - sample_times.back() > 1e-9) {
    sample_times.push_back(total);
  }

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, std::max(noise_std_m, 1e-300));
  std::bernoulli_distribution drop(drop_prob);
  const LocalFrame frame = frame_at(graph.nodes()[graph.edges()[route[0]].from].lat);

  Trace trace;
  trace.trip_id = "synthetic";
  trace.origin = graph.nodes()[graph.edges()[route.front()].from].id;
  trace.destination = graph.nodes()[graph.edges()[route.back()].to].id;
  const int count = static_cast<int>(sample_times.size());
  for (int i = 0; i < count; ++i) {
    auto [lat, lon] = locate(sample_times[i]);
    if (noise_std_m > 0.0) {
      lat += noise(rng) / kMetersPerDegLat;
      lon += noise(rng) / frame.meters_per_deg_lon;
    }
    const bool interior = i > 0 && i + 1 < count;
    if (interior && drop_prob > 0.0 && drop(rng)) continue;
    trace.points.push_back(TracePoint{sample_times[i], lat, lon});
  }
  return trace;
}

std::vector<Trace> read_traces_csv(const std::string& path,
                                   const RoadGraph& graph) {
  std::ifstream in = open_or_throw(path);
  expect_header(in, "trip_id,timestamp,lat,lon", path);
  std::vector<Trace> traces;
  std::map<std::string, std::size_t> slot;
  std::string line;
  int row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    const std::string context = path + " row " + std::to_string(row);
    if (fields.size() != 4) fail(context + ": expected 4 fields");
    const auto [it, inserted] = slot.emplace(fields[0], traces.size());
    if (inserted) {
      traces.emplace_back();
      traces.back().trip_id = fields[0];
    }
    traces[it->second].points.push_back(
        TracePoint{parse_number(fields[1], context),
                   parse_number(fields[2], context),
                   parse_number(fields[3], context)});
  }
  for (Trace& trace : traces) {
    std::stable_sort(
        trace.points.begin(), trace.points.end(),
        [](const TracePoint& a, const TracePoint& b) { return a.t < b.t; });
    for (std::size_t i = 1; i < trace.points.size(); ++i) {
      if (!(trace.points[i].t > trace.points[i - 1].t)) {
        fail("trip '" + trace.trip_id + "' has duplicate timestamps");
      }
    }
    trace.origin = graph.nodes()[graph.nearest_node(trace.points.front().lat,
                                                    trace.points.front().lon)]
                       .id;
    trace.destination =
        graph.nodes()[graph.nearest_node(trace.points.back().lat,
                                         trace.points.back().lon)]
            .id;
  }
  return traces;
}

void write_estimates_csv(std::ostream& out,
                         const std::vector<TripEstimate>& estimates) {
  out << "trip_id,best_ff_s,data_ff_s,deviation,theta_hat,n_small_gaps,"
         "n_large_gaps\n";
  char buffer[160];
  for (const TripEstimate& e : estimates) {
    std::snprintf(buffer, sizeof(buffer), "%.6f,%.6f,%.6f,%.6f,%d,%d",
                  e.best_ff_s, e.data_ff_s, e.deviation, e.theta_hat,
                  e.gaps.n_small, e.gaps.n_large);
    out << e.trip_id << ',' << buffer << '\n';
  }
}

void write_estimates_csv(const std::string& path,
                         const std::vector<TripEstimate>& estimates) {
  std::ofstream out(path);
  if (!out) throw io_error("estimator: cannot write '" + path + "'");
  write_estimates_csv(out, estimates);
}

}  // namespace routing
