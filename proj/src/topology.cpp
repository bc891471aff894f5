#include "awgrpon/topology.hpp"

#include <algorithm>
#include <charconv>
#include <set>

#include "awgrpon/error.hpp"

namespace awgrpon {

namespace {

const std::vector<LinkId> kNoLinks;

int parse_int(std::string_view text, std::string_view whole) {
  int value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || value < 0) {
    throw Error(ErrorCode::ParseError, "bad node descriptor '" + std::string(whole) + "'");
  }
  return value;
}

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    auto pos = text.find(sep, start);
    parts.push_back(text.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

std::string_view mode_name(RoutingMode mode) { return mode == RoutingMode::Cyclic ? "cyclic" : "explicit"; }

}  // namespace

std::string to_string(const NodeId& node) {
  switch (node.kind) {
    case NodeKind::Cell: return "cell:" + std::to_string(node.index);
    case NodeKind::Olt: return "olt:" + std::to_string(node.index);
    case NodeKind::AwgrInputPort:
      return "awgr:" + std::to_string(node.index) + ":in:" + std::to_string(node.port);
    case NodeKind::AwgrOutputPort:
      return "awgr:" + std::to_string(node.index) + ":out:" + std::to_string(node.port);
  }
  return "?";
}

NodeId parse_node(std::string_view text) {
  auto parts = split(text, ':');
  if (parts.size() == 2 && parts[0] == "cell") return NodeId::cell(parse_int(parts[1], text));
  if (parts.size() == 2 && parts[0] == "olt") return NodeId::olt(parse_int(parts[1], text));
  if (parts.size() == 4 && parts[0] == "awgr") {
    int awgr = parse_int(parts[1], text);
    int port = parse_int(parts[3], text);
    if (parts[2] == "in") return NodeId::awgr_in(awgr, port);
    if (parts[2] == "out") return NodeId::awgr_out(awgr, port);
  }
  throw Error(ErrorCode::ParseError, "bad node descriptor '" + std::string(text) + "'");
}

std::string Awgr::name() const {
  return "L" + std::to_string(level) + "_" + std::to_string(index_in_level + 1);
}

int awgr_route(const Awgr& awgr, int input_port, int wavelength) {
  if (input_port < 0 || input_port >= awgr.ports) {
    throw Error(ErrorCode::OutOfRange, "input port " + std::to_string(input_port) + " on " + awgr.name());
  }
  if (wavelength < 0) throw Error(ErrorCode::OutOfRange, "negative wavelength");
  if (awgr.routing == RoutingMode::Cyclic) return (input_port + wavelength) % awgr.ports;
  if (static_cast<std::size_t>(wavelength) >= awgr.table.size()) {
    throw Error(ErrorCode::OutOfRange, "wavelength " + std::to_string(wavelength) + " has no routing row on " +
                                           awgr.name());
  }
  return awgr.table[wavelength][input_port];
}

Topology Topology::build(const TopologyParams& p) {
  if (p.cells < 1 || p.olts < 1 || p.awgrs_per_level < 1 || p.awgr_ports < 1 || p.wavelengths < 1) {
    throw Error(ErrorCode::InvalidParameter, "cells, olts, awgrs_per_level, awgr_ports and wavelengths must be >= 1");
  }
  if (p.uplinks_per_cell < 1 || p.downlinks_per_cell < 1 || p.olt_uplinks < 1 || p.olt_downlinks < 1) {
    throw Error(ErrorCode::InvalidParameter, "link multiplicities must be >= 1");
  }

  Topology t;
  t.cells_ = p.cells;
  t.olts_ = p.olts;
  t.wavelengths_ = p.wavelengths;
  t.awgrs_per_level_ = p.awgrs_per_level;
  const int per_level = p.awgrs_per_level;
  for (int level = 1; level <= 2; ++level) {
    for (int i = 0; i < per_level; ++i) {
      Awgr a;
      a.id = static_cast<int>(t.awgrs_.size());
      a.level = level;
      a.index_in_level = i;
      a.ports = p.awgr_ports;
      t.awgrs_.push_back(std::move(a));
    }
  }

  // Attachments go to distinct AWGRs, so multiplicity saturates at the level size.
  const int cell_up = std::min(p.uplinks_per_cell, per_level);
  const int cell_down = std::min(p.downlinks_per_cell, per_level);
  const int olt_up = std::min(p.olt_uplinks, per_level);
  const int olt_down = std::min(p.olt_downlinks, per_level);

  std::vector<int> next_in(t.awgrs_.size(), 0);
  std::vector<int> next_out(t.awgrs_.size(), 0);
  auto take = [&](std::vector<int>& next, int awgr, const char* side) {
    if (next[awgr] >= p.awgr_ports) {
      throw Error(ErrorCode::PortExhaustion, t.awgrs_[awgr].name() + " has no free " + side + " port (" +
                                                 std::to_string(p.awgr_ports) + " ports)");
    }
    return next[awgr]++;
  };
  const int l1 = 0;
  const int l2 = per_level;

  for (int c = 0; c < p.cells; ++c) {
    for (int i = 0; i < cell_up; ++i) {
      int a = l1 + (c * cell_up + i) % per_level;
      t.add_link(NodeId::cell(c), NodeId::awgr_in(a, take(next_in, a, "input")));
    }
  }
  for (int c = 0; c < p.cells; ++c) {
    for (int i = 0; i < cell_down; ++i) {
      int a = l1 + (c * cell_down + i) % per_level;
      t.add_link(NodeId::awgr_out(a, take(next_out, a, "output")), NodeId::cell(c));
    }
  }
  for (int a = l1; a < l1 + per_level; ++a) {
    for (int b = l2; b < l2 + per_level; ++b) {
      t.add_link(NodeId::awgr_out(a, take(next_out, a, "output")), NodeId::awgr_in(b, take(next_in, b, "input")));
    }
  }
  for (int b = l2; b < l2 + per_level; ++b) {
    for (int a = l1; a < l1 + per_level; ++a) {
      t.add_link(NodeId::awgr_out(b, take(next_out, b, "output")), NodeId::awgr_in(a, take(next_in, a, "input")));
    }
  }
  for (int o = 0; o < p.olts; ++o) {
    for (int i = 0; i < olt_up; ++i) {
      int b = l2 + (o * olt_up + i) % per_level;
      t.add_link(NodeId::olt(o), NodeId::awgr_in(b, take(next_in, b, "input")));
    }
  }
  for (int o = 0; o < p.olts; ++o) {
    for (int i = 0; i < olt_down; ++i) {
      int b = l2 + (o * olt_down + i) % per_level;
      t.add_link(NodeId::awgr_out(b, take(next_out, b, "output")), NodeId::olt(o));
    }
  }
  for (const auto& [from, to] : p.extra_links) t.add_link(from, to);
  return t;
}

void Topology::validate_node(const NodeId& node) const {
  if (!contains(node)) throw Error(ErrorCode::UnknownNode, to_string(node));
}

bool Topology::contains(const NodeId& node) const {
  switch (node.kind) {
    case NodeKind::Cell: return node.index >= 0 && node.index < cells_;
    case NodeKind::Olt: return node.index >= 0 && node.index < olts_;
    case NodeKind::AwgrInputPort:
    case NodeKind::AwgrOutputPort:
      return node.index >= 0 && node.index < static_cast<int>(awgrs_.size()) && node.port >= 0 &&
             node.port < awgrs_[node.index].ports;
  }
  return false;
}

void Topology::add_link(const NodeId& from, const NodeId& to) {
  validate_node(from);
  validate_node(to);
  const std::string desc = to_string(from) + " -> " + to_string(to);
  if (from.kind == NodeKind::AwgrInputPort || to.kind == NodeKind::AwgrOutputPort) {
    throw Error(ErrorCode::InvalidParameter, "links leave output ports and enter input ports: " + desc);
  }
  if (from.is_group() && to.is_group()) {
    throw Error(ErrorCode::InvalidParameter, "groups connect only to AWGR ports: " + desc);
  }
  if (find_link(from, to)) throw Error(ErrorCode::InvalidParameter, "duplicate link " + desc);
  if (from.is_awgr_port() && !out_links(from).empty()) {
    throw Error(ErrorCode::PortExhaustion, to_string(from) + " already has an outgoing link");
  }
  if (to.is_awgr_port() && !in_links(to).empty()) {
    throw Error(ErrorCode::PortExhaustion, to_string(to) + " already has an incoming link");
  }
  Link l{static_cast<LinkId>(links_.size()), from, to};
  out_[from].push_back(l.id);
  in_[to].push_back(l.id);
  links_.push_back(l);
}

const Link& Topology::link(LinkId id) const {
  if (id < 0 || id >= static_cast<LinkId>(links_.size())) {
    throw Error(ErrorCode::TopologyMismatch, "unknown link id " + std::to_string(id));
  }
  return links_[id];
}

std::vector<NodeId> Topology::groups() const {
  std::vector<NodeId> g;
  g.reserve(group_count());
  for (int c = 0; c < cells_; ++c) g.push_back(NodeId::cell(c));
  for (int o = 0; o < olts_; ++o) g.push_back(NodeId::olt(o));
  return g;
}

int Topology::group_index(const NodeId& group) const {
  validate_node(group);
  if (group.kind == NodeKind::Cell) return group.index;
  if (group.kind == NodeKind::Olt) return cells_ + group.index;
  throw Error(ErrorCode::InvalidParameter, to_string(group) + " is not a group");
}

const Awgr& Topology::awgr(int id) const {
  if (id < 0 || id >= static_cast<int>(awgrs_.size())) {
    throw Error(ErrorCode::UnknownNode, "awgr " + std::to_string(id));
  }
  return awgrs_[id];
}

std::optional<int> Topology::awgr_by_name(std::string_view name) const {
  for (const auto& a : awgrs_) {
    if (a.name() == name) return a.id;
  }
  return std::nullopt;
}

std::span<const LinkId> Topology::out_links(const NodeId& node) const {
  auto it = out_.find(node);
  return it == out_.end() ? std::span<const LinkId>(kNoLinks) : std::span<const LinkId>(it->second);
}

std::span<const LinkId> Topology::in_links(const NodeId& node) const {
  auto it = in_.find(node);
  return it == in_.end() ? std::span<const LinkId>(kNoLinks) : std::span<const LinkId>(it->second);
}

std::optional<LinkId> Topology::find_link(const NodeId& from, const NodeId& to) const {
  for (LinkId id : out_links(from)) {
    if (links_[id].to == to) return id;
  }
  return std::nullopt;
}

std::vector<NodeId> Topology::neighbors(const NodeId& node) const {
  validate_node(node);
  std::vector<NodeId> result;
  if (node.kind == NodeKind::AwgrInputPort) {
    const Awgr& a = awgrs_[node.index];
    for (int p = 0; p < a.ports; ++p) result.push_back(NodeId::awgr_out(a.id, p));
    return result;
  }
  for (LinkId id : out_links(node)) result.push_back(links_[id].to);
  std::sort(result.begin(), result.end());
  return result;
}

int Topology::route(int awgr_id, int input_port, int wavelength) const {
  if (wavelength < 0 || wavelength >= wavelengths_) {
    throw Error(ErrorCode::OutOfRange, "wavelength " + std::to_string(wavelength) + " >= " +
                                           std::to_string(wavelengths_));
  }
  return awgr_route(awgr(awgr_id), input_port, wavelength);
}

nlohmann::json Topology::to_json() const {
  nlohmann::json doc;
  doc["format"] = "awgr-topology";
  doc["format_version"] = 1;
  doc["cells"] = cells_;
  doc["olts"] = olts_;
  doc["wavelengths"] = wavelengths_;
  doc["awgrs_per_level"] = awgrs_per_level_;
  auto& awgrs = doc["awgrs"] = nlohmann::json::array();
  for (const auto& a : awgrs_) {
    nlohmann::json j{{"id", a.id},
                     {"name", a.name()},
                     {"level", a.level},
                     {"index_in_level", a.index_in_level},
                     {"ports", a.ports},
                     {"routing_mode", mode_name(a.routing)}};
    if (a.routing == RoutingMode::Explicit) j["routing_table"] = a.table;
    awgrs.push_back(std::move(j));
  }
  auto& links = doc["links"] = nlohmann::json::array();
  for (const auto& l : links_) links.push_back({{"id", l.id}, {"from", to_string(l.from)}, {"to", to_string(l.to)}});
  return doc;
}

Topology Topology::from_json(const nlohmann::json& doc) {
  try {
    Topology t;
    t.cells_ = doc.at("cells").get<int>();
    t.olts_ = doc.at("olts").get<int>();
    t.wavelengths_ = doc.at("wavelengths").get<int>();
    if (t.cells_ < 0 || t.olts_ < 0 || t.wavelengths_ < 0) {
      throw Error(ErrorCode::InvalidParameter, "negative counts in topology document");
    }
    int per_level[3] = {0, 0, 0};
    for (const auto& ja : doc.at("awgrs")) {
      Awgr a;
      a.id = static_cast<int>(t.awgrs_.size());
      if (ja.contains("id") && ja["id"].get<int>() != a.id) {
        throw Error(ErrorCode::ParseError, "awgr ids must be dense and in order");
      }
      a.level = ja.at("level").get<int>();
      if (a.level != 1 && a.level != 2) throw Error(ErrorCode::ParseError, "awgr level must be 1 or 2");
      a.index_in_level = ja.contains("index_in_level") ? ja["index_in_level"].get<int>() : per_level[a.level];
      ++per_level[a.level];
      a.ports = ja.at("ports").get<int>();
      if (a.ports < 1) throw Error(ErrorCode::InvalidParameter, "awgr ports must be >= 1");
      auto mode = ja.value("routing_mode", std::string("cyclic"));
      if (mode == "cyclic") {
        a.routing = RoutingMode::Cyclic;
      } else if (mode == "explicit") {
        a.routing = RoutingMode::Explicit;
        a.table = ja.at("routing_table").get<std::vector<std::vector<int>>>();
        for (const auto& row : a.table) {
          std::vector<int> sorted = row;
          std::sort(sorted.begin(), sorted.end());
          bool perm = static_cast<int>(sorted.size()) == a.ports;
          for (int i = 0; perm && i < a.ports; ++i) perm = sorted[i] == i;
          if (!perm) throw Error(ErrorCode::InvalidParameter, a.name() + " routing row is not a permutation");
        }
      } else {
        throw Error(ErrorCode::ParseError, "unknown routing_mode '" + mode + "'");
      }
      t.awgrs_.push_back(std::move(a));
    }
    t.awgrs_per_level_ = doc.value("awgrs_per_level", per_level[1]);
    int expected_id = 0;
    for (const auto& jl : doc.at("links")) {
      if (jl.contains("id") && jl["id"].get<int>() != expected_id) {
        throw Error(ErrorCode::ParseError, "link ids must be dense and in order");
      }
      t.add_link(parse_node(jl.at("from").get<std::string>()), parse_node(jl.at("to").get<std::string>()));
      ++expected_id;
    }
    return t;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("topology document: ") + e.what());
  }
}

}  // namespace awgrpon
