#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

namespace awgrpon {

using LinkId = int;

enum class NodeKind : std::uint8_t { Cell, Olt, AwgrInputPort, AwgrOutputPort };

// A vertex of the fabric. Cells and OLTs use `index` only; AWGR ports carry
// the owning AWGR id in `index` and the port number in `port`.
struct NodeId {
  NodeKind kind = NodeKind::Cell;
  int index = 0;
  int port = 0;

  static constexpr NodeId cell(int i) { return {NodeKind::Cell, i, 0}; }
  static constexpr NodeId olt(int i) { return {NodeKind::Olt, i, 0}; }
  static constexpr NodeId awgr_in(int awgr, int port) { return {NodeKind::AwgrInputPort, awgr, port}; }
  static constexpr NodeId awgr_out(int awgr, int port) { return {NodeKind::AwgrOutputPort, awgr, port}; }

  constexpr bool is_group() const { return kind == NodeKind::Cell || kind == NodeKind::Olt; }
  constexpr bool is_awgr_port() const { return !is_group(); }

  friend constexpr auto operator<=>(const NodeId&, const NodeId&) = default;
};

// Descriptor strings: "cell:0", "olt:2", "awgr:1:in:3", "awgr:1:out:5".
std::string to_string(const NodeId& node);
NodeId parse_node(std::string_view text);

enum class RoutingMode { Cyclic, Explicit };

struct Awgr {
  int id = 0;
  int level = 1;
  int index_in_level = 0;
  int ports = 0;
  RoutingMode routing = RoutingMode::Cyclic;
  // Explicit mode: table[wavelength][input] = output; every row is a permutation.
  std::vector<std::vector<int>> table;

  // "L1_1" style label, 1-based index within the level.
  std::string name() const;
};

// Wavelength routing of a single AWGR. Cyclic: (input + wavelength) mod P.
int awgr_route(const Awgr& awgr, int input_port, int wavelength);

struct Link {
  LinkId id = 0;
  NodeId from;
  NodeId to;
};

struct TopologyParams {
  int cells = 4;
  int olts = 4;
  int awgrs_per_level = 4;
  int awgr_ports = 8;
  int wavelengths = 14;
  int uplinks_per_cell = 2;
  int downlinks_per_cell = 2;
  int olt_uplinks = 2;
  int olt_downlinks = 2;
  // Appended after the standard wiring, e.g. level-2 to level-2 hops.
  std::vector<std::pair<NodeId, NodeId>> extra_links;
};

// Immutable directed graph of the two-tier cascaded-AWGR fabric.
class Topology {
 public:
  static Topology build(const TopologyParams& params);
  static Topology from_json(const nlohmann::json& doc);

  nlohmann::json to_json() const;

  int cells() const noexcept { return cells_; }
  int olts() const noexcept { return olts_; }
  int wavelengths() const noexcept { return wavelengths_; }
  int awgrs_per_level() const noexcept { return awgrs_per_level_; }
  const std::vector<Awgr>& awgrs() const noexcept { return awgrs_; }
  const std::vector<Link>& links() const noexcept { return links_; }
  const Link& link(LinkId id) const;

  // Cells first, then OLTs.
  std::vector<NodeId> groups() const;
  int group_count() const noexcept { return cells_ + olts_; }
  // Dense index of a group in groups().
  int group_index(const NodeId& group) const;

  bool contains(const NodeId& node) const;
  const Awgr& awgr(int id) const;
  std::optional<int> awgr_by_name(std::string_view name) const;

  std::span<const LinkId> out_links(const NodeId& node) const;
  std::span<const LinkId> in_links(const NodeId& node) const;
  std::optional<LinkId> find_link(const NodeId& from, const NodeId& to) const;

  // Heads of links leaving `node`; for an AWGR input port, every output port
  // of the same AWGR.
  std::vector<NodeId> neighbors(const NodeId& node) const;

  // Routing with the topology-wide wavelength bound applied.
  int route(int awgr_id, int input_port, int wavelength) const;

 private:
  void add_link(const NodeId& from, const NodeId& to);
  void validate_node(const NodeId& node) const;

  int cells_ = 0;
  int olts_ = 0;
  int wavelengths_ = 0;
  int awgrs_per_level_ = 0;
  std::vector<Awgr> awgrs_;
  std::vector<Link> links_;
  std::map<NodeId, std::vector<LinkId>> out_;
  std::map<NodeId, std::vector<LinkId>> in_;
};

}  // namespace awgrpon
