#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "awgrpon/rwa_model.hpp"
#include "awgrpon/topology.hpp"

namespace awgrpon {

enum class ServerState { Idle, Communicating, ParkedOnOlt };
std::string_view to_string(ServerState s) noexcept;

struct Server {
  int id = 0;
  int cell = 0;
  ServerState state = ServerState::Idle;
  std::optional<int> tuned_wavelength;
  std::optional<int> parked_olt;
  std::optional<int> parking_wavelength;
  std::vector<int> grants;  // active grant ids, oldest first

  friend bool operator==(const Server&, const Server&) = default;
};

struct Grant {
  int id = 0;
  int server_a = 0;
  int server_b = 0;
  int wavelength = 0;
  std::size_t assignment = 0;  // index into the solution in force
  std::optional<int> olt_anchor;

  friend bool operator==(const Grant&, const Grant&) = default;
};

enum class DenialReason { IntraCell, Busy };
std::string_view to_string(DenialReason r) noexcept;

struct Denial {
  DenialReason reason = DenialReason::Busy;
  std::string message;
};

using RequestOutcome = std::variant<Grant, Denial>;

struct SdnConfig {
  int servers_per_cell = 64;
  // Accept a solution that does not verify cleanly.
  bool force = false;
  // Group each granted connection onto the least-loaded OLT.
  bool anchor_to_olt = false;
  VerifyMode mode = VerifyMode::FreePermutation;
};

struct TraceEvent {
  enum class Op { Request, Release };
  std::uint64_t t = 0;
  Op op = Op::Request;
  int a = -1;
  int b = -1;
  int grant_id = -1;
};

struct EventRecord {
  TraceEvent event;
  std::string outcome;
};

struct OltLoad {
  int olt = 0;
  int parked = 0;
  int anchored = 0;
  int total() const { return parked + anchored; }
};

struct LinkOccupancy {
  LinkId link = 0;
  std::vector<int> wavelengths;  // 0-based, ascending
  std::vector<int> grants;       // matching grant per wavelength
};

struct LoadReport {
  std::vector<OltLoad> olts;
  std::vector<LinkOccupancy> links;
  std::size_t active_grants = 0;
  std::size_t parked_servers = 0;
  std::size_t communicating_servers = 0;
};

// Single-writer controller: every mutation goes through request/release (or
// apply), and each is appended to the event log.
class SdnController {
 public:
  SdnController(Topology topology, RwaSolution solution, SdnConfig config);

  RequestOutcome request(int server_a, int server_b, std::uint64_t t = 0);
  void release(int grant_id, std::uint64_t t = 0);
  // Applies a trace event; operational errors are logged instead of thrown.
  std::string apply(const TraceEvent& event);

  LoadReport load_report() const;
  // Observable state: servers, active grants, OLT loads.
  nlohmann::json state_json() const;
  // state_json plus selection history and the event log.
  nlohmann::json snapshot() const;
  // Recomputes OLT loads and link occupancy from scratch; false on mismatch.
  bool check_invariants() const;

  const std::vector<Server>& servers() const { return servers_; }
  const std::map<int, Grant>& active_grants() const { return grants_; }
  const std::vector<EventRecord>& log() const { return log_; }
  const Topology& topology() const { return topology_; }
  const RwaSolution& solution() const { return solution_; }

  static SdnController replay(Topology topology, RwaSolution solution, SdnConfig config,
                              std::span<const TraceEvent> events);

 private:
  const Server& server(int id) const;
  int pick_anchor() const;

  Topology topology_;
  RwaSolution solution_;
  SdnConfig config_;
  std::vector<Server> servers_;
  std::map<int, Grant> grants_;
  std::vector<OltLoad> olt_loads_;
  std::vector<std::optional<int>> assignment_grant_;   // active grant per assignment
  std::vector<std::uint64_t> assignment_last_used_;    // 0 = never granted
  std::map<std::pair<LinkId, int>, int> link_busy_;    // (link, wavelength) -> grant
  std::uint64_t clock_ = 0;
  int next_grant_id_ = 1;
  std::vector<EventRecord> log_;
};

std::vector<TraceEvent> parse_trace(std::istream& in);
std::string trace_line(const TraceEvent& event);

nlohmann::json load_report_json(const Topology& topology, const LoadReport& report);
std::string load_report_csv(const Topology& topology, const LoadReport& report);

}  // namespace awgrpon
