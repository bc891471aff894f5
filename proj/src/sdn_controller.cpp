#include "awgrpon/sdn_controller.hpp"

#include <algorithm>
#include <istream>
#include <sstream>
#include <tuple>

#include "awgrpon/error.hpp"

namespace awgrpon {

std::string_view to_string(ServerState s) noexcept {
  switch (s) {
    case ServerState::Idle: return "idle";
    case ServerState::Communicating: return "communicating";
    case ServerState::ParkedOnOlt: return "parked";
  }
  return "?";
}

std::string_view to_string(DenialReason r) noexcept { return r == DenialReason::IntraCell ? "IntraCell" : "Busy"; }

SdnController::SdnController(Topology topology, RwaSolution solution, SdnConfig config)
    : topology_(std::move(topology)), solution_(std::move(solution)), config_(config) {
  if (config_.servers_per_cell < 0) throw Error(ErrorCode::InvalidParameter, "servers_per_cell must be >= 0");
  const auto report = verify(topology_, solution_, config_.mode);
  if (!report.feasible() && !config_.force) {
    throw Error(ErrorCode::InfeasibleSolution,
                std::to_string(report.violation_count()) + " constraint violations (use force to accept)");
  }
  assignment_grant_.assign(solution_.assignments.size(), std::nullopt);
  assignment_last_used_.assign(solution_.assignments.size(), 0);
  for (int o = 0; o < topology_.olts(); ++o) olt_loads_.push_back({o, 0, 0});

  const int total = topology_.cells() * config_.servers_per_cell;
  servers_.reserve(total);
  for (int id = 0; id < total; ++id) {
    Server s;
    s.id = id;
    s.cell = id / config_.servers_per_cell;
    s.state = ServerState::Idle;
    servers_.push_back(s);
  }
  // Idle servers park on OLTs round-robin by id, tuned to their cell's
  // lowest-wavelength route towards that OLT.
  for (auto& s : servers_) {
    if (olt_loads_.empty()) break;
    const int olt = s.id % topology_.olts();
    s.parked_olt = olt;
    for (const auto& a : solution_.assignments) {
      if (a.source == NodeId::cell(s.cell) && a.destination == NodeId::olt(olt)) {
        if (!s.parking_wavelength || a.wavelength < *s.parking_wavelength) s.parking_wavelength = a.wavelength;
      }
    }
    s.tuned_wavelength = s.parking_wavelength;
    s.state = ServerState::ParkedOnOlt;
    ++olt_loads_[olt].parked;
  }
}

const Server& SdnController::server(int id) const {
  if (id < 0 || id >= static_cast<int>(servers_.size())) {
    throw Error(ErrorCode::UnknownServer, "server " + std::to_string(id));
  }
  return servers_[id];
}

int SdnController::pick_anchor() const {
  int best = 0;
  for (const auto& l : olt_loads_) {
    if (l.total() < olt_loads_[best].total()) best = l.olt;
  }
  return best;
}

RequestOutcome SdnController::request(int server_a, int server_b, std::uint64_t t) {
  const Server& sa = server(server_a);
  const Server& sb = server(server_b);
  TraceEvent ev{t, TraceEvent::Op::Request, server_a, server_b, -1};
  auto deny = [&](DenialReason reason, std::string msg) -> RequestOutcome {
    log_.push_back({ev, "denied " + std::string(to_string(reason))});
    return Denial{reason, std::move(msg)};
  };
  if (sa.cell == sb.cell) return deny(DenialReason::IntraCell, "servers share cell " + std::to_string(sa.cell));

  const NodeId src = NodeId::cell(sa.cell);
  const NodeId dst = NodeId::cell(sb.cell);
  std::optional<std::size_t> chosen;
  for (std::size_t i = 0; i < solution_.assignments.size(); ++i) {
    const auto& a = solution_.assignments[i];
    if (a.source != src || a.destination != dst || assignment_grant_[i]) continue;
    bool clash = false;
    for (LinkId l : a.path) clash = clash || link_busy_.contains({l, a.wavelength});
    if (clash) continue;
    if (!chosen || std::tie(assignment_last_used_[i], a.wavelength, i) <
                       std::tie(assignment_last_used_[*chosen], solution_.assignments[*chosen].wavelength, *chosen)) {
      chosen = i;
    }
  }
  if (!chosen) {
    return deny(DenialReason::Busy, "no free wavelength for cell " + std::to_string(sa.cell) + " -> cell " +
                                        std::to_string(sb.cell));
  }

  const auto& a = solution_.assignments[*chosen];
  Grant g;
  g.id = next_grant_id_++;
  g.server_a = server_a;
  g.server_b = server_b;
  g.wavelength = a.wavelength;
  g.assignment = *chosen;
  if (config_.anchor_to_olt && !olt_loads_.empty()) {
    g.olt_anchor = pick_anchor();
    ++olt_loads_[*g.olt_anchor].anchored;
  }
  assignment_grant_[*chosen] = g.id;
  assignment_last_used_[*chosen] = ++clock_;
  for (LinkId l : a.path) link_busy_[{l, a.wavelength}] = g.id;
  for (int id : {server_a, server_b}) {
    Server& s = servers_[id];
    if (s.state == ServerState::ParkedOnOlt && s.parked_olt) --olt_loads_[*s.parked_olt].parked;
    s.state = ServerState::Communicating;
    s.tuned_wavelength = g.wavelength;
    s.grants.push_back(g.id);
  }
  grants_.emplace(g.id, g);
  log_.push_back({ev, "grant " + std::to_string(g.id) + " lambda " + std::to_string(g.wavelength + 1)});
  return g;
}

void SdnController::release(int grant_id, std::uint64_t t) {
  auto it = grants_.find(grant_id);
  if (it == grants_.end()) throw Error(ErrorCode::UnknownGrant, "grant " + std::to_string(grant_id));
  const Grant g = it->second;
  grants_.erase(it);
  const auto& a = solution_.assignments[g.assignment];
  assignment_grant_[g.assignment].reset();
  for (LinkId l : a.path) link_busy_.erase({l, a.wavelength});
  if (g.olt_anchor) --olt_loads_[*g.olt_anchor].anchored;
  for (int id : {g.server_a, g.server_b}) {
    Server& s = servers_[id];
    std::erase(s.grants, g.id);
    if (s.grants.empty()) {
      s.state = ServerState::ParkedOnOlt;
      s.tuned_wavelength = s.parking_wavelength;
      if (s.parked_olt) ++olt_loads_[*s.parked_olt].parked;
    } else {
      s.tuned_wavelength = grants_.at(s.grants.back()).wavelength;
    }
  }
  log_.push_back({{t, TraceEvent::Op::Release, -1, -1, grant_id}, "released " + std::to_string(grant_id)});
}

std::string SdnController::apply(const TraceEvent& event) {
  try {
    if (event.op == TraceEvent::Op::Request) {
      request(event.a, event.b, event.t);
    } else {
      release(event.grant_id, event.t);
    }
  } catch (const Error& e) {
    log_.push_back({event, std::string("error ") + std::string(awgrpon::to_string(e.code()))});
  }
  return log_.back().outcome;
}

SdnController SdnController::replay(Topology topology, RwaSolution solution, SdnConfig config,
                                    std::span<const TraceEvent> events) {
  SdnController c(std::move(topology), std::move(solution), config);
  for (const auto& e : events) c.apply(e);
  return c;
}

LoadReport SdnController::load_report() const {
  LoadReport r;
  r.olts = olt_loads_;
  r.active_grants = grants_.size();
  for (const auto& s : servers_) {
    if (s.state == ServerState::ParkedOnOlt) ++r.parked_servers;
    if (s.state == ServerState::Communicating) ++r.communicating_servers;
  }
  for (const auto& [key, grant] : link_busy_) {
    if (r.links.empty() || r.links.back().link != key.first) r.links.push_back({key.first, {}, {}});
    r.links.back().wavelengths.push_back(key.second);
    r.links.back().grants.push_back(grant);
  }
  return r;
}

bool SdnController::check_invariants() const {
  std::vector<int> parked(olt_loads_.size(), 0), anchored(olt_loads_.size(), 0);
  for (const auto& s : servers_) {
    if (s.state == ServerState::ParkedOnOlt && s.parked_olt) ++parked[*s.parked_olt];
    if (s.state == ServerState::Communicating && (s.grants.empty() || s.tuned_wavelength != grants_.at(s.grants.back()).wavelength)) {
      return false;
    }
  }
  std::map<std::pair<LinkId, int>, int> busy;
  for (const auto& [id, g] : grants_) {
    if (g.olt_anchor) ++anchored[*g.olt_anchor];
    for (LinkId l : solution_.assignments[g.assignment].path) {
      if (!busy.emplace(std::pair{l, g.wavelength}, id).second) return false;
    }
  }
  for (std::size_t o = 0; o < olt_loads_.size(); ++o) {
    if (olt_loads_[o].parked != parked[o] || olt_loads_[o].anchored != anchored[o]) return false;
  }
  return busy == link_busy_;
}

namespace {

nlohmann::json opt(const std::optional<int>& v, int offset = 0) {
  return v ? nlohmann::json(*v + offset) : nlohmann::json();
}

nlohmann::json event_json(const TraceEvent& e) {
  nlohmann::json j{{"t", e.t}, {"op", e.op == TraceEvent::Op::Request ? "request" : "release"}};
  if (e.op == TraceEvent::Op::Request) {
    j["a"] = e.a;
    j["b"] = e.b;
  } else {
    j["grant_id"] = e.grant_id;
  }
  return j;
}

}  // namespace

nlohmann::json SdnController::state_json() const {
  nlohmann::json j;
  j["lambda_base"] = 1;
  auto& servers = j["servers"] = nlohmann::json::array();
  for (const auto& s : servers_) {
    servers.push_back({{"id", s.id},
                       {"cell", s.cell},
                       {"state", to_string(s.state)},
                       {"tuned_lambda", opt(s.tuned_wavelength, 1)},
                       {"parked_olt", opt(s.parked_olt)},
                       {"grants", s.grants}});
  }
  auto& grants = j["grants"] = nlohmann::json::array();
  for (const auto& [id, g] : grants_) {
    grants.push_back({{"id", g.id},
                      {"a", g.server_a},
                      {"b", g.server_b},
                      {"lambda", g.wavelength + 1},
                      {"assignment", g.assignment},
                      {"olt_anchor", opt(g.olt_anchor)}});
  }
  auto& loads = j["olt_loads"] = nlohmann::json::array();
  for (const auto& l : olt_loads_) loads.push_back({{"olt", l.olt}, {"parked", l.parked}, {"anchored", l.anchored}});
  return j;
}

nlohmann::json SdnController::snapshot() const {
  nlohmann::json j = state_json();
  j["clock"] = clock_;
  j["next_grant_id"] = next_grant_id_;
  j["assignment_last_used"] = assignment_last_used_;
  auto& log = j["log"] = nlohmann::json::array();
  for (const auto& r : log_) {
    auto e = event_json(r.event);
    e["outcome"] = r.outcome;
    log.push_back(std::move(e));
  }
  return j;
}

std::vector<TraceEvent> parse_trace(std::istream& in) {
  std::vector<TraceEvent> events;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      auto j = nlohmann::json::parse(line);
      TraceEvent e;
      e.t = j.value("t", std::uint64_t{0});
      const auto op = j.at("op").get<std::string>();
      if (op == "request") {
        e.op = TraceEvent::Op::Request;
        e.a = j.at("a").get<int>();
        e.b = j.at("b").get<int>();
      } else if (op == "release") {
        e.op = TraceEvent::Op::Release;
        e.grant_id = j.at("grant_id").get<int>();
      } else {
        throw Error(ErrorCode::ParseError, "trace line " + std::to_string(line_no) + ": unknown op '" + op + "'");
      }
      events.push_back(e);
    } catch (const nlohmann::json::exception& ex) {
      throw Error(ErrorCode::ParseError, "trace line " + std::to_string(line_no) + ": " + ex.what());
    }
  }
  return events;
}

std::string trace_line(const TraceEvent& event) { return event_json(event).dump(); }

nlohmann::json load_report_json(const Topology& topology, const LoadReport& r) {
  nlohmann::json j;
  j["lambda_base"] = 1;
  j["active_grants"] = r.active_grants;
  j["parked_servers"] = r.parked_servers;
  j["communicating_servers"] = r.communicating_servers;
  auto& olts = j["olts"] = nlohmann::json::array();
  for (const auto& l : r.olts) {
    olts.push_back({{"olt", l.olt}, {"parked", l.parked}, {"anchored", l.anchored}, {"total", l.total()}});
  }
  auto& links = j["links"] = nlohmann::json::array();
  for (const auto& l : r.links) {
    const Link& link = topology.link(l.link);
    std::vector<int> lambdas;
    for (int w : l.wavelengths) lambdas.push_back(w + 1);
    links.push_back({{"link", l.link},
                     {"from", to_string(link.from)},
                     {"to", to_string(link.to)},
                     {"lambdas", lambdas},
                     {"grants", l.grants}});
  }
  return j;
}

std::string load_report_csv(const Topology& topology, const LoadReport& r) {
  std::ostringstream os;
  os << "kind,id,from,to,parked,anchored,total,lambdas\n";
  for (const auto& l : r.olts) {
    os << "olt," << l.olt << ",,," << l.parked << "," << l.anchored << "," << l.total() << ",\n";
  }
  for (const auto& l : r.links) {
    const Link& link = topology.link(l.link);
    os << "link," << l.link << "," << to_string(link.from) << "," << to_string(link.to) << ",,,"
       << l.wavelengths.size() << ",";
    for (std::size_t i = 0; i < l.wavelengths.size(); ++i) os << (i ? " " : "") << l.wavelengths[i] + 1;
    os << "\n";
  }
  return os.str();
}

}  // namespace awgrpon
