#include "awgrpon/rwa_model.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>
#include <tuple>

#include "awgrpon/error.hpp"

namespace awgrpon {

std::string_view to_string(VerifyMode mode) noexcept {
  return mode == VerifyMode::Cyclic ? "cyclic" : "free-permutation";
}

VerifyMode parse_verify_mode(std::string_view text) {
  if (text == "cyclic") return VerifyMode::Cyclic;
  if (text == "free" || text == "free-permutation") return VerifyMode::FreePermutation;
  throw Error(ErrorCode::InvalidParameter, "unknown mode '" + std::string(text) + "' (cyclic | free)");
}

std::string_view constraint_label(Constraint c) noexcept {
  switch (c) {
    case Constraint::PairMultiplicity: return "C1 pair-multiplicity";
    case Constraint::ReceiverDistinctness: return "C2 receiver-distinctness";
    case Constraint::SourceDistinctness: return "C3 source-distinctness";
    case Constraint::WavelengthContinuity: return "C4 wavelength-continuity";
    case Constraint::LinkWavelengthUniqueness: return "C5 link-wavelength-uniqueness";
    case Constraint::AwgrConsistency: return "C6 awgr-consistency";
  }
  return "?";
}

bool ConstraintReport::feasible() const { return violation_count() == 0; }

std::size_t ConstraintReport::violation_count() const {
  std::size_t n = 0;
  for (const auto& v : violations) n += v.size();
  return n;
}

std::size_t objective(const RwaSolution& solution) { return solution.assignments.size(); }

int wavelength_budget(int n_groups, int multipath, bool intra_cell_reuse) {
  if (n_groups < 2) throw Error(ErrorCode::InvalidParameter, "wavelength budget needs at least 2 groups");
  if (multipath != 1 && multipath != 2) throw Error(ErrorCode::InvalidParameter, "multipath must be 1 or 2");
  return (intra_cell_reuse ? n_groups - 1 : n_groups) * multipath;
}

namespace {

int hop_wavelength(const PairAssignment& a, std::size_t hop) {
  return a.hop_wavelengths.empty() ? a.wavelength : a.hop_wavelengths[hop];
}

std::string pair_name(const PairAssignment& a) { return to_string(a.source) + "->" + to_string(a.destination); }

void check_references(const Topology& topology, const RwaSolution& solution) {
  for (std::size_t i = 0; i < solution.assignments.size(); ++i) {
    const auto& a = solution.assignments[i];
    for (const NodeId* g : {&a.source, &a.destination}) {
      if (!g->is_group() || !topology.contains(*g)) {
        throw Error(ErrorCode::TopologyMismatch, "assignment " + std::to_string(i) + " endpoint " + to_string(*g));
      }
    }
    if (a.wavelength < 0 || a.wavelength >= topology.wavelengths()) {
      throw Error(ErrorCode::TopologyMismatch, "assignment " + std::to_string(i) + " uses wavelength index " +
                                                   std::to_string(a.wavelength));
    }
    for (LinkId l : a.path) topology.link(l);
  }
}

// Returns the AWGR traversed between hop i and hop i+1, if the hops join.
std::optional<int> joint_awgr(const Topology& topology, LinkId in, LinkId out) {
  const Link& a = topology.link(in);
  const Link& b = topology.link(out);
  if (a.to.kind == NodeKind::AwgrInputPort && b.from.kind == NodeKind::AwgrOutputPort && a.to.index == b.from.index) {
    return a.to.index;
  }
  return std::nullopt;
}

void check_structure(const Topology& topology, const PairAssignment& a, std::size_t index,
                     std::vector<Violation>& out) {
  auto fail = [&](std::string msg) { out.push_back({{index}, std::nullopt, std::nullopt, a.wavelength, std::move(msg)}); };
  if (a.path.empty()) {
    fail("empty path");
    return;
  }
  if (topology.link(a.path.front()).from != a.source) fail("path does not leave the source");
  if (topology.link(a.path.back()).to != a.destination) fail("path does not enter the destination");
  for (std::size_t h = 0; h + 1 < a.path.size(); ++h) {
    const Link& cur = topology.link(a.path[h]);
    const Link& next = topology.link(a.path[h + 1]);
    if (cur.to.is_group()) {
      fail("path passes through group " + to_string(cur.to));
    } else if (cur.to.kind != NodeKind::AwgrInputPort || next.from.kind != NodeKind::AwgrOutputPort) {
      fail("hop " + std::to_string(h) + " does not traverse an AWGR input->output");
    } else if (cur.to.index != next.from.index) {
      fail("hops " + std::to_string(h) + "/" + std::to_string(h + 1) + " are not joined by one AWGR");
    }
  }
}

}  // namespace

ConstraintReport verify(const Topology& topology, const RwaSolution& solution, VerifyMode mode) {
  check_references(topology, solution);
  ConstraintReport report;
  const auto& as = solution.assignments;
  report.objective = objective(solution);
  const std::size_t g = static_cast<std::size_t>(topology.group_count());
  report.ordered_pairs = g * (g - 1);

  // C1
  std::map<std::pair<NodeId, NodeId>, std::vector<std::size_t>> by_pair;
  for (std::size_t i = 0; i < as.size(); ++i) by_pair[{as[i].source, as[i].destination}].push_back(i);
  auto& c1 = report.of(Constraint::PairMultiplicity);
  for (const auto& [pair, idx] : by_pair) {
    if (pair.first == pair.second) {
      c1.push_back({idx, std::nullopt, std::nullopt, std::nullopt, "source equals destination " + to_string(pair.first)});
      continue;
    }
    ++report.pairs_served;
    std::map<int, std::vector<std::size_t>> by_lambda;
    for (auto i : idx) by_lambda[as[i].wavelength].push_back(i);
    if (idx.size() > static_cast<std::size_t>(solution.multipath_k)) {
      c1.push_back({idx, std::nullopt, std::nullopt, std::nullopt,
                    std::to_string(idx.size()) + " assignments exceed multipath_k=" +
                        std::to_string(solution.multipath_k)});
    }
    for (const auto& [lambda, same] : by_lambda) {
      if (same.size() > 1) {
        c1.push_back({same, std::nullopt, std::nullopt, lambda, "pair repeats a wavelength"});
      }
    }
    if (idx.size() == static_cast<std::size_t>(solution.multipath_k) && by_lambda.size() == idx.size()) {
      ++report.pairs_at_multipath;
    }
  }

  // C4
  auto& c4 = report.of(Constraint::WavelengthContinuity);
  for (std::size_t i = 0; i < as.size(); ++i) {
    const auto& a = as[i];
    if (a.hop_wavelengths.empty()) continue;
    if (a.hop_wavelengths.size() != a.path.size()) {
      c4.push_back({{i}, std::nullopt, std::nullopt, a.wavelength, "hop wavelength record does not match path length"});
      continue;
    }
    for (std::size_t h = 0; h < a.path.size(); ++h) {
      if (a.hop_wavelengths[h] != a.wavelength) {
        c4.push_back({{i}, a.path[h], std::nullopt, a.hop_wavelengths[h], "wavelength changes along the path"});
      }
    }
  }

  // C2, C3, C5 share the (link, wavelength) occupancy.
  std::map<std::pair<LinkId, int>, std::vector<std::size_t>> occupancy;
  std::map<std::pair<LinkId, int>, std::vector<std::size_t>> first_hop;
  std::map<std::pair<LinkId, int>, std::vector<std::size_t>> last_hop;
  for (std::size_t i = 0; i < as.size(); ++i) {
    const auto& a = as[i];
    if (!a.resolved) {
      report.path_unresolvable.push_back(i);
      continue;
    }
    for (std::size_t h = 0; h < a.path.size(); ++h) occupancy[{a.path[h], hop_wavelength(a, h)}].push_back(i);
    if (a.path.empty()) continue;
    if (topology.link(a.path.front()).from == a.source) first_hop[{a.path.front(), hop_wavelength(a, 0)}].push_back(i);
    if (topology.link(a.path.back()).to == a.destination) {
      last_hop[{a.path.back(), hop_wavelength(a, a.path.size() - 1)}].push_back(i);
    }
  }
  auto collect = [&](const auto& table, Constraint c, const std::string& what) {
    auto& out = report.of(c);
    for (const auto& [key, idx] : table) {
      std::set<std::size_t> uniq(idx.begin(), idx.end());
      if (uniq.size() < 2) continue;
      const Link& l = topology.link(key.first);
      out.push_back({{uniq.begin(), uniq.end()}, key.first, std::nullopt, key.second,
                     what + " " + to_string(l.from) + " -> " + to_string(l.to)});
    }
  };
  collect(last_hop, Constraint::ReceiverDistinctness, "wavelength reused on downlink fiber");
  collect(first_hop, Constraint::SourceDistinctness, "wavelength reused on uplink fiber");
  collect(occupancy, Constraint::LinkWavelengthUniqueness, "wavelength reused on link");

  // C6
  auto& c6 = report.of(Constraint::AwgrConsistency);
  std::map<std::tuple<int, int, int>, std::set<std::pair<int, std::size_t>>> forward;   // (awgr, λ, in) -> outs
  std::map<std::tuple<int, int, int>, std::set<std::pair<int, std::size_t>>> backward;  // (awgr, λ, out) -> ins
  for (std::size_t i = 0; i < as.size(); ++i) {
    const auto& a = as[i];
    if (!a.resolved) continue;
    check_structure(topology, a, i, c6);
    for (std::size_t h = 0; h + 1 < a.path.size(); ++h) {
      auto awgr = joint_awgr(topology, a.path[h], a.path[h + 1]);
      if (!awgr) continue;
      const int in = topology.link(a.path[h]).to.port;
      const int out = topology.link(a.path[h + 1]).from.port;
      const int lambda = hop_wavelength(a, h);
      if (mode == VerifyMode::Cyclic) {
        std::optional<int> expected;
        try {
          expected = topology.route(*awgr, in, lambda);
        } catch (const Error&) {
        }
        if (expected != out) {
          c6.push_back({{i}, std::nullopt, *awgr, lambda,
                        topology.awgr(*awgr).name() + " routes in " + std::to_string(in) + " to out " +
                            (expected ? std::to_string(*expected) : std::string("none")) + ", path uses out " +
                            std::to_string(out)});
        }
      } else {
        forward[{*awgr, lambda, in}].insert({out, i});
        backward[{*awgr, lambda, out}].insert({in, i});
      }
    }
  }
  auto injectivity = [&](const auto& table, const char* what) {
    for (const auto& [key, targets] : table) {
      std::set<int> distinct;
      std::set<std::size_t> who;
      for (const auto& [port, i] : targets) {
        distinct.insert(port);
        who.insert(i);
      }
      if (distinct.size() < 2) continue;
      const auto [awgr, lambda, port] = key;
      c6.push_back({{who.begin(), who.end()}, std::nullopt, awgr, lambda,
                    topology.awgr(awgr).name() + " " + what + " " + std::to_string(port) +
                        " is not a permutation at this wavelength"});
    }
  };
  injectivity(forward, "input");
  injectivity(backward, "output");
  return report;
}

std::optional<std::vector<LinkId>> expand_awgr_path(const Topology& topology, const NodeId& source,
                                                    const NodeId& destination,
                                                    std::span<const std::string> awgr_path) {
  if (awgr_path.empty()) return std::nullopt;
  std::vector<int> ids;
  for (const auto& name : awgr_path) {
    auto id = topology.awgr_by_name(name);
    if (!id) return std::nullopt;
    ids.push_back(*id);
  }
  std::vector<LinkId> path;
  auto first = std::find_if(topology.out_links(source).begin(), topology.out_links(source).end(), [&](LinkId l) {
    const Link& link = topology.link(l);
    return link.to.kind == NodeKind::AwgrInputPort && link.to.index == ids.front();
  });
  if (first == topology.out_links(source).end()) return std::nullopt;
  path.push_back(*first);
  for (std::size_t i = 0; i + 1 < ids.size(); ++i) {
    std::optional<LinkId> hop;
    const Awgr& a = topology.awgr(ids[i]);
    for (int p = 0; p < a.ports && !hop; ++p) {
      for (LinkId l : topology.out_links(NodeId::awgr_out(a.id, p))) {
        const Link& link = topology.link(l);
        if (link.to.kind == NodeKind::AwgrInputPort && link.to.index == ids[i + 1]) {
          hop = l;
          break;
        }
      }
    }
    if (!hop) return std::nullopt;
    path.push_back(*hop);
  }
  std::optional<LinkId> last;
  for (LinkId l : topology.in_links(destination)) {
    const Link& link = topology.link(l);
    if (link.from.kind == NodeKind::AwgrOutputPort && link.from.index == ids.back()) {
      last = l;
      break;
    }
  }
  if (!last) return std::nullopt;
  path.push_back(*last);
  return path;
}

std::vector<std::string> awgr_labels(const Topology& topology, std::span<const LinkId> path) {
  std::vector<std::string> labels;
  for (LinkId l : path) {
    const Link& link = topology.link(l);
    if (link.to.kind == NodeKind::AwgrInputPort) labels.push_back(topology.awgr(link.to.index).name());
  }
  return labels;
}

void canonicalize(RwaSolution& solution) {
  std::stable_sort(solution.assignments.begin(), solution.assignments.end(),
                   [](const PairAssignment& a, const PairAssignment& b) {
                     return std::tie(a.source, a.destination, a.wavelength, a.path, a.awgr_path) <
                            std::tie(b.source, b.destination, b.wavelength, b.path, b.awgr_path);
                   });
}

nlohmann::json solution_to_json(const Topology& topology, const RwaSolution& solution) {
  nlohmann::json doc;
  doc["format"] = "rwa-solution";
  doc["format_version"] = 1;
  doc["lambda_base"] = 1;
  doc["link_id_base"] = 0;
  doc["multipath_k"] = solution.multipath_k;
  auto& arr = doc["assignments"] = nlohmann::json::array();
  for (const auto& a : solution.assignments) {
    nlohmann::json j{{"src", to_string(a.source)}, {"dst", to_string(a.destination)}, {"lambda", a.wavelength + 1}};
    j["awgr_path"] = a.resolved ? awgr_labels(topology, a.path) : a.awgr_path;
    if (a.resolved) j["links"] = a.path;
    if (!a.hop_wavelengths.empty()) {
      auto& hops = j["hop_lambdas"] = nlohmann::json::array();
      for (int w : a.hop_wavelengths) hops.push_back(w + 1);
    }
    arr.push_back(std::move(j));
  }
  return doc;
}

RwaSolution solution_from_json(const Topology& topology, const nlohmann::json& doc) {
  try {
    RwaSolution s;
    s.multipath_k = doc.value("multipath_k", 2);
    if (s.multipath_k < 1) throw Error(ErrorCode::InvalidParameter, "multipath_k must be >= 1");
    const int base = doc.value("lambda_base", 1);
    for (const auto& j : doc.at("assignments")) {
      PairAssignment a;
      a.source = parse_node(j.at("src").get<std::string>());
      a.destination = parse_node(j.at("dst").get<std::string>());
      for (const NodeId* n : {&a.source, &a.destination}) {
        if (!n->is_group() || !topology.contains(*n)) {
          throw Error(ErrorCode::TopologyMismatch, "unknown group " + to_string(*n));
        }
      }
      a.wavelength = j.at("lambda").get<int>() - base;
      if (a.wavelength < 0 || a.wavelength >= topology.wavelengths()) {
        throw Error(ErrorCode::TopologyMismatch, "lambda " + std::to_string(a.wavelength + base) +
                                                     " outside the topology's " +
                                                     std::to_string(topology.wavelengths()) + " wavelengths");
      }
      if (j.contains("awgr_path")) a.awgr_path = j["awgr_path"].get<std::vector<std::string>>();
      if (j.contains("hop_lambdas")) {
        for (int w : j["hop_lambdas"].get<std::vector<int>>()) a.hop_wavelengths.push_back(w - base);
      }
      if (j.contains("links")) {
        a.path = j["links"].get<std::vector<LinkId>>();
        for (LinkId l : a.path) topology.link(l);
        auto labels = awgr_labels(topology, a.path);
        if (!a.awgr_path.empty() && a.awgr_path != labels) {
          throw Error(ErrorCode::TopologyMismatch, "awgr_path disagrees with links for " + pair_name(a));
        }
        a.awgr_path = std::move(labels);
      } else if (auto expanded = expand_awgr_path(topology, a.source, a.destination, a.awgr_path)) {
        a.path = std::move(*expanded);
      } else {
        a.resolved = false;
      }
      s.assignments.push_back(std::move(a));
    }
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("solution document: ") + e.what());
  }
}

namespace {

nlohmann::json violation_json(const Topology& topology, const RwaSolution& solution, const Violation& v) {
  nlohmann::json j;
  auto& pairs = j["pairs"] = nlohmann::json::array();
  for (auto i : v.assignments) {
    const auto& a = solution.assignments[i];
    pairs.push_back(pair_name(a) + " lambda " + std::to_string(a.wavelength + 1));
  }
  j["assignments"] = v.assignments;
  if (v.wavelength) j["lambda"] = *v.wavelength + 1;
  if (v.link) {
    const Link& l = topology.link(*v.link);
    j["link"] = *v.link;
    j["link_desc"] = to_string(l.from) + " -> " + to_string(l.to);
  }
  if (v.awgr) j["awgr"] = topology.awgr(*v.awgr).name();
  j["message"] = v.message;
  return j;
}

}  // namespace

nlohmann::json report_to_json(const Topology& topology, const RwaSolution& solution,
                              const ConstraintReport& report) {
  nlohmann::json doc;
  doc["format"] = "rwa-constraint-report";
  doc["format_version"] = 1;
  doc["lambda_base"] = 1;
  doc["objective"] = report.objective;
  doc["feasible"] = report.feasible();
  doc["ordered_pairs"] = report.ordered_pairs;
  doc["pairs_served"] = report.pairs_served;
  doc["pairs_at_multipath"] = report.pairs_at_multipath;
  auto& cs = doc["constraints"] = nlohmann::json::array();
  for (std::size_t c = 0; c < kConstraintCount; ++c) {
    nlohmann::json jc;
    jc["constraint"] = constraint_label(static_cast<Constraint>(c));
    jc["passed"] = report.violations[c].empty();
    auto& vs = jc["violations"] = nlohmann::json::array();
    for (const auto& v : report.violations[c]) vs.push_back(violation_json(topology, solution, v));
    cs.push_back(std::move(jc));
  }
  auto& un = doc["path_unresolvable"] = nlohmann::json::array();
  for (auto i : report.path_unresolvable) {
    const auto& a = solution.assignments[i];
    un.push_back({{"assignment", i}, {"pair", pair_name(a)}, {"lambda", a.wavelength + 1}, {"awgr_path", a.awgr_path}});
  }
  return doc;
}

std::string report_to_text(const Topology& /*topology*/, const RwaSolution& solution, const ConstraintReport& report) {
  std::ostringstream os;
  os << "objective: " << report.objective << " assignments\n";
  os << "pairs served: " << report.pairs_served << " of " << report.ordered_pairs << " ordered pairs ("
     << report.pairs_at_multipath << " at multipath_k=" << solution.multipath_k << ")\n";
  for (std::size_t c = 0; c < kConstraintCount; ++c) {
    const auto& vs = report.violations[c];
    os << constraint_label(static_cast<Constraint>(c)) << ": " << (vs.empty() ? "PASS" : "FAIL");
    if (!vs.empty()) os << " (" << vs.size() << " violations)";
    os << "\n";
    for (const auto& v : vs) {
      os << "  - " << v.message;
      if (v.wavelength) os << " [lambda " << *v.wavelength + 1 << "]";
      os << ":";
      for (auto i : v.assignments) os << " #" << i << " " << pair_name(solution.assignments[i]);
      os << "\n";
    }
  }
  if (!report.path_unresolvable.empty()) {
    os << "path_unresolvable: " << report.path_unresolvable.size() << " entries have no realisation in this topology\n";
    for (auto i : report.path_unresolvable) {
      const auto& a = solution.assignments[i];
      os << "  - #" << i << " " << pair_name(a) << " lambda " << a.wavelength + 1 << " via";
      for (const auto& n : a.awgr_path) os << " " << n;
      os << "\n";
    }
  }
  os << (report.feasible() ? "verdict: feasible\n" : "verdict: violations found\n");
  return os.str();
}

}  // namespace awgrpon
