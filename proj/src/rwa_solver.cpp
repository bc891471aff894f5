#include "awgrpon/rwa_solver.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <functional>
#include <numeric>
#include <random>
#include <sstream>

#include "awgrpon/error.hpp"

namespace awgrpon {

void SolverConfig::validate() const {
  if (multipath_k < 1) throw Error(ErrorCode::InvalidParameter, "multipath_k must be >= 1");
  if (max_path_hops < 1) throw Error(ErrorCode::InvalidParameter, "max_path_hops must be >= 1");
  if (!(time_limit_s > 0.0)) throw Error(ErrorCode::InvalidParameter, "time_limit must be > 0");
}

namespace {

struct PathWalker {
  const Topology& topology;
  const NodeId& dst;
  int wavelength;
  const SolverConfig& config;
  std::vector<CandidatePath>& out;
  CandidatePath current;

  void extend(int awgr, int in_port) {
    const Awgr& a = topology.awgr(awgr);
    auto visit = [&](int out_port) {
      for (LinkId l : topology.out_links(NodeId::awgr_out(awgr, out_port))) {
        const Link& link = topology.link(l);
        if (link.to.is_group()) {
          if (link.to == dst) {
            current.links.push_back(l);
            out.push_back(current);
            current.links.pop_back();
          }
          continue;
        }
        const int next = link.to.index;
        if (static_cast<int>(current.awgrs.size()) >= config.max_path_hops) continue;
        if (std::find(current.awgrs.begin(), current.awgrs.end(), next) != current.awgrs.end()) continue;
        current.links.push_back(l);
        current.awgrs.push_back(next);
        extend(next, link.to.port);
        current.awgrs.pop_back();
        current.links.pop_back();
      }
    };
    if (config.mode == VerifyMode::FreePermutation) {
      for (int p = 0; p < a.ports; ++p) visit(p);
    } else {
      int out_port = -1;
      try {
        out_port = topology.route(awgr, in_port, wavelength);
      } catch (const Error&) {
        return;
      }
      visit(out_port);
    }
  }
};

}  // namespace

std::vector<CandidatePath> enumerate_paths(const Topology& topology, const NodeId& src, const NodeId& dst,
                                           int wavelength, const SolverConfig& config) {
  config.validate();
  for (const NodeId* g : {&src, &dst}) {
    if (!g->is_group() || !topology.contains(*g)) throw Error(ErrorCode::UnknownNode, to_string(*g));
  }
  if (wavelength < 0 || wavelength >= topology.wavelengths()) {
    throw Error(ErrorCode::OutOfRange, "wavelength " + std::to_string(wavelength));
  }
  std::vector<CandidatePath> out;
  if (src == dst) return out;
  PathWalker walker{topology, dst, wavelength, config, out, {}};
  for (LinkId l : topology.out_links(src)) {
    const Link& link = topology.link(l);
    if (link.to.kind != NodeKind::AwgrInputPort) continue;
    walker.current.links = {l};
    walker.current.awgrs = {link.to.index};
    walker.extend(link.to.index, link.to.port);
  }
  return out;
}

SearchState::SearchState(const Topology& topology, const SolverConfig& config)
    : topology_(&topology), config_(config) {
  config_.validate();
  if (topology.wavelengths() > 64) {
    throw Error(ErrorCode::InvalidParameter, "the solver supports at most 64 wavelengths");
  }
  const auto groups = topology.groups();
  for (const auto& g : groups) {
    group_uplinks_.emplace_back(topology.out_links(g).begin(), topology.out_links(g).end());
    group_downlinks_.emplace_back(topology.in_links(g).begin(), topology.in_links(g).end());
  }
  for (std::size_t s = 0; s < groups.size(); ++s) {
    for (std::size_t d = 0; d < groups.size(); ++d) {
      if (s == d) continue;
      pairs_.emplace_back(groups[s], groups[d]);
      pair_source_.push_back(static_cast<int>(s));
      pair_dest_.push_back(static_cast<int>(d));
    }
  }

  const int w_count = topology.wavelengths();
  std::vector<CandidatePath> shared;
  for (std::size_t p = 0; p < pairs_.size(); ++p) {
    const auto& [src, dst] = pairs_[p];
    std::vector<std::pair<int, CandidatePath>> opts;
    if (config_.mode == VerifyMode::FreePermutation && w_count > 0) {
      shared = enumerate_paths(topology, src, dst, 0, config_);
    }
    for (int w = 0; w < w_count; ++w) {
      if (config_.mode == VerifyMode::Cyclic) {
        for (auto& path : enumerate_paths(topology, src, dst, w, config_)) opts.emplace_back(w, std::move(path));
      } else {
        for (const auto& path : shared) opts.emplace_back(w, path);
      }
    }
    if (config_.node_order_seed != 0) {
      std::mt19937_64 rng(config_.node_order_seed + 0x9e3779b97f4a7c15ULL * (p + 1));
      std::shuffle(opts.begin(), opts.end(), rng);
    }
    for (auto& [w, path] : opts) {
      table_.wavelength.push_back(w);
      table_.links.insert(table_.links.end(), path.links.begin(), path.links.end());
      table_.link_begin.push_back(static_cast<int>(table_.links.size()));
    }
    table_.pair_begin.push_back(static_cast<int>(table_.wavelength.size()));
  }
  cursors_.resize(pairs_.size());
  for (std::size_t p = 0; p < pairs_.size(); ++p) {
    cursors_[p].next_option = table_.pair_begin[p];
    cursors_[p].remaining = config_.multipath_k;
  }
  link_used_.assign(topology.links().size(), 0);
  scan_.resize(pairs_.size());
}

const std::vector<kernels::PairScan>& SearchState::scan() const {
  if (config_.parallel_scan) {
    kernels::scan_pairs_parallel(table_, link_used_, cursors_, scan_);
  } else {
    kernels::scan_pairs_serial(table_, link_used_, cursors_, scan_);
  }
  return scan_;
}

std::size_t SearchState::bound() const {
  const auto& sc = scan();
  const std::size_t g = group_uplinks_.size();
  std::vector<std::size_t> from(g, 0), to(g, 0);
  for (std::size_t p = 0; p < pairs_.size(); ++p) {
    const auto& c = cursors_[p];
    if (!c.open || c.remaining <= 0) continue;
    const std::size_t contrib =
        std::min<std::size_t>(static_cast<std::size_t>(c.remaining), std::popcount(sc[p].wavelengths));
    from[pair_source_[p]] += contrib;
    to[pair_dest_[p]] += contrib;
  }
  const int w_count = topology_->wavelengths();
  auto free_slots = [&](const std::vector<LinkId>& links) {
    std::size_t n = 0;
    for (LinkId l : links) n += static_cast<std::size_t>(w_count - std::popcount(link_used_[l]));
    return n;
  };
  std::size_t out_cap = 0, in_cap = 0;
  for (std::size_t i = 0; i < g; ++i) {
    out_cap += std::min(from[i], free_slots(group_uplinks_[i]));
    in_cap += std::min(to[i], free_slots(group_downlinks_[i]));
  }
  return objective() + std::min(out_cap, in_cap);
}

bool SearchState::option_available(std::size_t pair, int option) const {
  const auto& c = cursors_[pair];
  if (!c.open || c.remaining <= 0) return false;
  if (option < c.next_option || option >= table_.pair_begin[pair + 1]) return false;
  if (c.used_wavelengths >> table_.wavelength[option] & 1U) return false;
  return kernels::option_free(table_, link_used_, option);
}

void SearchState::assign(std::size_t pair, int option) {
  auto& c = cursors_[pair];
  stack_.push_back({pair, option, c.next_option});
  c.next_option = option + 1;
  const std::uint64_t bit = std::uint64_t{1} << table_.wavelength[option];
  c.used_wavelengths |= bit;
  --c.remaining;
  for (LinkId l : table_.option_links(option)) link_used_[l] |= bit;
}

void SearchState::undo_assign() {
  const Placed top = stack_.back();
  stack_.pop_back();
  auto& c = cursors_[top.pair];
  const std::uint64_t bit = std::uint64_t{1} << table_.wavelength[top.option];
  c.next_option = top.prev_next_option;
  c.used_wavelengths &= ~bit;
  ++c.remaining;
  for (LinkId l : table_.option_links(top.option)) link_used_[l] &= ~bit;
}

void SearchState::close(std::size_t pair) { cursors_[pair].open = false; }
void SearchState::reopen(std::size_t pair) { cursors_[pair].open = true; }

RwaSolution SearchState::solution() const {
  RwaSolution s;
  s.multipath_k = config_.multipath_k;
  for (const auto& placed : stack_) {
    PairAssignment a;
    a.source = pairs_[placed.pair].first;
    a.destination = pairs_[placed.pair].second;
    a.wavelength = table_.wavelength[placed.option];
    auto links = table_.option_links(placed.option);
    a.path.assign(links.begin(), links.end());
    a.awgr_path = awgr_labels(*topology_, a.path);
    s.assignments.push_back(std::move(a));
  }
  canonicalize(s);
  return s;
}

SolverResult solve(const Topology& topology, const SolverConfig& config) {
  using Clock = std::chrono::steady_clock;
  const auto start = Clock::now();
  SearchState state(topology, config);
  SolverResult result;
  result.best.multipath_k = config.multipath_k;
  result.bound = state.bound();
  bool stop = false;

  auto elapsed = [&] { return std::chrono::duration<double>(Clock::now() - start).count(); };

  std::function<void()> dfs = [&] {
    if (config.node_limit != 0 && result.nodes_explored >= config.node_limit) {
      result.limit_hit = stop = true;
      return;
    }
    ++result.nodes_explored;
    if (elapsed() > config.time_limit_s) {
      result.limit_hit = stop = true;
      return;
    }
    if (state.objective() > result.objective) {
      result.objective = state.objective();
      result.best = state.solution();
      result.trace.push_back({result.nodes_explored, result.objective});
      if (result.objective >= result.bound) {
        stop = true;
        return;
      }
    }
    if (state.bound() <= result.objective) return;
    // Fail-first: the open pair with the fewest usable options.
    const auto& sc = state.scan();
    std::size_t chosen = state.pair_count();
    int fewest = 0;
    for (std::size_t p = 0; p < state.pair_count(); ++p) {
      const auto& c = state.cursor(p);
      if (!c.open || c.remaining <= 0 || sc[p].available == 0) continue;
      if (chosen == state.pair_count() || sc[p].available < fewest) {
        chosen = p;
        fewest = sc[p].available;
      }
    }
    if (chosen == state.pair_count()) return;
    const int end = state.options().pair_begin[chosen + 1];
    for (int o = state.cursor(chosen).next_option; o < end; ++o) {
      if (!state.option_available(chosen, o)) continue;
      state.assign(chosen, o);
      dfs();
      state.undo_assign();
      if (stop) return;
    }
    state.close(chosen);
    dfs();
    state.reopen(chosen);
  };
  dfs();

  result.proven_optimal = !result.limit_hit || result.objective >= result.bound;
  if (result.proven_optimal) result.bound = result.objective;
  result.wall_time_s = elapsed();
  return result;
}

std::string solver_log(const Topology& topology, const SolverConfig& config, const SolverResult& result) {
  std::ostringstream os;
  os << "mode: " << to_string(config.mode) << "\n";
  os << "multipath_k: " << config.multipath_k << "\n";
  os << "max_path_hops: " << config.max_path_hops << "\n";
  os << "node_order_seed: " << config.node_order_seed << "\n";
  os << "groups: " << topology.group_count() << "\n";
  os << "wavelengths: " << topology.wavelengths() << "\n";
  os << "incumbent trace:\n";
  for (const auto& e : result.trace) os << "  node " << e.node << ": objective " << e.objective << "\n";
  os << "nodes explored: " << result.nodes_explored << "\n";
  os << "objective: " << result.objective << "\n";
  os << "bound: " << result.bound << "\n";
  os << "proven_optimal: " << (result.proven_optimal ? "true" : "false") << "\n";
  if (result.limit_hit) os << "search stopped at the time/node limit; best incumbent returned\n";
  return os.str();
}

}  // namespace awgrpon
