#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "awgrpon/kernels.hpp"
#include "awgrpon/rwa_model.hpp"
#include "awgrpon/topology.hpp"

namespace awgrpon {

struct SolverConfig {
  VerifyMode mode = VerifyMode::FreePermutation;
  int multipath_k = 2;
  int max_path_hops = 4;            // AWGRs per path
  double time_limit_s = 60.0;
  std::uint64_t node_limit = 0;     // 0 = unlimited
  std::uint64_t node_order_seed = 0;
  bool parallel_scan = false;

  void validate() const;
};

struct CandidatePath {
  std::vector<LinkId> links;
  std::vector<int> awgrs;

  friend bool operator==(const CandidatePath&, const CandidatePath&) = default;
};

// All AWGR-simple link paths src -> dst of at most max_path_hops AWGRs that are
// routable at `wavelength` under config.mode, in a deterministic order.
std::vector<CandidatePath> enumerate_paths(const Topology& topology, const NodeId& src, const NodeId& dst,
                                           int wavelength, const SolverConfig& config);

struct IncumbentEvent {
  std::uint64_t node = 0;
  std::size_t objective = 0;
};

struct SolverResult {
  RwaSolution best;
  std::size_t objective = 0;
  std::size_t bound = 0;
  bool proven_optimal = false;
  bool limit_hit = false;
  std::uint64_t nodes_explored = 0;
  double wall_time_s = 0.0;
  std::vector<IncumbentEvent> trace;
};

// Branch-and-bound state: per-pair cursors over the option table plus the
// per-link wavelength occupancy (one bit per wavelength).
class SearchState {
 public:
  SearchState(const Topology& topology, const SolverConfig& config);

  std::size_t pair_count() const { return pairs_.size(); }
  std::size_t option_count() const { return table_.option_count(); }
  const kernels::OptionTable& options() const { return table_; }
  const std::pair<NodeId, NodeId>& pair(std::size_t p) const { return pairs_[p]; }

  std::size_t objective() const { return stack_.size(); }
  // Upper bound on the objective of any completion of this state.
  std::size_t bound() const;
  // Refreshes and returns the per-pair availability scan.
  const std::vector<kernels::PairScan>& scan() const;

  bool option_available(std::size_t pair, int option) const;
  void assign(std::size_t pair, int option);
  void undo_assign();
  void close(std::size_t pair);
  void reopen(std::size_t pair);
  const kernels::PairCursor& cursor(std::size_t pair) const { return cursors_[pair]; }

  RwaSolution solution() const;

 private:
  const Topology* topology_;
  SolverConfig config_;
  std::vector<std::pair<NodeId, NodeId>> pairs_;
  std::vector<int> pair_source_;  // group index of each pair's source
  std::vector<int> pair_dest_;
  std::vector<std::vector<LinkId>> group_uplinks_;
  std::vector<std::vector<LinkId>> group_downlinks_;
  kernels::OptionTable table_;
  std::vector<kernels::PairCursor> cursors_;
  std::vector<std::uint64_t> link_used_;
  struct Placed {
    std::size_t pair;
    int option;
    int prev_next_option;
  };
  std::vector<Placed> stack_;
  mutable std::vector<kernels::PairScan> scan_;
};

SolverResult solve(const Topology& topology, const SolverConfig& config);

// Plain-text solver log: configuration, incumbent trace, final status.
// Contains no timing so identical runs produce identical logs.
std::string solver_log(const Topology& topology, const SolverConfig& config, const SolverResult& result);

}  // namespace awgrpon
