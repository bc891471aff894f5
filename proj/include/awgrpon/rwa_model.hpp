#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "awgrpon/topology.hpp"

namespace awgrpon {

// How AWGR traversals are judged. Cyclic uses each AWGR's configured routing
// function; FreePermutation treats routing as a free per-wavelength permutation.
enum class VerifyMode { Cyclic, FreePermutation };

std::string_view to_string(VerifyMode mode) noexcept;
VerifyMode parse_verify_mode(std::string_view text);

// One lightpath of an ordered group pair. `wavelength` is 0-based.
struct PairAssignment {
  NodeId source;
  NodeId destination;
  int wavelength = 0;
  std::vector<LinkId> path;
  // AWGR labels ("L1_2") in traversal order. For corpus entries that could not
  // be expanded onto the topology, `path` is empty and `resolved` is false.
  std::vector<std::string> awgr_path;
  bool resolved = true;
  // Optional per-link wavelength record; empty means "the assignment wavelength on every hop".
  std::vector<int> hop_wavelengths;

  friend bool operator==(const PairAssignment&, const PairAssignment&) = default;
};

struct RwaSolution {
  int multipath_k = 2;
  std::vector<PairAssignment> assignments;

  friend bool operator==(const RwaSolution&, const RwaSolution&) = default;
};

enum class Constraint : int {
  PairMultiplicity = 0,     // C1
  ReceiverDistinctness,     // C2
  SourceDistinctness,       // C3
  WavelengthContinuity,     // C4
  LinkWavelengthUniqueness, // C5
  AwgrConsistency,          // C6
};
inline constexpr std::size_t kConstraintCount = 6;
std::string_view constraint_label(Constraint c) noexcept;

struct Violation {
  // Indices into RwaSolution::assignments, ascending.
  std::vector<std::size_t> assignments;
  std::optional<LinkId> link;
  std::optional<int> awgr;
  std::optional<int> wavelength;
  std::string message;

  friend bool operator==(const Violation&, const Violation&) = default;
};

struct ConstraintReport {
  std::array<std::vector<Violation>, kConstraintCount> violations;
  // Corpus entries whose AWGR sequence has no realisation in the topology.
  std::vector<std::size_t> path_unresolvable;
  std::size_t objective = 0;
  std::size_t ordered_pairs = 0;
  std::size_t pairs_served = 0;
  std::size_t pairs_at_multipath = 0;

  const std::vector<Violation>& of(Constraint c) const { return violations[static_cast<int>(c)]; }
  std::vector<Violation>& of(Constraint c) { return violations[static_cast<int>(c)]; }
  bool feasible() const;
  std::size_t violation_count() const;

  friend bool operator==(const ConstraintReport&, const ConstraintReport&) = default;
};

// Checks every C1..C6 condition and accumulates all violations.
ConstraintReport verify(const Topology& topology, const RwaSolution& solution, VerifyMode mode);

// Number of assignments (the connection count being maximised).
std::size_t objective(const RwaSolution& solution);

// Wavelengths needed for all-to-all among n_groups endpoints.
int wavelength_budget(int n_groups, int multipath, bool intra_cell_reuse);

// Expands an AWGR label sequence between two groups into link ids; nullopt if
// the topology has no such chain.
std::optional<std::vector<LinkId>> expand_awgr_path(const Topology& topology, const NodeId& source,
                                                    const NodeId& destination,
                                                    std::span<const std::string> awgr_path);

std::vector<std::string> awgr_labels(const Topology& topology, std::span<const LinkId> path);

// Sorts assignments by (source, destination, wavelength, path).
void canonicalize(RwaSolution& solution);

nlohmann::json solution_to_json(const Topology& topology, const RwaSolution& solution);
RwaSolution solution_from_json(const Topology& topology, const nlohmann::json& doc);

nlohmann::json report_to_json(const Topology& topology, const RwaSolution& solution,
                              const ConstraintReport& report);
std::string report_to_text(const Topology& topology, const RwaSolution& solution, const ConstraintReport& report);

}  // namespace awgrpon
