#pragma once

// Data-parallel kernels. Each has a serial reference implementation and an
// OpenMP version that must produce identical results; the serial forms are
// what the unit tests treat as ground truth.

#include <cstdint>
#include <span>
#include <vector>

#include "awgrpon/power_model.hpp"
#include "awgrpon/rwa_model.hpp"
#include "awgrpon/topology.hpp"

namespace awgrpon::kernels {

// Candidate (wavelength, path) options of every ordered pair in CSR form.
struct OptionTable {
  std::vector<int> pair_begin{0};  // options of pair p: [pair_begin[p], pair_begin[p + 1])
  std::vector<int> wavelength;     // per option
  std::vector<int> link_begin{0};  // links of option o: [link_begin[o], link_begin[o + 1])
  std::vector<LinkId> links;

  std::size_t pair_count() const { return pair_begin.size() - 1; }
  std::size_t option_count() const { return wavelength.size(); }
  std::span<const LinkId> option_links(int option) const {
    return {links.data() + link_begin[option], links.data() + link_begin[option + 1]};
  }
};

struct PairCursor {
  int next_option = 0;              // options before this index are no longer eligible
  std::uint64_t used_wavelengths = 0;
  int remaining = 0;                // assignments still allowed for the pair
  bool open = true;
};

struct PairScan {
  int available = 0;                // eligible options whose links are all free
  std::uint64_t wavelengths = 0;    // distinct wavelengths among them

  friend bool operator==(const PairScan&, const PairScan&) = default;
};

// True when every link of `option` is free at its wavelength.
bool option_free(const OptionTable& table, std::span<const std::uint64_t> link_used, int option);

void scan_pairs_serial(const OptionTable& table, std::span<const std::uint64_t> link_used,
                       std::span<const PairCursor> cursors, std::span<PairScan> out);
void scan_pairs_parallel(const OptionTable& table, std::span<const std::uint64_t> link_used,
                         std::span<const PairCursor> cursors, std::span<PairScan> out);

std::vector<ConstraintReport> verify_batch_serial(const Topology& topology, std::span<const RwaSolution> solutions,
                                                  VerifyMode mode);
std::vector<ConstraintReport> verify_batch_parallel(const Topology& topology,
                                                    std::span<const RwaSolution> solutions, VerifyMode mode);

// Fat-Tree power for every even k in `ks`.
std::vector<double> fat_tree_sweep_serial(std::span<const int> ks, FormulaMode mode, const PowerCatalog& catalog);
std::vector<double> fat_tree_sweep_parallel(std::span<const int> ks, FormulaMode mode, const PowerCatalog& catalog);

int max_threads() noexcept;

}  // namespace awgrpon::kernels
