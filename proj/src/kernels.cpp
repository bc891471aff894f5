#include "awgrpon/kernels.hpp"

#include <exception>

#ifdef AWGRPON_HAS_OPENMP
#include <omp.h>
#endif

namespace awgrpon::kernels {

bool option_free(const OptionTable& table, std::span<const std::uint64_t> link_used, int option) {
  const std::uint64_t bit = std::uint64_t{1} << table.wavelength[option];
  for (LinkId l : table.option_links(option)) {
    if (link_used[l] & bit) return false;
  }
  return true;
}

namespace {

PairScan scan_one(const OptionTable& table, std::span<const std::uint64_t> link_used, const PairCursor& c,
                  std::size_t pair) {
  PairScan s;
  if (!c.open || c.remaining <= 0) return s;
  const int end = table.pair_begin[pair + 1];
  for (int o = c.next_option; o < end; ++o) {
    const std::uint64_t bit = std::uint64_t{1} << table.wavelength[o];
    if (c.used_wavelengths & bit) continue;
    if (!option_free(table, link_used, o)) continue;
    ++s.available;
    s.wavelengths |= bit;
  }
  return s;
}

// Exceptions may not leave an OpenMP region; keep the lowest-index one.
void rethrow_first(const std::vector<std::exception_ptr>& errors) {
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace

void scan_pairs_serial(const OptionTable& table, std::span<const std::uint64_t> link_used,
                       std::span<const PairCursor> cursors, std::span<PairScan> out) {
  for (std::size_t p = 0; p < cursors.size(); ++p) out[p] = scan_one(table, link_used, cursors[p], p);
}

void scan_pairs_parallel(const OptionTable& table, std::span<const std::uint64_t> link_used,
                         std::span<const PairCursor> cursors, std::span<PairScan> out) {
  const auto n = static_cast<long>(cursors.size());
#pragma omp parallel for schedule(dynamic, 4)
  for (long p = 0; p < n; ++p) out[p] = scan_one(table, link_used, cursors[p], static_cast<std::size_t>(p));
}

std::vector<ConstraintReport> verify_batch_serial(const Topology& topology, std::span<const RwaSolution> solutions,
                                                  VerifyMode mode) {
  std::vector<ConstraintReport> reports;
  reports.reserve(solutions.size());
  for (const auto& s : solutions) reports.push_back(verify(topology, s, mode));
  return reports;
}

std::vector<ConstraintReport> verify_batch_parallel(const Topology& topology,
                                                    std::span<const RwaSolution> solutions, VerifyMode mode) {
  std::vector<ConstraintReport> reports(solutions.size());
  std::vector<std::exception_ptr> errors(solutions.size());
  const auto n = static_cast<long>(solutions.size());
#pragma omp parallel for schedule(dynamic)
  for (long i = 0; i < n; ++i) {
    try {
      reports[i] = verify(topology, solutions[i], mode);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  rethrow_first(errors);
  return reports;
}

std::vector<double> fat_tree_sweep_serial(std::span<const int> ks, FormulaMode mode, const PowerCatalog& catalog) {
  std::vector<double> watts(ks.size());
  for (std::size_t i = 0; i < ks.size(); ++i) watts[i] = fat_tree_power({ks[i], mode}, catalog);
  return watts;
}

std::vector<double> fat_tree_sweep_parallel(std::span<const int> ks, FormulaMode mode, const PowerCatalog& catalog) {
  std::vector<double> watts(ks.size());
  std::vector<std::exception_ptr> errors(ks.size());
  const auto n = static_cast<long>(ks.size());
#pragma omp parallel for schedule(static)
  for (long i = 0; i < n; ++i) {
    try {
      watts[i] = fat_tree_power({ks[i], mode}, catalog);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  rethrow_first(errors);
  return watts;
}

int max_threads() noexcept {
#ifdef AWGRPON_HAS_OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

}  // namespace awgrpon::kernels
