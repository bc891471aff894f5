#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace awgrpon {

// Device power figures in watts.
struct PowerCatalog {
  double switch_port_w = 30.0;        // Cisco Catalyst 3850, per port
  double server_transceiver_w = 3.0;
  double olt_port_w = 14.3;           // 10 Gb/s OLT port
  double onu_w = 2.5;                 // 10 Gb/s tunable ONU

  void validate() const;
};

// PaperLiteral evaluates the published Fat-Tree expression term by term;
// DerivedStandard counts every port of all 5k^2/4 switches.
enum class FormulaMode { PaperLiteral, DerivedStandard };

std::string_view to_string(FormulaMode mode) noexcept;
FormulaMode parse_formula_mode(std::string_view text);

struct FatTreeConfig {
  int k = 4;
  FormulaMode formula = FormulaMode::DerivedStandard;

  void validate() const;
  long long servers() const { return static_cast<long long>(k) * k * k / 4; }
};

struct CascadedAwgrConfig {
  long long servers = 512;
  long long olt_ports = 512;
  std::optional<long long> onus;  // defaults to one tunable ONU per server

  long long onu_count() const { return onus.value_or(servers); }
  void validate() const;
};

// OLT ports of the reference build (4 OLTs x 16 XG-PON cards x 8 ports),
// scaled with the server count relative to 512 servers.
long long default_olt_ports(long long servers);

double fat_tree_power(const FatTreeConfig& cfg, const PowerCatalog& catalog);
double cascaded_power(const CascadedAwgrConfig& cfg, const PowerCatalog& catalog);

struct ReferenceTarget {
  long long servers;
  double savings_pct;
};
// Published savings points (512, 27,648 and 221,184 servers).
const std::vector<ReferenceTarget>& reference_targets();
std::optional<double> reference_savings_pct(long long servers);

struct PowerReport {
  double fat_tree_w = 0.0;
  double cascaded_w = 0.0;
  double savings = 0.0;  // 1 - P_C / P_F
  long long fat_tree_servers = 0;
  long long cascaded_servers = 0;
  bool server_mismatch = false;
  std::optional<double> reference_savings_pct;
  std::vector<std::string> assumptions;
};

PowerReport savings_report(const FatTreeConfig& fat, const CascadedAwgrConfig& pon, const PowerCatalog& catalog);

// CSV with columns design,servers,formula_mode,watts,savings_pct,assumptions.
std::string power_csv_header();
std::string power_csv_rows(const PowerReport& report, FormulaMode mode);
nlohmann::json power_report_to_json(const PowerReport& report, FormulaMode mode);

}  // namespace awgrpon
