#include "awgrpon/power_model.hpp"

#include <cmath>
#include <iomanip>
#include <sstream>

#include "awgrpon/error.hpp"

namespace awgrpon {

namespace {

constexpr long long kReferenceServers = 512;
constexpr long long kReferenceOltPorts = 4 * 16 * 8;

std::string fixed(double v, int digits) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(digits) << v;
  return os.str();
}

std::string join(const std::vector<std::string>& items, const char* sep) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += sep;
    out += items[i];
  }
  return out;
}

std::string csv_quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

void PowerCatalog::validate() const {
  for (double v : {switch_port_w, server_transceiver_w, olt_port_w, onu_w}) {
    if (!(v >= 0.0)) throw Error(ErrorCode::InvalidParameter, "device power must be >= 0");
  }
}

std::string_view to_string(FormulaMode mode) noexcept {
  return mode == FormulaMode::PaperLiteral ? "paper-literal" : "derived-standard";
}

FormulaMode parse_formula_mode(std::string_view text) {
  if (text == "literal" || text == "paper-literal") return FormulaMode::PaperLiteral;
  if (text == "derived" || text == "derived-standard") return FormulaMode::DerivedStandard;
  throw Error(ErrorCode::InvalidParameter, "unknown formula '" + std::string(text) + "' (literal | derived)");
}

void FatTreeConfig::validate() const {
  if (k < 2 || k % 2 != 0) throw Error(ErrorCode::InvalidK, "k must be even and >= 2, got " + std::to_string(k));
}

void CascadedAwgrConfig::validate() const {
  if (servers < 0 || olt_ports < 0 || onu_count() < 0) {
    throw Error(ErrorCode::InvalidParameter, "device counts must be >= 0");
  }
}

long long default_olt_ports(long long servers) {
  return (servers * kReferenceOltPorts + kReferenceServers - 1) / kReferenceServers;
}

double fat_tree_power(const FatTreeConfig& cfg, const PowerCatalog& catalog) {
  cfg.validate();
  catalog.validate();
  const long long k = cfg.k;
  const double transceivers = catalog.server_transceiver_w * static_cast<double>(k * k * k / 4);
  if (cfg.formula == FormulaMode::PaperLiteral) {
    return transceivers + catalog.switch_port_w * static_cast<double>(k / 2) +
           catalog.switch_port_w * static_cast<double>(k / 2) + catalog.switch_port_w * static_cast<double>(k * k / 4);
  }
  // k^2/4 core + k pods x (k/2 aggregation + k/2 edge) switches, k ports each.
  const long long switches = k * k / 4 + k * k;
  return transceivers + catalog.switch_port_w * static_cast<double>(switches * k);
}

double cascaded_power(const CascadedAwgrConfig& cfg, const PowerCatalog& catalog) {
  cfg.validate();
  catalog.validate();
  return catalog.server_transceiver_w * static_cast<double>(cfg.servers) +
         catalog.olt_port_w * static_cast<double>(cfg.olt_ports) + catalog.onu_w * static_cast<double>(cfg.onu_count());
}

const std::vector<ReferenceTarget>& reference_targets() {
  static const std::vector<ReferenceTarget> targets{{512, 75.7}, {27648, 67.4}, {221184, 44.2}};
  return targets;
}

std::optional<double> reference_savings_pct(long long servers) {
  for (const auto& t : reference_targets()) {
    if (t.servers == servers) return t.savings_pct;
  }
  return std::nullopt;
}

PowerReport savings_report(const FatTreeConfig& fat, const CascadedAwgrConfig& pon, const PowerCatalog& catalog) {
  PowerReport r;
  r.fat_tree_w = fat_tree_power(fat, catalog);
  r.cascaded_w = cascaded_power(pon, catalog);
  if (r.fat_tree_w == 0.0) throw Error(ErrorCode::DivisionByZero, "Fat-Tree power is zero");
  r.savings = 1.0 - r.cascaded_w / r.fat_tree_w;
  r.fat_tree_servers = fat.servers();
  r.cascaded_servers = pon.servers;
  r.server_mismatch = r.fat_tree_servers != r.cascaded_servers;
  r.reference_savings_pct = reference_savings_pct(pon.servers);

  const long long k = fat.k;
  r.assumptions.push_back("fat-tree formula " + std::string(to_string(fat.formula)));
  if (fat.formula == FormulaMode::DerivedStandard) {
    r.assumptions.push_back("fat-tree k=" + std::to_string(k) + ": " + std::to_string(k * k / 4 + k * k) +
                            " switches x " + std::to_string(k) + " ports");
  } else {
    r.assumptions.push_back("fat-tree k=" + std::to_string(k) + ": switch-port terms k/2 + k/2 + k^2/4 as printed");
  }
  r.assumptions.push_back("cascaded N_s=" + std::to_string(pon.servers) + " N_t=" + std::to_string(pon.olt_ports) +
                          " N_U=" + std::to_string(pon.onu_count()));
  r.assumptions.push_back("catalog switch_port=" + fixed(catalog.switch_port_w, 1) +
                          "W transceiver=" + fixed(catalog.server_transceiver_w, 1) +
                          "W olt_port=" + fixed(catalog.olt_port_w, 1) + "W onu=" + fixed(catalog.onu_w, 1) + "W");
  if (r.server_mismatch) {
    r.assumptions.push_back("server count mismatch: fat-tree " + std::to_string(r.fat_tree_servers) +
                            " vs cascaded " + std::to_string(r.cascaded_servers));
  }
  return r;
}

std::string power_csv_header() { return "design,servers,formula_mode,watts,savings_pct,assumptions\n"; }

std::string power_csv_rows(const PowerReport& r, FormulaMode mode) {
  const std::string assumptions = csv_quote(join(r.assumptions, "; "));
  std::ostringstream os;
  os << "fat-tree," << r.fat_tree_servers << "," << to_string(mode) << "," << fixed(r.fat_tree_w, 1) << ",,"
     << assumptions << "\n";
  os << "cascaded-awgr," << r.cascaded_servers << "," << to_string(mode) << "," << fixed(r.cascaded_w, 1) << ","
     << fixed(100.0 * r.savings, 2) << "," << assumptions << "\n";
  if (r.reference_savings_pct) {
    os << "published-reference," << r.cascaded_servers << ",,," << fixed(*r.reference_savings_pct, 1)
       << ",\"reference target, not a computed value\"\n";
  }
  return os.str();
}

nlohmann::json power_report_to_json(const PowerReport& r, FormulaMode mode) {
  nlohmann::json j;
  j["formula_mode"] = to_string(mode);
  j["fat_tree_w"] = r.fat_tree_w;
  j["fat_tree_servers"] = r.fat_tree_servers;
  j["cascaded_w"] = r.cascaded_w;
  j["cascaded_servers"] = r.cascaded_servers;
  j["savings_pct"] = 100.0 * r.savings;
  j["server_mismatch"] = r.server_mismatch;
  j["reference_savings_pct"] = r.reference_savings_pct ? nlohmann::json(*r.reference_savings_pct) : nlohmann::json();
  j["assumptions"] = r.assumptions;
  return j;
}

}  // namespace awgrpon
