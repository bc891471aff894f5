// awgrpon: build, solve, verify, simulate and cost the two-tier cascaded-AWGR fabric.
//
// Exit codes: 0 success, 1 operational error, 2 usage error, 3 verification found violations.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "awgrpon/error.hpp"
#include "awgrpon/manifest.hpp"
#include "awgrpon/power_model.hpp"
#include "awgrpon/rwa_model.hpp"
#include "awgrpon/rwa_solver.hpp"
#include "awgrpon/sdn_controller.hpp"
#include "awgrpon/topology.hpp"

namespace {

using namespace awgrpon;

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitUsage = 2;
constexpr int kExitViolations = 3;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::InvalidParameter, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::InvalidParameter, "cannot write '" + path + "'");
  out << contents;
}

nlohmann::json parse_json(const std::string& text, const std::string& what) {
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, what + ": " + e.what());
  }
}

// Collects a command's outputs and writes them plus the run manifest.
class Run {
 public:
  explicit Run(std::string command) { manifest_.command = std::move(command); }

  RunManifest& manifest() { return manifest_; }

  std::string input(const std::string& path) {
    std::string text = read_file(path);
    manifest_.add_input(path, text);
    return text;
  }

  void output(const std::string& path, const std::string& contents) {
    if (path.empty() || path == "-") {
      stdout_ += contents;
      return;
    }
    write_file(path, contents);
    manifest_.add_output(path, contents);
    if (primary_out_.empty()) primary_out_ = path;
  }

  void print(const std::string& text) { stdout_ += text; }

  void finish(const std::string& manifest_path) {
    std::cout << stdout_ << std::flush;
    if (!stdout_.empty()) manifest_.add_output("<stdout>", stdout_);
    const std::string doc = manifest_.to_json().dump(2) + "\n";
    std::string path = manifest_path;
    if (path.empty() && !primary_out_.empty()) path = primary_out_ + ".manifest.json";
    if (path.empty()) {
      std::cerr << manifest_.to_json().dump() << "\n";
    } else {
      write_file(path, doc);
    }
  }

 private:
  RunManifest manifest_;
  std::string stdout_;
  std::string primary_out_;
};

struct BuildArgs {
  TopologyParams params;
  std::vector<std::string> extra_links;
  std::string out;
  std::string manifest;
};

int cmd_build(const BuildArgs& args) {
  Run run("build");
  TopologyParams p = args.params;
  for (const auto& spec : args.extra_links) {
    auto comma = spec.find(',');
    if (comma == std::string::npos) throw Error(ErrorCode::InvalidParameter, "--extra-link expects FROM,TO");
    p.extra_links.emplace_back(parse_node(spec.substr(0, comma)), parse_node(spec.substr(comma + 1)));
  }
  run.manifest().config = {{"cells", p.cells},
                           {"olts", p.olts},
                           {"awgrs_per_level", p.awgrs_per_level},
                           {"ports", p.awgr_ports},
                           {"wavelengths", p.wavelengths},
                           {"uplinks_per_cell", p.uplinks_per_cell},
                           {"downlinks_per_cell", p.downlinks_per_cell},
                           {"extra_links", args.extra_links}};
  const Topology t = Topology::build(p);
  run.output(args.out, t.to_json().dump(2) + "\n");
  run.finish(args.manifest);
  return kExitOk;
}

struct SolveArgs {
  std::string topology;
  std::string mode = "free";
  SolverConfig config;
  std::string out;
  std::string log;
  std::string manifest;
};

int cmd_solve(SolveArgs args) {
  Run run("solve");
  const Topology t = Topology::from_json(parse_json(run.input(args.topology), "topology"));
  args.config.mode = parse_verify_mode(args.mode);
  run.manifest().config = {{"mode", to_string(args.config.mode)},
                           {"multipath_k", args.config.multipath_k},
                           {"max_path_hops", args.config.max_path_hops},
                           {"time_limit_s", args.config.time_limit_s},
                           {"node_limit", args.config.node_limit},
                           {"seed", args.config.node_order_seed},
                           {"parallel_scan", args.config.parallel_scan}};
  const SolverResult result = solve(t, args.config);
  const auto check = verify(t, result.best, args.config.mode);
  if (!check.feasible()) {
    throw Error(ErrorCode::InfeasibleSolution, "solver produced a solution that fails verification");
  }
  run.output(args.out, solution_to_json(t, result.best).dump(2) + "\n");
  std::string log = solver_log(t, args.config, result);
  if (!args.log.empty()) {
    run.output(args.log, log);
  } else if (!args.out.empty() && args.out != "-") {
    run.output(args.out + ".log", log);
  } else {
    std::cerr << log;
  }
  std::cerr << "objective " << result.objective << " (bound " << result.bound << ", "
            << (result.proven_optimal ? "proven optimal" : "not proven optimal") << ") in " << result.wall_time_s
            << " s, " << result.nodes_explored << " nodes\n";
  run.finish(args.manifest);
  return kExitOk;
}

struct VerifyArgs {
  std::string topology;
  std::string solution;
  std::string mode = "free";
  std::string json_out;
  bool strict = false;
  std::string manifest;
};

int cmd_verify(const VerifyArgs& args) {
  Run run("verify");
  const Topology t = Topology::from_json(parse_json(run.input(args.topology), "topology"));
  const RwaSolution s = solution_from_json(t, parse_json(run.input(args.solution), "solution"));
  const VerifyMode mode = parse_verify_mode(args.mode);
  run.manifest().config = {{"mode", to_string(mode)}, {"strict", args.strict}};
  const ConstraintReport report = verify(t, s, mode);
  run.print(report_to_text(t, s, report));
  if (!args.json_out.empty()) run.output(args.json_out, report_to_json(t, s, report).dump(2) + "\n");
  run.finish(args.manifest);
  const bool failed = !report.feasible() || (args.strict && !report.path_unresolvable.empty());
  return failed ? kExitViolations : kExitOk;
}

struct SdnArgs {
  std::string topology;
  std::string solution;
  std::string trace;
  std::string report_out;
  std::string state_out;
  std::string format = "json";
  std::string mode = "free";
  SdnConfig config;
  std::string manifest;
};

int cmd_sdn_sim(const SdnArgs& args) {
  Run run("sdn-sim");
  Topology t = Topology::from_json(parse_json(run.input(args.topology), "topology"));
  RwaSolution s = solution_from_json(t, parse_json(run.input(args.solution), "solution"));
  SdnConfig cfg = args.config;
  cfg.mode = parse_verify_mode(args.mode);
  if (args.format != "json" && args.format != "csv") {
    throw Error(ErrorCode::InvalidParameter, "--format must be json or csv");
  }
  run.manifest().config = {{"servers_per_cell", cfg.servers_per_cell},
                           {"force", cfg.force},
                           {"anchor_to_olt", cfg.anchor_to_olt},
                           {"mode", to_string(cfg.mode)},
                           {"format", args.format}};
  std::vector<TraceEvent> events;
  if (!args.trace.empty()) {
    std::istringstream in(run.input(args.trace));
    events = parse_trace(in);
  }
  SdnController controller(std::move(t), std::move(s), cfg);
  for (const auto& e : events) {
    std::string outcome = controller.apply(e);
    std::ostringstream line;
    line << "t=" << e.t << " ";
    if (e.op == TraceEvent::Op::Request) {
      line << "request " << e.a << "->" << e.b;
    } else {
      line << "release " << e.grant_id;
    }
    run.print(line.str() + ": " + outcome + "\n");
  }
  const LoadReport report = controller.load_report();
  const Topology& topo = controller.topology();
  const std::string rendered = args.format == "csv" ? load_report_csv(topo, report)
                                                    : load_report_json(topo, report).dump(2) + "\n";
  run.output(args.report_out, rendered);
  if (!args.state_out.empty()) run.output(args.state_out, controller.snapshot().dump(2) + "\n");
  run.finish(args.manifest);
  return kExitOk;
}

struct PowerArgs {
  std::string design = "fat-tree";
  bool compare = false;
  int k = 48;
  std::string formula = "derived";
  long long servers = -1;
  long long olt_ports = -1;
  long long onus = -1;
  PowerCatalog catalog;
  std::string csv_out;
  std::string manifest;
};

std::string watts(double w) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(1) << w;
  return os.str();
}

int cmd_power(const PowerArgs& args) {
  Run run("power");
  const FormulaMode mode = parse_formula_mode(args.formula);
  const FatTreeConfig fat{args.k, mode};
  CascadedAwgrConfig pon;
  pon.servers = args.servers >= 0 ? args.servers : (args.compare ? fat.servers() : 512);
  pon.olt_ports = args.olt_ports >= 0 ? args.olt_ports : default_olt_ports(pon.servers);
  if (args.onus >= 0) pon.onus = args.onus;
  const auto& c = args.catalog;
  run.manifest().config = {{"design", args.compare ? "compare" : args.design},
                           {"k", args.k},
                           {"formula", to_string(mode)},
                           {"servers", pon.servers},
                           {"olt_ports", pon.olt_ports},
                           {"onus", pon.onu_count()},
                           {"catalog",
                            {{"switch_port_w", c.switch_port_w},
                             {"server_transceiver_w", c.server_transceiver_w},
                             {"olt_port_w", c.olt_port_w},
                             {"onu_w", c.onu_w}}}};
  std::string csv = power_csv_header();
  if (args.compare) {
    const PowerReport r = savings_report(fat, pon, c);
    std::ostringstream os;
    os << "fat-tree k=" << fat.k << " (" << r.fat_tree_servers << " servers, " << to_string(mode)
       << "): " << watts(r.fat_tree_w) << " W\n";
    os << "cascaded-awgr (" << r.cascaded_servers << " servers): " << watts(r.cascaded_w) << " W\n";
    os << "computed savings: " << std::fixed << std::setprecision(2) << 100.0 * r.savings << " %";
    if (r.reference_savings_pct) {
      os << "   published reference: " << std::setprecision(1) << *r.reference_savings_pct << " %";
    } else {
      os << "   published reference: none at this server count";
    }
    os << "\n";
    if (r.server_mismatch) {
      os << "warning: server counts differ (" << r.fat_tree_servers << " vs " << r.cascaded_servers << ")\n";
    }
    run.print(os.str());
    csv += power_csv_rows(r, mode);
  } else if (args.design == "fat-tree") {
    const double w = fat_tree_power(fat, c);
    run.print("fat-tree k=" + std::to_string(fat.k) + " (" + std::to_string(fat.servers()) + " servers, " +
              std::string(to_string(mode)) + "): " + watts(w) + " W\n");
    csv += "fat-tree," + std::to_string(fat.servers()) + "," + std::string(to_string(mode)) + "," + watts(w) +
           ",,\"k=" + std::to_string(fat.k) + "\"\n";
  } else if (args.design == "cascaded") {
    const double w = cascaded_power(pon, c);
    run.print("cascaded-awgr (" + std::to_string(pon.servers) + " servers, " + std::to_string(pon.olt_ports) +
              " OLT ports, " + std::to_string(pon.onu_count()) + " ONUs): " + watts(w) + " W\n");
    csv += "cascaded-awgr," + std::to_string(pon.servers) + ",," + watts(w) + ",,\"N_t=" +
           std::to_string(pon.olt_ports) + " N_U=" + std::to_string(pon.onu_count()) + "\"\n";
  } else {
    throw Error(ErrorCode::InvalidParameter, "--design must be fat-tree or cascaded");
  }
  if (!args.csv_out.empty()) run.output(args.csv_out, csv);
  run.finish(args.manifest);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-tier cascaded-AWGR PON fabric: topology, RWA solver, SDN simulation, power model"};
  app.set_version_flag("--version", std::string("awgrpon ") + std::string(kToolVersion) +
                                        " (topology/solution/report format " + std::to_string(kFormatVersion) +
                                        ")");
  app.require_subcommand(1);

  BuildArgs build;
  auto* b = app.add_subcommand("build", "Build a topology and write it as JSON");
  b->add_option("--cells", build.params.cells, "Number of cells")->required();
  b->add_option("--olts", build.params.olts, "Number of OLTs")->required();
  b->add_option("--awgrs-per-level", build.params.awgrs_per_level, "AWGRs in each level")->required();
  b->add_option("--ports", build.params.awgr_ports, "Ports per AWGR")->required();
  b->add_option("--wavelengths", build.params.wavelengths, "Number of wavelengths")->required();
  b->add_option("--uplinks", build.params.uplinks_per_cell, "Uplinks per cell")->capture_default_str();
  b->add_option("--downlinks", build.params.downlinks_per_cell, "Downlinks per cell")->capture_default_str();
  b->add_option("--extra-link", build.extra_links, "Additional link FROM,TO (node descriptors)");
  b->add_option("--out", build.out, "Output file (default stdout)");
  b->add_option("--manifest", build.manifest, "Run manifest path");

  SolveArgs solve_args;
  auto* s = app.add_subcommand("solve", "Maximise connectivity by branch and bound");
  s->add_option("--topology", solve_args.topology, "Topology JSON")->required();
  s->add_option("--mode", solve_args.mode, "free | cyclic")->capture_default_str();
  s->add_option("--multipath", solve_args.config.multipath_k, "Assignments per ordered pair")->capture_default_str();
  s->add_option("--max-hops", solve_args.config.max_path_hops, "Maximum AWGRs per path")->capture_default_str();
  s->add_option("--time-limit", solve_args.config.time_limit_s, "Seconds")->capture_default_str();
  s->add_option("--node-limit", solve_args.config.node_limit, "Search nodes (0 = unlimited)");
  s->add_option("--seed", solve_args.config.node_order_seed, "Option order seed (0 = natural order)");
  s->add_flag("--parallel", solve_args.config.parallel_scan, "Use the OpenMP availability scan");
  s->add_option("--out", solve_args.out, "Solution file (default stdout)");
  s->add_option("--log", solve_args.log, "Solver log file (default <out>.log)");
  s->add_option("--manifest", solve_args.manifest, "Run manifest path");

  VerifyArgs verify_args;
  auto* v = app.add_subcommand("verify", "Check a solution against the constraint system");
  v->add_option("--topology", verify_args.topology, "Topology JSON")->required();
  v->add_option("--solution", verify_args.solution, "Solution JSON")->required();
  v->add_option("--mode", verify_args.mode, "free | cyclic")->capture_default_str();
  v->add_option("--json", verify_args.json_out, "Write the JSON report here");
  v->add_flag("--strict", verify_args.strict, "Treat unresolvable corpus paths as violations");
  v->add_option("--manifest", verify_args.manifest, "Run manifest path");

  SdnArgs sdn;
  auto* d = app.add_subcommand("sdn-sim", "Replay a request/release trace through the SDN controller");
  d->add_option("--topology", sdn.topology, "Topology JSON")->required();
  d->add_option("--solution", sdn.solution, "Solution JSON")->required();
  d->add_option("--servers-per-cell", sdn.config.servers_per_cell, "Servers per cell")->capture_default_str();
  d->add_option("--trace", sdn.trace, "JSON-lines trace");
  d->add_option("--report-out", sdn.report_out, "Occupancy report (default stdout)");
  d->add_option("--state-out", sdn.state_out, "Final controller snapshot");
  d->add_option("--format", sdn.format, "json | csv")->capture_default_str();
  d->add_option("--mode", sdn.mode, "Verification mode for the solution")->capture_default_str();
  d->add_flag("--force", sdn.config.force, "Accept a solution with violations");
  d->add_flag("--anchor", sdn.config.anchor_to_olt, "Anchor each grant on the least-loaded OLT");
  d->add_option("--manifest", sdn.manifest, "Run manifest path");

  PowerArgs power;
  auto* p = app.add_subcommand("power", "Fat-Tree vs cascaded-AWGR power");
  p->add_option("--design", power.design, "fat-tree | cascaded")->capture_default_str();
  p->add_flag("--compare", power.compare, "Compare both designs and print savings");
  p->add_option("--k", power.k, "Fat-Tree pods")->capture_default_str();
  p->add_option("--formula", power.formula, "literal | derived")->capture_default_str();
  p->add_option("--servers", power.servers, "Cascaded design servers");
  p->add_option("--olt-ports", power.olt_ports, "OLT ports (default scales 512 ports per 512 servers)");
  p->add_option("--onus", power.onus, "Tunable ONUs (default one per server)");
  p->add_option("--switch-port-w", power.catalog.switch_port_w, "Watts per switch port")->capture_default_str();
  p->add_option("--transceiver-w", power.catalog.server_transceiver_w, "Watts per server transceiver")
      ->capture_default_str();
  p->add_option("--olt-port-w", power.catalog.olt_port_w, "Watts per OLT port")->capture_default_str();
  p->add_option("--onu-w", power.catalog.onu_w, "Watts per tunable ONU")->capture_default_str();
  p->add_option("--csv-out", power.csv_out, "CSV report path");
  p->add_option("--manifest", power.manifest, "Run manifest path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*b) return cmd_build(build);
    if (*s) return cmd_solve(solve_args);
    if (*v) return cmd_verify(verify_args);
    if (*d) return cmd_sdn_sim(sdn);
    if (*p) return cmd_power(power);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitUsage;
}
