#include "cli.hpp"

#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>

#include "CLI11.hpp"
#include "nocf/checker.hpp"
#include "nocf/config.hpp"
#include "nocf/scenario.hpp"
#include "nocf/system.hpp"
#include "nocf/trace.hpp"

namespace nocf::cli {

namespace {

enum class Format { Text, Structured };

struct Invocation {
  std::string config;
  std::vector<std::string> sets;
  std::string out_path;
  std::string format = "text";
  std::uint64_t cycles = 0;
  unsigned threads = 0;
  std::string policy;
  std::string scenario;
};

Format format_of(const Invocation& inv) {
  return inv.format == "structured" ? Format::Structured : Format::Text;
}

/// Where output goes: the --out file, or the given stream.
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) : os_(&fallback) {
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path, std::ios::binary | std::ios::trunc);
      if (!*file_) throw ConfigError({path + ": cannot open for writing"});
      os_ = file_.get();
    }
  }
  std::ostream& operator*() { return *os_; }
  bool to_file() const { return file_ != nullptr; }

 private:
  std::unique_ptr<std::ofstream> file_;
  std::ostream* os_;
};

ConfigDocument load(const Invocation& inv, std::map<std::string, std::string>& overrides) {
  ConfigDocument doc = load_config_file(inv.config);
  for (const auto& s : inv.sets) {
    apply_override(doc, s);
    const auto eq = s.find('=');
    overrides[s.substr(0, eq)] = s.substr(eq + 1);
  }
  return doc;
}

std::map<std::string, std::string> header_fields(const std::string& cmd, const Invocation& inv) {
  return {{"tool", "nocf"}, {"format_version", "1"}, {"command", cmd}, {"config", inv.config}};
}

int cmd_validate(const Invocation& inv, std::ostream& out) {
  std::map<std::string, std::string> overrides;
  const ConfigDocument doc = load(inv, overrides);
  const Topology topo = load_topology(doc);
  System sys(topo);
  if (doc.root["check"]) (void)load_check_config(doc);
  out << inv.config << ": ok (" << topo.masters.size() << " masters, " << topo.port_count()
      << " interposers, " << topo.slaves.size() << " slaves, " << topo.grants.size()
      << " grant entries)\n";
  return kOk;
}

int cmd_sim(const Invocation& inv, std::ostream& out) {
  std::map<std::string, std::string> overrides;
  const ConfigDocument doc = load(inv, overrides);
  const Topology topo = load_topology(doc);
  ConfigReader rd;
  std::uint64_t cycles = 1000;
  if (const YAML::Node s = doc.root["sim"]) cycles = rd.u64(s["cycles"], "sim.cycles", cycles);
  rd.finish();
  if (inv.cycles) cycles = inv.cycles;

  System sys(topo);
  Sink sink(inv.out_path, out);
  const Format fmt = format_of(inv);
  auto fields = header_fields("sim", inv);
  fields["seed"] = std::to_string(topo.seed);
  fields["cycles"] = std::to_string(cycles);
  fields["kernel_latency"] = std::to_string(topo.kernel_latency);
  fields["interposers"] = std::to_string(topo.port_count());

  if (fmt == Format::Structured) {
    *sink << header_line(fields, overrides) << "\n";
  } else {
    *sink << "# nocf sim";
    for (const auto& [k, v] : fields) *sink << " " << k << "=" << v;
    for (const auto& [k, v] : overrides) *sink << " set:" << k << "=" << v;
    *sink << "\n";
  }
  const SimStats stats = sys.run(cycles, [&](const TraceRecord& rec) {
    if (fmt == Format::Structured) {
      *sink << trace_line(rec) << "\n";
    } else if (rec.has_events()) {
      *sink << trace_text(rec) << "\n";
    }
  });
  if (fmt == Format::Structured) {
    *sink << stats_line(stats) << "\n";
  } else {
    *sink << stats_text(stats) << "\n";
  }
  if (sink.to_file()) out << stats_text(stats) << "\n";
  return stats.approval_mismatches == 0 ? kOk : kViolation;
}

int cmd_check(const Invocation& inv, std::ostream& out) {
  std::map<std::string, std::string> overrides;
  const ConfigDocument doc = load(inv, overrides);
  CheckConfig cfg = load_check_config(doc);
  if (inv.threads) cfg.threads = inv.threads;
  const CheckResult r = check(cfg);
  Sink sink(inv.out_path, out);
  auto fields = header_fields("check", inv);
  fields["variant"] = std::string(to_string(cfg.variant));
  fields["depth"] = std::to_string(cfg.depth);
  fields["mode"] = std::string(to_string(cfg.mode));
  fields["threads"] = std::to_string(cfg.threads);
  if (format_of(inv) == Format::Structured) {
    *sink << header_line(fields, overrides) << "\n";
    *sink << report_structured(cfg, r);
  } else {
    *sink << "# nocf check";
    for (const auto& [k, v] : fields) *sink << " " << k << "=" << v;
    for (const auto& [k, v] : overrides) *sink << " set:" << k << "=" << v;
    *sink << "\n" << report_text(cfg, r);
  }
  if (sink.to_file()) {
    out << (r.verified() ? "verified" : r.violated() ? "violation" : "inconclusive") << " ("
        << r.stats.states << " states)\n";
  }
  if (r.violated()) return kViolation;
  if (r.inconclusive()) return kInconclusive;
  return kOk;
}

int cmd_scenario(const Invocation& inv_in, std::ostream& out, std::ostream& err) {
  Invocation inv = inv_in;
  if (inv.scenario != "gpu" && inv.scenario != "isolation") {
    err << "error: unknown scenario '" << inv.scenario << "' (gpu, isolation)\n";
    return kConfigError;
  }
  if (inv.config.empty()) inv.config = default_config_dir() + "/" + inv.scenario + ".yaml";
  if (!inv.policy.empty()) inv.sets.push_back("scenario.policy=" + inv.policy);
  if (inv.cycles) inv.sets.push_back("scenario.cycles=" + std::to_string(inv.cycles));
  std::map<std::string, std::string> overrides;
  const ConfigDocument doc = load(inv, overrides);

  Sink sink(inv.out_path, out);
  const Format fmt = format_of(inv);
  auto fields = header_fields("scenario", inv);
  fields["scenario"] = inv.scenario;
  auto trace = [&](const TraceRecord& rec) {
    if (fmt == Format::Structured) {
      *sink << trace_line(rec) << "\n";
    } else if (rec.has_events()) {
      *sink << trace_text(rec) << "\n";
    }
  };
  auto header = [&] {
    if (fmt == Format::Structured) {
      *sink << header_line(fields, overrides) << "\n";
    } else {
      *sink << "# nocf scenario";
      for (const auto& [k, v] : fields) *sink << " " << k << "=" << v;
      for (const auto& [k, v] : overrides) *sink << " set:" << k << "=" << v;
      *sink << "\n";
    }
  };

  if (inv.scenario == "gpu") {
    const GpuScenarioParams p = load_gpu_params(doc);
    fields["seed"] = std::to_string(p.seed);
    fields["policy"] = std::string(to_string(p.policy));
    header();
    const GpuScenarioResult r = run_gpu_scenario(p, trace);
    if (fmt == Format::Structured) {
      *sink << stats_line(r.stats) << "\n" << gpu_report_line(p, r) << "\n";
    } else {
      *sink << gpu_report_text(p, r);
    }
    if (sink.to_file()) out << gpu_report_text(p, r);
    const bool contained = !r.injected && r.victim_unchanged;
    return p.policy == GpuPolicy::Restricted && !contained ? kViolation : kOk;
  }

  const IsolationParams p = load_isolation_params(doc);
  fields["cycles"] = std::to_string(p.cycles);
  header();
  const IsolationResult r = run_isolation_scenario(doc, p, trace);
  if (fmt == Format::Structured) {
    *sink << stats_line(r.stats) << "\n" << isolation_report_line(r) << "\n";
  } else {
    *sink << isolation_report_text(r);
  }
  if (sink.to_file()) out << isolation_report_text(r);
  bool clean = r.cross_boundary_forwards == 0 && r.in_bounds_decode_errors == 0;
  for (const auto& pr : r.probes) clean = clean && pr.decode_errors == 1;
  return clean ? kOk : kViolation;
}

}  // namespace

std::string default_config_dir() {
#ifdef NOCF_DEFAULT_CONFIG_DIR
  return NOCF_DEFAULT_CONFIG_DIR;
#else
  return "configs";
#endif
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"NoC firewall simulator and bounded model checker", "nocf"};
  app.require_subcommand(1);
  Invocation inv;

  auto common = [&](CLI::App* sub, bool config_required) {
    auto* opt = sub->add_option("-c,--config", inv.config, "YAML configuration file");
    if (config_required) opt->required();
    sub->add_option("--set", inv.sets, "Override a config value, e.g. kernel.latency=5")
        ->allow_extra_args(false);
    sub->add_option("-o,--out", inv.out_path, "Write the trace or report to this file");
    sub->add_option("--format", inv.format, "Output format")
        ->check(CLI::IsMember({"text", "structured"}));
  };

  auto* sim = app.add_subcommand("sim", "Run the cycle simulator");
  common(sim, true);
  sim->add_option("--cycles", inv.cycles, "Number of cycles (default: sim.cycles or 1000)");

  auto* chk = app.add_subcommand("check", "Run the bounded model checker");
  common(chk, true);
  chk->add_option("--threads", inv.threads, "Worker threads for frontier expansion")
      ->check(CLI::Range(1u, 256u));

  auto* scn = app.add_subcommand("scenario", "Run a packaged scenario (gpu, isolation)");
  common(scn, false);
  scn->add_option("name", inv.scenario, "Scenario name")->required();
  scn->add_option("--policy", inv.policy, "GPU policy")
      ->check(CLI::IsMember({"restricted", "permissive"}));
  scn->add_option("--cycles", inv.cycles, "Cycle budget");

  auto* val = app.add_subcommand("validate", "Load and validate a configuration");
  common(val, true);

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kConfigError;
  }

  try {
    if (sim->parsed()) return cmd_sim(inv, out);
    if (chk->parsed()) return cmd_check(inv, out);
    if (scn->parsed()) return cmd_scenario(inv, out, err);
    if (val->parsed()) return cmd_validate(inv, out);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kConfigError;
  }
  return kConfigError;
}

}  // namespace nocf::cli
