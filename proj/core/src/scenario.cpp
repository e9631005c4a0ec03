#include "nocf/scenario.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <set>
#include <random>
#include <sstream>

#include <nlohmann/json.hpp>
#include "nocf/adversary.hpp"
#include "nocf/trace.hpp"

namespace nocf {

namespace {

constexpr const char* kGpuPort = "gpu.axi";

std::vector<std::uint8_t> seeded_bytes(std::uint64_t seed, std::uint64_t stream, std::size_t n) {
  std::mt19937_64 rng(seed * 0x9E3779B97F4A7C15ull + stream);
  std::vector<std::uint8_t> out(n);
  for (auto& b : out) b = static_cast<std::uint8_t>(rng() >> 56);
  return out;
}

}  // namespace

std::string_view to_string(GpuPolicy p) {
  return p == GpuPolicy::Restricted ? "restricted" : "permissive";
}

std::optional<GpuPolicy> parse_gpu_policy(std::string_view text) {
  if (text == "restricted") return GpuPolicy::Restricted;
  if (text == "permissive") return GpuPolicy::Permissive;
  return std::nullopt;
}

GpuScenarioParams load_gpu_params(const ConfigDocument& doc) {
  ConfigReader rd;
  GpuScenarioParams p;
  const YAML::Node s = doc.root["scenario"];
  p.seed = rd.u64(doc.root["seed"], "seed", p.seed);
  if (s) {
    p.seed = rd.u64(s["seed"], "scenario.seed", p.seed);
    p.cycles = rd.u64(s["cycles"], "scenario.cycles", p.cycles);
    if (s["policy"]) {
      const std::string text = rd.string(s["policy"], "scenario.policy");
      if (auto pol = parse_gpu_policy(text)) {
        p.policy = *pol;
      } else {
        rd.error("scenario.policy", "expected restricted or permissive, got '" + text + "'");
      }
    }
    if (s["variant"]) p.variant = rd.variant(s["variant"], "scenario.variant").value_or(p.variant);
    p.kernel_latency = static_cast<unsigned>(rd.u64(s["kernel_latency"], "scenario.kernel_latency", p.kernel_latency));
    p.gpu_capacity = rd.u64(s["gpu_capacity"], "scenario.gpu_capacity", p.gpu_capacity);
    if (p.gpu_capacity < 1) rd.error("scenario.gpu_capacity", "capacity must be at least 1");
    p.dram_base = rd.address(s["dram_base"], "scenario.dram_base", p.dram_base);
    p.dram_size = rd.u64(s["dram_size"], "scenario.dram_size", p.dram_size);
    p.victim_base = rd.address(s["victim_base"], "scenario.victim_base", p.victim_base);
    p.victim_size = rd.u64(s["victim_size"], "scenario.victim_size", p.victim_size);
    p.hook_addr = rd.address(s["hook_addr"], "scenario.hook_addr", p.hook_addr);
    p.hook_len = rd.u64(s["hook_len"], "scenario.hook_len", p.hook_len);
    p.payload_addr = rd.address(s["payload_addr"], "scenario.payload_addr", p.payload_addr);
    p.payload_len = rd.u64(s["payload_len"], "scenario.payload_len", p.payload_len);
    p.fb_base = rd.address(s["fb_base"], "scenario.fb_base", p.fb_base);
    p.fb_pixels = rd.u64(s["fb_pixels"], "scenario.fb_pixels", p.fb_pixels);
    p.gpu_start = rd.u64(s["gpu_start"], "scenario.gpu_start", p.gpu_start);
  }
  auto inside = [&](Address a, std::uint64_t n, Address base, std::uint64_t size) {
    return a >= base && std::uint64_t{a} - base + n <= size;
  };
  if (!inside(p.victim_base, p.victim_size, p.dram_base, p.dram_size)) {
    rd.error("scenario.victim_base", "victim region must lie inside dram");
  }
  if (!inside(p.hook_addr, p.hook_len, p.victim_base, p.victim_size)) {
    rd.error("scenario.hook_addr", "hook must lie inside the victim region");
  }
  if (!inside(p.payload_addr, p.payload_len, p.victim_base, p.victim_size)) {
    rd.error("scenario.payload_addr", "payload must lie inside the victim region");
  }
  if (!inside(p.fb_base, 4 * std::uint64_t{p.fb_pixels}, p.dram_base, p.dram_size)) {
    rd.error("scenario.fb_base", "framebuffer must lie inside dram");
  }
  if (p.fb_base < p.victim_base + p.victim_size && p.victim_base < p.fb_base + 4 * p.fb_pixels) {
    rd.error("scenario.fb_base", "framebuffer overlaps the victim region");
  }
  if (p.fb_base % 4096 != 0) rd.error("scenario.fb_base", "framebuffer must be 4 KiB aligned");
  const std::size_t needed = 2 * (kTriggerLen + 6) + p.hook_len + p.payload_len;
  if (p.fb_pixels < needed) {
    rd.error("scenario.fb_pixels", "framebuffer needs at least " + std::to_string(needed) + " pixels");
  }
  if (p.hook_len > 0xFFFF || p.payload_len > 0xFFFF) {
    rd.error("scenario.payload_len", "command payloads are limited to 65535 bytes");
  }
  rd.finish();
  return p;
}

KeyloggerImage keylogger_image(const GpuScenarioParams& p) {
  return KeyloggerImage{p.hook_addr, seeded_bytes(p.seed, 1, p.hook_len), p.payload_addr,
                        seeded_bytes(p.seed, 2, p.payload_len)};
}

Framebuffer gpu_framebuffer(const GpuScenarioParams& p, const KeyloggerImage& img) {
  Framebuffer fb;
  fb.base = p.fb_base;
  const auto noise = seeded_bytes(p.seed, 3, 4 * p.fb_pixels);
  fb.pixels.resize(p.fb_pixels);
  for (std::size_t i = 0; i < p.fb_pixels; ++i) {
    fb.pixels[i] = noise[4 * i] | noise[4 * i + 1] << 8 | noise[4 * i + 2] << 16 |
                   static_cast<std::uint32_t>(noise[4 * i + 3]) << 24;
  }
  const StegoCommand hook{kDefaultTrigger, img.hook_addr, img.hook};
  const StegoCommand routine{kDefaultTrigger, img.payload_addr, img.payload};
  fb = stego_encode(std::move(fb), hook, 0);
  fb = stego_encode(std::move(fb), routine, stego_footprint(hook));
  // Ensure the pixel after the second command cannot start another trigger.
  const std::size_t after = stego_footprint(hook) + stego_footprint(routine);
  if (after < fb.pixels.size()) {
    fb.pixels[after] = (fb.pixels[after] & 0xFFFFFF00u) |
                       static_cast<std::uint8_t>(kDefaultTrigger[0] ^ 0xFF);
  }
  return fb;
}

Topology gpu_topology(const GpuScenarioParams& p) {
  const KeyloggerImage img = keylogger_image(p);
  const Framebuffer fb = gpu_framebuffer(p, img);

  Topology t;
  t.seed = p.seed;
  t.kernel_latency = p.kernel_latency;

  SlaveSpec dram;
  dram.name = "dram";
  dram.base = p.dram_base;
  dram.size = p.dram_size;
  dram.init.push_back({p.fb_base, framebuffer_bytes(fb)});
  // Original kernel bytes under the hook and in the unused region.
  dram.init.push_back({p.hook_addr, seeded_bytes(p.seed, 4, p.hook_len)});
  dram.init.push_back({p.payload_addr, seeded_bytes(p.seed, 5, p.payload_len)});
  t.slaves.push_back(std::move(dram));

  PortSpec cpu_port;
  cpu_port.name = "axi";
  cpu_port.interposer.capacity = 2;
  cpu_port.interposer.variant = p.variant;
  t.masters.push_back(MasterSpec{"cpu", {cpu_port}});

  GpuConfig g;
  g.fb_base = p.fb_base;
  g.fb_pixels = p.fb_pixels;
  g.start_cycle = p.gpu_start;
  g.id = 3;
  PortSpec gpu_port;
  gpu_port.name = "axi";
  gpu_port.interposer.capacity = p.gpu_capacity;
  gpu_port.interposer.variant = p.variant;
  gpu_port.behavior = {[g] { return std::make_unique<GpuModel>(g); }, "gpu", {}};
  t.masters.push_back(MasterSpec{"gpu", {gpu_port}});

  // The CPU owns its kernel image; the GPU's entry depends on the policy.
  auto code_for = [](std::uint64_t bytes) {
    unsigned c = 0;
    while (c < SizeCode::kMax && decode_size(SizeCode(c)) < bytes) ++c;
    return SizeCode(c);
  };
  const SizeCode victim_code = code_for(p.victim_size);
  t.grants.push_back(GrantEntry{"cpu", p.victim_base & region_mask(victim_code), victim_code, true, true});
  if (p.policy == GpuPolicy::Permissive) {
    t.grants.push_back(GrantEntry{"gpu", p.dram_base & region_mask(SizeCode(15)), SizeCode(15), true, true});
  } else {
    const SizeCode fb_code = code_for(4 * std::uint64_t{p.fb_pixels});
    t.grants.push_back(GrantEntry{"gpu", p.fb_base & region_mask(fb_code), fb_code, true, true});
  }
  return t;
}

bool keylogger_injected(const MemorySlave& mem, const KeyloggerImage& img) {
  return mem.read_bytes(img.hook_addr, img.hook.size()) == img.hook &&
         mem.read_bytes(img.payload_addr, img.payload.size()) == img.payload;
}

GpuScenarioResult run_gpu_scenario(const GpuScenarioParams& p, const TraceSink& sink) {
  const KeyloggerImage img = keylogger_image(p);
  System sys(gpu_topology(p));
  const MemorySlave& dram = *sys.find_slave("dram");
  const std::size_t gpu = *sys.find_port(kGpuPort);

  GpuScenarioResult r;
  r.injected_before = keylogger_injected(dram, img);
  const auto victim_before = dram.read_bytes(p.victim_base, p.victim_size);

  for (std::uint64_t c = 0; c < p.cycles; ++c) {
    const TraceRecord rec = sys.step();
    const InterposerTrace& ip = rec.interposers[gpu];
    if (ip.r.response && ip.r.response->kind == ResponseKind::DecodeError && ip.r.response->last) {
      ++r.fb_read_errors;
    }
    if (ip.w.response && ip.w.response->kind == ResponseKind::DecodeError && ip.w.response->last) {
      ++r.gpu_write_errors;
    }
    for (const auto& tr : rec.transfers) {
      if (tr.port != kGpuPort || tr.request.kind != AccessKind::Read) continue;
      ++r.gpu_read_forwards;
      if (!tr.approved_match || !tr.policy_allows) ++r.gpu_read_unapproved;
    }
    if (sink) sink(rec);
    const auto& model = static_cast<const GpuModel&>(sys.behavior(gpu));
    if (model.done() && sys.kernel().pending() == 0) break;
  }

  const auto& model = static_cast<const GpuModel&>(sys.behavior(gpu));
  r.stats = sys.stats();
  r.cycles = sys.cycle();
  r.injected = keylogger_injected(dram, img);
  r.victim_unchanged = dram.read_bytes(p.victim_base, p.victim_size) == victim_before;
  r.fb_reads_ok = model.reads_ok();
  r.gpu_writes_ok = model.writes_ok();
  r.commands_seen = model.commands_seen();
  const auto hook_now = dram.read_bytes(img.hook_addr, img.hook.size());
  const auto payload_now = dram.read_bytes(img.payload_addr, img.payload.size());
  for (std::size_t i = 0; i < img.hook.size(); ++i) r.bytes_landed += hook_now[i] == img.hook[i];
  for (std::size_t i = 0; i < img.payload.size(); ++i) {
    r.bytes_landed += payload_now[i] == img.payload[i];
  }
  return r;
}

// ---------------------------------------------------------------------------
// Isolation

IsolationParams load_isolation_params(const ConfigDocument& doc) {
  ConfigReader rd;
  IsolationParams p;
  if (const YAML::Node s = doc.root["scenario"]) {
    p.cycles = rd.u64(s["cycles"], "scenario.cycles", p.cycles);
  }
  rd.finish();
  return p;
}

IsolationResult run_isolation_scenario(const ConfigDocument& doc, const IsolationParams& p,
                                       const TraceSink& sink) {
  const Topology topo = load_topology(doc);
  const GrantMap grants(topo.grants);
  auto permitted = [&](const std::string& master, const AddressRequest& req) {
    return grants.calculate_region(master, req.addr >> 12, req.kind).has_value();
  };

  IsolationResult r;
  std::map<std::string, std::string> master_of;  // port -> master
  std::map<std::string, std::map<std::uint8_t, std::size_t>> probe_index;  // port -> id -> probe
  std::map<std::string, std::set<std::uint8_t>> in_bounds_ids;
  for (const auto& m : topo.masters) {
    for (const auto& ps : m.ports) {
      const std::string port = m.name + "." + ps.name;
      master_of[port] = m.name;
      // Grant entries resident in this port's table, oldest first.
      std::deque<std::size_t> resident;
      for (std::size_t i = 0; i < ps.behavior.script.size(); ++i) {
        const AddressRequest& req = ps.behavior.script[i].request;
        if (!permitted(m.name, req)) {
          probe_index[port][req.id] = r.probes.size();
          r.probes.push_back(ProbeOutcome{port, i, req, 0, 0});
          continue;
        }
        ++r.in_bounds_ops;
        in_bounds_ids[port].insert(req.id);
        std::size_t entry = 0;
        for (std::size_t e = 0; e < grants.entries().size(); ++e) {
          const auto& g = grants.entries()[e];
          if (g.master == m.name && g.contains(req.addr)) entry = e;
        }
        if (std::find(resident.begin(), resident.end(), entry) == resident.end()) {
          ++r.first_touch_regions;
          resident.push_back(entry);
          if (resident.size() > ps.interposer.capacity) resident.pop_front();
        }
      }
    }
  }

  System sys(topo);
  for (std::uint64_t c = 0; c < p.cycles; ++c) {
    const TraceRecord rec = sys.step();
    for (const auto& ip : rec.interposers) {
      for (const ChannelTrace* ch : {&ip.r, &ip.w}) {
        if (!ch->response || !ch->response->last) continue;
        const auto& ids = probe_index[ip.port];
        const auto it = ids.find(ch->response->id);
        if (ch->response->kind == ResponseKind::DecodeError) {
          if (it != ids.end()) {
            ++r.probes[it->second].decode_errors;
          } else {
            ++r.in_bounds_decode_errors;
          }
        } else if (it != ids.end()) {
          ++r.probes[it->second].other_responses;
        }
      }
    }
    for (const auto& tr : rec.transfers) {
      if (!permitted(master_of[tr.port], tr.request)) ++r.cross_boundary_forwards;
      if (tr.slave.empty()) {
        // Fabric decode error for an unmapped address.
        const auto& ids = probe_index[tr.port];
        const auto it = ids.find(tr.request.id);
        if (it != ids.end()) {
          ++r.probes[it->second].decode_errors;
        } else {
          ++r.in_bounds_decode_errors;
        }
      }
    }
    if (sink) sink(rec);
  }

  for (std::size_t i = 0; i < sys.port_count(); ++i) {
    if (auto* sm = dynamic_cast<ScriptedMaster*>(&sys.behavior(i))) {
      r.in_bounds_completed += sm->completed();
    }
  }
  std::uint64_t probe_completions = 0;
  for (const auto& pr : r.probes) probe_completions += pr.decode_errors + pr.other_responses;
  r.in_bounds_completed -= std::min(r.in_bounds_completed, probe_completions);
  r.stats = sys.stats();
  return r;
}

// ---------------------------------------------------------------------------
// Reports

std::string gpu_report_text(const GpuScenarioParams& p, const GpuScenarioResult& r) {
  std::ostringstream os;
  os << "scenario: gpu policy=" << to_string(p.policy) << " variant=" << to_string(p.variant)
     << " seed=" << p.seed << "\n"
     << "injected: " << (r.injected ? "true" : "false") << "\n"
     << "victim_unchanged: " << (r.victim_unchanged ? "true" : "false") << "\n"
     << "payload_bytes_landed: " << r.bytes_landed << "/" << (p.hook_len + p.payload_len) << "\n"
     << "commands_decoded: " << r.commands_seen << "\n"
     << "framebuffer_reads: ok=" << r.fb_reads_ok << " errors=" << r.fb_read_errors
     << " unapproved=" << r.gpu_read_unapproved << "\n"
     << "gpu_writes: ok=" << r.gpu_writes_ok << " errors=" << r.gpu_write_errors << "\n"
     << "cycles: " << r.cycles << "\n"
     << stats_text(r.stats) << "\n";
  return os.str();
}

std::string gpu_report_line(const GpuScenarioParams& p, const GpuScenarioResult& r) {
  nlohmann::ordered_json j;
  j["type"] = "report";
  j["scenario"] = "gpu";
  j["policy"] = to_string(p.policy);
  j["variant"] = to_string(p.variant);
  j["seed"] = p.seed;
  j["injected"] = r.injected;
  j["injected_before"] = r.injected_before;
  j["victim_unchanged"] = r.victim_unchanged;
  j["bytes_landed"] = r.bytes_landed;
  j["commands_decoded"] = r.commands_seen;
  j["fb_reads_ok"] = r.fb_reads_ok;
  j["fb_read_errors"] = r.fb_read_errors;
  j["gpu_read_unapproved"] = r.gpu_read_unapproved;
  j["gpu_writes_ok"] = r.gpu_writes_ok;
  j["gpu_write_errors"] = r.gpu_write_errors;
  j["cycles"] = r.cycles;
  return j.dump();
}

std::string isolation_report_text(const IsolationResult& r) {
  std::ostringstream os;
  os << "scenario: isolation\n"
     << "cross_boundary_forwards: " << r.cross_boundary_forwards << "\n"
     << "in_bounds_decode_errors: " << r.in_bounds_decode_errors << "\n"
     << "in_bounds_ops: " << r.in_bounds_ops << " completed=" << r.in_bounds_completed << "\n"
     << "delayed_requests: " << r.stats.delayed << "\n"
     << "first_touch_regions: " << r.first_touch_regions << "\n"
     << "decode_errors: " << r.stats.decode_errors << "\n"
     << "probes: " << r.probes.size() << "\n";
  for (const auto& pr : r.probes) {
    os << "  " << pr.port << " op " << pr.op << " " << to_string(pr.request)
       << " decode_errors=" << pr.decode_errors << "\n";
  }
  os << stats_text(r.stats) << "\n";
  return os.str();
}

std::string isolation_report_line(const IsolationResult& r) {
  nlohmann::ordered_json j;
  j["type"] = "report";
  j["scenario"] = "isolation";
  j["cross_boundary_forwards"] = r.cross_boundary_forwards;
  j["in_bounds_decode_errors"] = r.in_bounds_decode_errors;
  j["in_bounds_ops"] = r.in_bounds_ops;
  j["in_bounds_completed"] = r.in_bounds_completed;
  j["delayed_requests"] = r.stats.delayed;
  j["first_touch_regions"] = r.first_touch_regions;
  j["decode_errors"] = r.stats.decode_errors;
  nlohmann::ordered_json probes = nlohmann::ordered_json::array();
  for (const auto& pr : r.probes) {
    probes.push_back({{"port", pr.port},
                      {"op", pr.op},
                      {"id", pr.request.id},
                      {"addr", hex32(pr.request.addr)},
                      {"kind", to_string(pr.request.kind)},
                      {"decode_errors", pr.decode_errors}});
  }
  j["probes"] = probes;
  return j.dump();
}

}  // namespace nocf
