#include "nocf/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

#include "nocf/adversary.hpp"
#include "nocf/kernel.hpp"
#include "nocf/master.hpp"

namespace nocf {

namespace {

std::string join_errors(const std::vector<std::string>& errors) {
  std::string s = "invalid configuration";
  for (const auto& e : errors) s += "\n  " + e;
  return s;
}

std::string child(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

std::string child(const std::string& path, std::size_t index) {
  return path + "." + std::to_string(index);
}

std::optional<std::uint64_t> parse_uint(const std::string& text) {
  if (text.empty() || text[0] == '-') return std::nullopt;
  try {
    std::size_t used = 0;
    std::string t;
    for (char c : text) {
      if (c != '_') t.push_back(c);
    }
    const auto v = std::stoull(t, &used, 0);
    if (used != t.size()) return std::nullopt;
    return v;
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

std::vector<bool> parse_bits(const std::string& s, bool& ok) {
  std::vector<bool> bits;
  ok = true;
  for (char c : s) {
    if (c == '0' || c == '1') {
      bits.push_back(c == '1');
    } else if (c != '_' && c != ' ') {
      ok = false;
    }
  }
  return bits;
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> errors)
    : std::runtime_error(join_errors(errors)), errors_(std::move(errors)) {}

std::uint64_t stable_hash(std::string_view s) {
  std::uint64_t h = 0xCBF29CE484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001B3ull;
  }
  return h;
}

ConfigDocument parse_config(const std::string& text, std::string source) {
  ConfigDocument doc;
  doc.source = std::move(source);
  try {
    doc.root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw ConfigError({doc.source + ":" + std::to_string(e.mark.line + 1) + ": " + e.msg});
  }
  if (doc.root.IsNull()) doc.root = YAML::Node(YAML::NodeType::Map);
  if (!doc.root.IsMap()) throw ConfigError({doc.source + ": top level must be a mapping"});
  return doc;
}

ConfigDocument load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError({path + ": cannot read file"});
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path);
}

namespace {

void set_path(YAML::Node node, const std::vector<std::string>& keys, std::size_t i,
              const YAML::Node& value, const std::string& full) {
  const std::string& key = keys[i];
  const bool last = i + 1 == keys.size();
  if (node.IsSequence()) {
    const auto idx = parse_uint(key);
    if (!idx || *idx >= node.size()) {
      throw ConfigError({"--set " + full + ": no element " + key});
    }
    if (last) {
      node[*idx] = value;
    } else {
      set_path(node[*idx], keys, i + 1, value, full);
    }
    return;
  }
  if (!node.IsMap() && !node.IsNull()) {
    throw ConfigError({"--set " + full + ": cannot descend into scalar at " + key});
  }
  if (last) {
    node[key] = value;
    return;
  }
  YAML::Node next = node[key];
  if (!next.IsDefined() || next.IsNull()) {
    node[key] = YAML::Node(YAML::NodeType::Map);
  }
  set_path(node[key], keys, i + 1, value, full);
}

}  // namespace

void apply_override(ConfigDocument& doc, std::string_view assignment) {
  const auto eq = assignment.find('=');
  const std::string full(assignment);
  if (eq == std::string_view::npos || eq == 0) {
    throw ConfigError({"--set " + full + ": expected key=value"});
  }
  std::vector<std::string> keys;
  std::string key(assignment.substr(0, eq));
  std::stringstream ks(key);
  for (std::string part; std::getline(ks, part, '.');) {
    if (part.empty()) throw ConfigError({"--set " + full + ": empty path component"});
    keys.push_back(part);
  }
  YAML::Node value;
  try {
    value = YAML::Load(std::string(assignment.substr(eq + 1)));
  } catch (const YAML::Exception& e) {
    throw ConfigError({"--set " + full + ": " + e.msg});
  }
  set_path(doc.root, keys, 0, value, full);
}

std::string dump(const ConfigDocument& doc) {
  YAML::Emitter out;
  out << doc.root;
  return out.c_str();
}

// ---------------------------------------------------------------------------
// ConfigReader

void ConfigReader::error(const std::string& path, const std::string& message) {
  errors_.push_back(path + ": " + message);
}

void ConfigReader::finish() const {
  if (!errors_.empty()) throw ConfigError(errors_);
}

std::uint64_t ConfigReader::u64(const YAML::Node& n, const std::string& path,
                                std::uint64_t fallback) {
  if (!n || n.IsNull()) return fallback;
  if (!n.IsScalar()) {
    error(path, "expected an unsigned integer");
    return fallback;
  }
  const auto v = parse_uint(n.Scalar());
  if (!v) {
    error(path, "expected an unsigned integer, got '" + n.Scalar() + "'");
    return fallback;
  }
  return *v;
}

Address ConfigReader::address(const YAML::Node& n, const std::string& path, Address fallback) {
  const std::uint64_t v = u64(n, path, fallback);
  if (v > 0xFFFFFFFFull) {
    error(path, "address exceeds 32 bits");
    return fallback;
  }
  return static_cast<Address>(v);
}

bool ConfigReader::boolean(const YAML::Node& n, const std::string& path, bool fallback) {
  if (!n || n.IsNull()) return fallback;
  try {
    return n.as<bool>();
  } catch (const YAML::Exception&) {
    error(path, "expected true or false");
    return fallback;
  }
}

double ConfigReader::real(const YAML::Node& n, const std::string& path, double fallback) {
  if (!n || n.IsNull()) return fallback;
  try {
    return n.as<double>();
  } catch (const YAML::Exception&) {
    error(path, "expected a number");
    return fallback;
  }
}

std::string ConfigReader::string(const YAML::Node& n, const std::string& path,
                                 const std::string& fallback) {
  if (!n || n.IsNull()) return fallback;
  if (!n.IsScalar()) {
    error(path, "expected a string");
    return fallback;
  }
  return n.Scalar();
}

std::vector<std::uint8_t> ConfigReader::hex_bytes(const YAML::Node& n, const std::string& path) {
  std::vector<std::uint8_t> out;
  const std::string s = string(n, path);
  std::string digits;
  for (char c : s) {
    if (c == ' ' || c == '_' || c == ':') continue;
    if (!std::isxdigit(static_cast<unsigned char>(c))) {
      error(path, "invalid hex digit '" + std::string(1, c) + "'");
      return {};
    }
    digits.push_back(c);
  }
  if (digits.size() % 2 != 0) {
    error(path, "hex string has an odd number of digits");
    return {};
  }
  for (std::size_t i = 0; i < digits.size(); i += 2) {
    out.push_back(static_cast<std::uint8_t>(std::stoul(digits.substr(i, 2), nullptr, 16)));
  }
  return out;
}

std::optional<SizeCode> ConfigReader::size_code(const YAML::Node& n, const std::string& path) {
  const std::uint64_t v = u64(n, path, 0);
  if (v > SizeCode::kMax) {
    error(path, "size code must be 0..15");
    return std::nullopt;
  }
  return SizeCode(static_cast<unsigned>(v));
}

std::optional<PolicyRule> ConfigReader::rule(const YAML::Node& n, const std::string& path) {
  if (!n.IsMap()) {
    error(path, "expected a rule mapping {base, size_code, read, write}");
    return std::nullopt;
  }
  const Address base = address(n["base"], child(path, "base"));
  const auto size = size_code(n["size_code"], child(path, "size_code"));
  const bool r = boolean(n["read"], child(path, "read"));
  const bool w = boolean(n["write"], child(path, "write"));
  if (!size) return std::nullopt;
  if (!is_aligned(base, *size)) {
    error(path, "base " + std::to_string(base) + " is not aligned to a 2^" +
                    std::to_string(size->log2_bytes()) + " byte region");
    return std::nullopt;
  }
  return make_rule(base, *size, r, w);
}

std::optional<AddressRequest> ConfigReader::request(const YAML::Node& n, const std::string& path,
                                                    std::optional<AccessKind> kind) {
  if (!n.IsMap()) {
    error(path, "expected a request mapping");
    return std::nullopt;
  }
  AccessKind k = kind.value_or(AccessKind::Read);
  if (n["op"]) {
    const auto parsed = parse_access_kind(string(n["op"], child(path, "op")));
    if (!parsed) {
      error(child(path, "op"), "expected read or write");
      return std::nullopt;
    }
    k = *parsed;
  } else if (!kind) {
    error(child(path, "op"), "missing (read or write)");
    return std::nullopt;
  }
  const std::uint64_t id = u64(n["id"], child(path, "id"), 0);
  const Address addr = address(n["addr"], child(path, "addr"));
  const std::uint64_t len = u64(n["len"], child(path, "len"), 1);
  const std::uint64_t size = u64(n["size"], child(path, "size"), 4);
  BurstType bt = BurstType::Incr;
  if (n["burst"]) {
    const auto parsed = parse_burst_type(string(n["burst"], child(path, "burst")));
    if (!parsed) {
      error(child(path, "burst"), "expected fixed or incr");
      return std::nullopt;
    }
    bt = *parsed;
  }
  std::uint8_t size_log2 = 0;
  switch (size) {
    case 1: size_log2 = 0; break;
    case 2: size_log2 = 1; break;
    case 4: size_log2 = 2; break;
    default:
      error(child(path, "size"), "beat size must be 1, 2 or 4 bytes");
      return std::nullopt;
  }
  if (id > kIdMask) {
    error(child(path, "id"), "transaction id must fit 4 bits");
    return std::nullopt;
  }
  if (len < 1 || len > kMaxBurstLen) {
    error(child(path, "len"), "burst length must be 1..16");
    return std::nullopt;
  }
  return make_request(static_cast<std::uint8_t>(id), addr, k, static_cast<std::uint8_t>(len),
                      size_log2, bt);
}

ReadyPattern ConfigReader::ready(const YAML::Node& n, const std::string& path,
                                 std::uint64_t seed) {
  if (!n || n.IsNull()) return {};
  if (n.IsScalar()) {
    const std::string s = n.Scalar();
    if (s == "always" || s == "true") return {};
    if (s == "never" || s == "false") return ReadyPattern(ReadyPattern::Never{});
    error(path, "unknown readiness '" + s + "' (always, never, or a mapping)");
    return {};
  }
  if (!n.IsMap()) {
    error(path, "expected a readiness pattern");
    return {};
  }
  if (n["every"]) {
    const auto period = u64(n["every"], child(path, "every"), 1);
    if (period == 0) error(child(path, "every"), "period must be positive");
    return ReadyPattern(ReadyPattern::Every{period == 0 ? 1 : period,
                                            u64(n["phase"], child(path, "phase"), 0)});
  }
  if (n["repeat"]) {
    bool ok = true;
    auto bits = parse_bits(string(n["repeat"], child(path, "repeat")), ok);
    if (!ok || bits.empty()) error(child(path, "repeat"), "expected a non-empty 0/1 string");
    return ReadyPattern(ReadyPattern::Repeat{std::move(bits)});
  }
  if (n["script"]) {
    bool ok = true;
    auto bits = parse_bits(string(n["script"], child(path, "script")), ok);
    if (!ok) error(child(path, "script"), "expected a 0/1 string");
    return ReadyPattern(
        ReadyPattern::Script{std::move(bits), boolean(n["then"], child(path, "then"), true)});
  }
  if (n["random"]) {
    const double p = real(n["random"], child(path, "random"), 0.5);
    if (p < 0.0 || p > 1.0) error(child(path, "random"), "probability must be in [0, 1]");
    return ReadyPattern(ReadyPattern::Random{p, seed ^ stable_hash(path)});
  }
  error(path, "readiness mapping needs one of every, repeat, script, random");
  return {};
}

std::optional<FilterVariant> ConfigReader::variant(const YAML::Node& n, const std::string& path) {
  const std::string s = string(n, path);
  const auto v = parse_filter_variant(s);
  if (!v) error(path, "unknown filter variant '" + s + "' (vulnerable, commit_buffered)");
  return v;
}

// ---------------------------------------------------------------------------
// Topology

namespace {

BehaviorFactory load_behavior(ConfigReader& rd, const YAML::Node& n, const std::string& path) {
  if (!n || n.IsNull()) return {};
  if (!n.IsMap()) {
    rd.error(path, "expected a behavior mapping with a type");
    return {};
  }
  const std::string type = rd.string(n["type"], child(path, "type"), "idle");
  if (type == "idle") return {};

  if (type == "script") {
    std::vector<ScriptOp> ops;
    const YAML::Node list = n["ops"];
    if (list && !list.IsSequence()) rd.error(child(path, "ops"), "expected a list");
    for (std::size_t i = 0; list && list.IsSequence() && i < list.size(); ++i) {
      const std::string op_path = child(child(path, "ops"), i);
      auto req = rd.request(list[i], op_path);
      if (!req) continue;
      ScriptOp op;
      op.at = rd.u64(list[i]["at"], child(op_path, "at"), 0);
      op.request = *req;
      if (list[i]["data"]) op.data = rd.hex_bytes(list[i]["data"], child(op_path, "data"));
      ops.push_back(std::move(op));
    }
    const std::string desc = "script(" + std::to_string(ops.size()) + " ops)";
    return {[ops] { return std::make_unique<ScriptedMaster>(ops); }, desc, ops};
  }

  if (type == "wires") {
    std::vector<MasterOutput> cycles;
    const YAML::Node list = n["cycles"];
    if (!list || !list.IsSequence()) rd.error(child(path, "cycles"), "expected a list");
    for (std::size_t i = 0; list && list.IsSequence() && i < list.size(); ++i) {
      const std::string c_path = child(child(path, "cycles"), i);
      MasterOutput mo;
      if (list[i]["read"] && !list[i]["read"].IsNull()) {
        mo.read = rd.request(list[i]["read"], child(c_path, "read"), AccessKind::Read);
      }
      if (list[i]["write"] && !list[i]["write"].IsNull()) {
        mo.write = rd.request(list[i]["write"], child(c_path, "write"), AccessKind::Write);
      }
      cycles.push_back(mo);
    }
    const std::string desc = "wires(" + std::to_string(cycles.size()) + " cycles)";
    return {[cycles] { return std::make_unique<WireScriptMaster>(cycles); }, desc, {}};
  }

  if (type == "gpu") {
    GpuConfig g;
    g.fb_base = rd.address(n["fb_base"], child(path, "fb_base"));
    g.fb_pixels = rd.u64(n["fb_pixels"], child(path, "fb_pixels"), 0);
    g.start_cycle = rd.u64(n["start_cycle"], child(path, "start_cycle"), 0);
    const auto id = rd.u64(n["id"], child(path, "id"), 0);
    if (id > kIdMask) rd.error(child(path, "id"), "transaction id must fit 4 bits");
    g.id = static_cast<std::uint8_t>(id & kIdMask);
    if (n["trigger"]) {
      const auto t = rd.hex_bytes(n["trigger"], child(path, "trigger"));
      if (t.size() != kTriggerLen) {
        rd.error(child(path, "trigger"), "trigger must be exactly 8 bytes");
      } else {
        std::copy(t.begin(), t.end(), g.trigger.begin());
      }
    }
    return {[g] { return std::make_unique<GpuModel>(g); }, "gpu", {}};
  }

  rd.error(child(path, "type"), "unknown behavior type '" + type + "' (idle, script, wires, gpu)");
  return {};
}

}  // namespace

Topology load_topology(const ConfigDocument& doc) {
  ConfigReader rd;
  const YAML::Node& root = doc.root;
  Topology topo;
  topo.seed = rd.u64(root["seed"], "seed", 1);

  const YAML::Node kernel = root["kernel"];
  if (kernel) {
    topo.kernel_latency = static_cast<unsigned>(rd.u64(kernel["latency"], "kernel.latency", 3));
    topo.link_depth = rd.u64(kernel["link_depth"], "kernel.link_depth", 4);
    if (topo.link_depth < 2) rd.error("kernel.link_depth", "must be at least 2");
    if (const YAML::Node script = kernel["script"]) {
      std::vector<ScriptedReply> replies;
      if (!script.IsSequence()) rd.error("kernel.script", "expected a list");
      for (std::size_t i = 0; script.IsSequence() && i < script.size(); ++i) {
        const std::string p = child("kernel.script", i);
        replies.push_back(ScriptedReply{rd.u64(script[i]["cycle"], child(p, "cycle")),
                                        rd.u64(script[i]["link"], child(p, "link")),
                                        rd.boolean(script[i]["grant"], child(p, "grant"))});
      }
      topo.kernel_script = std::move(replies);
    }
  }

  InterposerConfig defaults;
  if (const YAML::Node d = root["defaults"]) {
    const auto cap = rd.u64(d["capacity"], "defaults.capacity", 2);
    if (cap < 1) rd.error("defaults.capacity", "capacity must be at least 1");
    defaults.capacity = cap;
    if (d["variant"]) defaults.variant = rd.variant(d["variant"], "defaults.variant").value_or(defaults.variant);
    defaults.register_slice = rd.boolean(d["register_slice"], "defaults.register_slice", false);
  }

  const YAML::Node slaves = root["slaves"];
  if (slaves && !slaves.IsSequence()) rd.error("slaves", "expected a list");
  for (std::size_t i = 0; slaves && slaves.IsSequence() && i < slaves.size(); ++i) {
    const std::string p = child("slaves", i);
    const YAML::Node s = slaves[i];
    SlaveSpec spec;
    spec.name = rd.string(s["name"], child(p, "name"), "slave" + std::to_string(i));
    spec.base = rd.address(s["base"], child(p, "base"));
    spec.size = rd.u64(s["size"], child(p, "size"), 0);
    if (spec.size == 0) rd.error(child(p, "size"), "must be positive");
    if (std::uint64_t{spec.base} + spec.size > (std::uint64_t{1} << 32)) {
      rd.error(child(p, "size"), "range extends past the 32-bit address space");
    }
    spec.ready = rd.ready(s["ready"], child(p, "ready"), topo.seed);
    if (const YAML::Node init = s["init"]) {
      for (std::size_t j = 0; init.IsSequence() && j < init.size(); ++j) {
        const std::string ip = child(child(p, "init"), j);
        MemoryInit mi;
        mi.addr = rd.address(init[j]["addr"], child(ip, "addr"));
        if (init[j]["hex"]) mi.bytes = rd.hex_bytes(init[j]["hex"], child(ip, "hex"));
        if (init[j]["fill"]) {
          const auto v = rd.u64(init[j]["fill"], child(ip, "fill"));
          const auto len = rd.u64(init[j]["len"], child(ip, "len"));
          mi.bytes.assign(len, static_cast<std::uint8_t>(v));
        }
        spec.init.push_back(std::move(mi));
      }
    }
    for (std::size_t j = 0; j < topo.slaves.size(); ++j) {
      const auto& o = topo.slaves[j];
      const std::uint64_t lo = spec.base, hi = lo + spec.size;
      const std::uint64_t olo = o.base, ohi = olo + o.size;
      if (spec.size > 0 && lo < ohi && olo < hi) {
        rd.error(p, "range overlaps slaves." + std::to_string(j) + " (" + o.name + ")");
      }
      if (o.name == spec.name) rd.error(child(p, "name"), "duplicate slave name " + spec.name);
    }
    topo.slaves.push_back(std::move(spec));
  }

  const YAML::Node masters = root["masters"];
  if (masters && !masters.IsSequence()) rd.error("masters", "expected a list");
  std::set<std::string> master_names;
  for (std::size_t i = 0; masters && masters.IsSequence() && i < masters.size(); ++i) {
    const std::string p = child("masters", i);
    MasterSpec ms;
    ms.name = rd.string(masters[i]["name"], child(p, "name"), "m" + std::to_string(i));
    if (!master_names.insert(ms.name).second) {
      rd.error(child(p, "name"), "duplicate master name " + ms.name);
    }
    const YAML::Node ports = masters[i]["ports"];
    if (!ports || !ports.IsSequence() || ports.size() == 0) {
      rd.error(child(p, "ports"), "each master needs at least one port");
    }
    for (std::size_t j = 0; ports && ports.IsSequence() && j < ports.size(); ++j) {
      const std::string pp = child(child(p, "ports"), j);
      const YAML::Node pn = ports[j];
      PortSpec ps;
      ps.name = rd.string(pn["name"], child(pp, "name"), "p" + std::to_string(j));
      ps.interposer = defaults;
      if (pn["capacity"]) {
        const auto cap = rd.u64(pn["capacity"], child(pp, "capacity"), defaults.capacity);
        if (cap < 1) rd.error(child(pp, "capacity"), "capacity must be at least 1");
        ps.interposer.capacity = std::max<std::uint64_t>(cap, 1);
      }
      if (pn["variant"]) {
        ps.interposer.variant =
            rd.variant(pn["variant"], child(pp, "variant")).value_or(defaults.variant);
      }
      ps.interposer.register_slice =
          rd.boolean(pn["register_slice"], child(pp, "register_slice"), defaults.register_slice);
      ps.interposer.permit_mode = rd.boolean(pn["permit"], child(pp, "permit"), false);
      if (const YAML::Node fr = pn["fabric_ready"]) {
        if (fr.IsMap() && (fr["read"] || fr["write"])) {
          ps.fabric_read = rd.ready(fr["read"], child(child(pp, "fabric_ready"), "read"), topo.seed);
          ps.fabric_write =
              rd.ready(fr["write"], child(child(pp, "fabric_ready"), "write"), topo.seed);
        } else {
          ps.fabric_read = rd.ready(fr, child(pp, "fabric_ready"), topo.seed);
          ps.fabric_write = rd.ready(fr, child(pp, "fabric_ready") + "#w", topo.seed);
        }
      }
      if (const YAML::Node rules = pn["rules"]) {
        for (std::size_t k = 0; rules.IsSequence() && k < rules.size(); ++k) {
          if (auto r = rd.rule(rules[k], child(child(pp, "rules"), k))) {
            ps.initial_rules.push_back(*r);
          }
        }
        if (ps.initial_rules.size() > ps.interposer.capacity) {
          rd.error(child(pp, "rules"), "more initial rules than the table capacity");
        }
      }
      ps.behavior = load_behavior(rd, pn["behavior"], child(pp, "behavior"));
      ms.ports.push_back(std::move(ps));
    }
    topo.masters.push_back(std::move(ms));
  }

  const YAML::Node grants = root["grants"];
  if (grants && !grants.IsSequence()) rd.error("grants", "expected a list");
  for (std::size_t i = 0; grants && grants.IsSequence() && i < grants.size(); ++i) {
    const std::string p = child("grants", i);
    GrantEntry g;
    g.master = rd.string(grants[i]["master"], child(p, "master"));
    if (!master_names.count(g.master)) {
      rd.error(child(p, "master"), "unknown master '" + g.master + "'");
    }
    g.base = rd.address(grants[i]["base"], child(p, "base"));
    const auto size = rd.size_code(grants[i]["size_code"], child(p, "size_code"));
    g.allow_read = rd.boolean(grants[i]["read"], child(p, "read"));
    g.allow_write = rd.boolean(grants[i]["write"], child(p, "write"));
    if (!size) continue;
    g.size = *size;
    if (!is_aligned(g.base, g.size)) {
      rd.error(child(p, "base"), "grant base is not aligned to its 2^" +
                                     std::to_string(g.size.log2_bytes()) + " byte region");
      continue;
    }
    for (std::size_t j = 0; j < topo.grants.size(); ++j) {
      const auto& o = topo.grants[j];
      if (o.master != g.master) continue;
      if (o.contains(g.base) || g.contains(o.base)) {
        rd.error(p, "overlaps grants." + std::to_string(j) + " of the same master");
      }
    }
    topo.grants.push_back(std::move(g));
  }

  rd.finish();
  return topo;
}

Topology load_topology(const std::string& text) { return load_topology(parse_config(text)); }

}  // namespace nocf
