#include "swarmlab/runlog.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>

#include "swarmlab/config.hpp"
#include "swarmlab/errors.hpp"

namespace swarmlab {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr char kPhiMagic[8] = {'S', 'W', 'P', 'H', 'I', 'v', '1', '\0'};

[[noreturn]] void corrupt(const std::string& what) { throw Error(ErrorKind::CorruptLog, what); }

void put_double(std::string& out, double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  out.append(buf, res.ptr);
}

double get_double(std::string_view s) {
  double v = 0.0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) corrupt("bad number '" + std::string(s) + "'");
  return v;
}

long get_long(std::string_view s) {
  long v = 0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) corrupt("bad integer '" + std::string(s) + "'");
  return v;
}

// long doubles travel as C99 hex floats, which round-trip exactly
std::string ld_text(long double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%La", v);
  return buf;
}

long double ld_parse(const json& j) {
  const auto s = j.get<std::string>();
  char* end = nullptr;
  const long double v = std::strtold(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0') corrupt("bad long double '" + s + "'");
  return v;
}

json ld_array(const std::vector<long double>& v) {
  json a = json::array();
  for (long double x : v) a.push_back(ld_text(x));
  return a;
}

std::vector<long double> ld_vector(const json& j) {
  std::vector<long double> out;
  for (const auto& x : j) out.push_back(ld_parse(x));
  return out;
}

json classification_json(const PhaseClassification& c) {
  return {{"verdict", c.verdict == PhaseVerdict::Good ? "good" : "not_good"},
          {"mu_hat", c.mu_hat},
          {"m6_hat", c.m6_hat},
          {"p0_hat", c.p0_hat},
          {"p_base", c.p_base},
          {"p_residual", c.p_residual},
          {"samples", c.samples}};
}

PhaseClassification classification_from(const json& j) {
  PhaseClassification c;
  c.verdict = j.at("verdict").get<std::string>() == "good" ? PhaseVerdict::Good : PhaseVerdict::NotGood;
  c.mu_hat = j.at("mu_hat").get<double>();
  c.m6_hat = j.at("m6_hat").get<double>();
  c.p0_hat = j.at("p0_hat").get<double>();
  c.p_base = j.at("p_base").get<double>();
  c.p_residual = j.at("p_residual").get<double>();
  c.samples = j.at("samples").get<long>();
  return c;
}

PhaseKind kind_from(const std::string& s) {
  if (s == "PH_X") return PhaseKind::X;
  if (s == "PH_Y") return PhaseKind::Y;
  if (s == "PH_F") return PhaseKind::F;
  corrupt("unknown phase kind '" + s + "'");
}

json sums_json(const IncrementSums& s) {
  json j;
  j["taus"] = s.taus;
  j["horizon"] = s.horizon;
  j["b_partial"] = ld_array(s.b_partial);
  json ip = json::array(), jp = json::array();
  for (const auto& row : s.i_partial) ip.push_back(ld_array(row));
  for (const auto& row : s.j_partial) jp.push_back(ld_array(row));
  j["i_partial"] = std::move(ip);
  j["j_partial"] = std::move(jp);
  j["b_total"] = ld_text(s.b_total);
  j["j_total"] = ld_text(s.j_total);
  j["i_max"] = s.i_max;
  j["final_psi"] = s.final_psi;
  return j;
}

IncrementSums sums_from(const json& j) {
  IncrementSums s;
  s.taus = j.at("taus").get<std::vector<long>>();
  s.horizon = j.at("horizon").get<long>();
  s.b_partial = ld_vector(j.at("b_partial"));
  for (const auto& row : j.at("i_partial")) s.i_partial.push_back(ld_vector(row));
  for (const auto& row : j.at("j_partial")) s.j_partial.push_back(ld_vector(row));
  s.b_total = ld_parse(j.at("b_total"));
  s.j_total = ld_parse(j.at("j_total"));
  s.i_max = j.at("i_max").get<std::vector<double>>();
  s.final_psi = j.at("final_psi").get<std::vector<double>>();
  return s;
}

}  // namespace

fs::path run_directory(const fs::path& output_dir, std::uint64_t seed) {
  return output_dir / "runs" / ("run_" + std::to_string(seed));
}

std::string runlog_json_text(const RunLog& log) {
  json j;
  j["format_version"] = log.format_version;
  j["fingerprint"] = log.fingerprint;
  j["config"] = log.config;
  j["run_index"] = log.run_index;
  j["seed"] = log.seed;
  j["trace_file"] = log.trace_file;
  j["phi_file"] = log.phi_file;
  const auto& d = log.diagnostics;
  j["diagnostics"] = {{"skipped_leading", d.skipped_leading},
                      {"zero_after_start", d.zero_after_start},
                      {"nonfinite", d.nonfinite},
                      {"truncated_at", d.truncated_at},
                      {"max_phi_precision", d.max_phi_precision}};
  j["stopping_times"] = {{"alpha", log.times.alpha}, {"beta", log.times.beta}, {"sets", log.times.sets}};
  json phases = json::array();
  for (const auto& p : log.phases) {
    json e = {{"kind", phase_kind_name(p.record.kind)},
              {"index", p.record.index},
              {"start", p.record.start},
              {"end", p.record.end},
              {"stagnating_set", p.record.stagnating_set}};
    e["classification"] = p.classification ? classification_json(*p.classification) : json(nullptr);
    phases.push_back(std::move(e));
  }
  j["phases"] = std::move(phases);
  const auto& f = log.final_state;
  json G = json::array();
  for (const auto& g : f.G) G.push_back(g.to_hex());
  j["final_state"] = {{"iterations", f.iterations}, {"trace_end", f.trace_end}, {"draws", f.draws},         {"max_precision", f.max_precision},
                      {"final_psi", f.final_psi},   {"G", std::move(G)},        {"fG", f.fG.to_hex()},
                      {"fG_exponent", f.fG_exponent}};
  const auto& r = log.reduction;
  json red;
  red["covers_horizon"] = r.covers_horizon;
  if (r.covers_horizon) {
    red["log2_phi_m"] = r.endpoints.log2_phi_m;
    red["log2_phi_e"] = r.endpoints.log2_phi_e;
    red["sums"] = r.sums.taus.empty() && r.sums.i_max.empty() ? json(nullptr) : sums_json(r.sums);
  }
  j["reduction"] = std::move(red);
  return j.dump(1) + "\n";
}

RunLog parse_runlog_json(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    corrupt(std::string("runlog is not valid JSON: ") + e.what());
  }
  if (!j.is_object() || !j.contains("format_version")) corrupt("runlog has no format_version");
  const int version = j.at("format_version").get<int>();
  if (version != kRunLogFormatVersion) {
    throw Error(ErrorKind::VersionMismatch, "runlog format " + std::to_string(version) + ", expected " +
                                                std::to_string(kRunLogFormatVersion));
  }
  RunLog log;
  try {
    log.fingerprint = j.at("fingerprint").get<std::string>();
    log.config = j.at("config");
    if (fingerprint_of(log.config) != log.fingerprint) corrupt("fingerprint does not match the stored config");
    log.run_index = j.at("run_index").get<long>();
    log.seed = j.at("seed").get<std::uint64_t>();
    log.trace_file = j.at("trace_file").get<std::string>();
    log.phi_file = j.at("phi_file").get<std::string>();
    const auto& d = j.at("diagnostics");
    log.diagnostics.skipped_leading = d.at("skipped_leading").get<long>();
    log.diagnostics.zero_after_start = d.at("zero_after_start").get<long>();
    log.diagnostics.nonfinite = d.at("nonfinite").get<long>();
    log.diagnostics.truncated_at = d.at("truncated_at").get<long>();
    log.diagnostics.max_phi_precision = d.at("max_phi_precision").get<long>();
    const auto& st = j.at("stopping_times");
    log.times.alpha = st.at("alpha").get<std::vector<long>>();
    log.times.beta = st.at("beta").get<std::vector<long>>();
    log.times.sets = st.at("sets").get<std::vector<std::vector<int>>>();
    for (const auto& e : j.at("phases")) {
      PhaseEntry p;
      p.record.kind = kind_from(e.at("kind").get<std::string>());
      p.record.index = e.at("index").get<int>();
      p.record.start = e.at("start").get<long>();
      p.record.end = e.at("end").get<long>();
      p.record.stagnating_set = e.at("stagnating_set").get<std::vector<int>>();
      if (!e.at("classification").is_null()) p.classification = classification_from(e.at("classification"));
      log.phases.push_back(std::move(p));
    }
    const auto& f = j.at("final_state");
    log.final_state.iterations = f.at("iterations").get<long>();
    log.final_state.trace_end = f.at("trace_end").get<long>();
    log.final_state.draws = f.at("draws").get<std::uint64_t>();
    log.final_state.max_precision = f.at("max_precision").get<long>();
    log.final_state.final_psi = f.at("final_psi").get<std::vector<double>>();
    for (const auto& g : f.at("G")) log.final_state.G.push_back(BigReal::from_hex(g.get<std::string>()));
    log.final_state.fG = BigReal::from_hex(f.at("fG").get<std::string>());
    log.final_state.fG_exponent = f.at("fG_exponent").get<long>();
    const auto& r = j.at("reduction");
    log.reduction.covers_horizon = r.at("covers_horizon").get<bool>();
    if (log.reduction.covers_horizon) {
      log.reduction.endpoints.log2_phi_m = r.at("log2_phi_m").get<std::vector<double>>();
      log.reduction.endpoints.log2_phi_e = r.at("log2_phi_e").get<std::vector<double>>();
      if (!r.at("sums").is_null()) log.reduction.sums = sums_from(r.at("sums"));
    }
  } catch (const json::exception& e) {
    corrupt(std::string("runlog field: ") + e.what());
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::CorruptLog) throw;
    corrupt(e.what());
  }
  return log;
}

std::string trace_csv_text(const PotentialTrace& trace) {
  std::string out = "t,d,log2_phi,psi,increment\n";
  const std::size_t n = trace.samples();
  out.reserve(n * static_cast<std::size_t>(trace.dims) * 48 + 32);
  for (std::size_t row = 0; row < n; ++row) {
    const std::string t = std::to_string(trace.time_of(row));
    for (int d = 0; d < trace.dims; ++d) {
      out += t;
      out += ',';
      out += std::to_string(d + 1);
      out += ',';
      put_double(out, trace.log2_phi_at(row, d));
      out += ',';
      put_double(out, trace.psi_at(row, d));
      out += ',';
      if (row + 1 < n) put_double(out, trace.increment(row, d));
      out += '\n';
    }
  }
  return out;
}

PotentialTrace parse_trace_csv(std::string_view text, long delta_t) {
  if (delta_t < 1) corrupt("delta_t must be >= 1");
  PotentialTrace tr;
  tr.delta_t = delta_t;
  std::size_t pos = text.find('\n');
  if (pos == std::string_view::npos || text.substr(0, pos) != "t,d,log2_phi,psi,increment") {
    corrupt("trace CSV header mismatch");
  }
  ++pos;
  long current_t = -1;
  int max_d = 0;
  std::vector<double> log2_row, psi_row;
  auto flush = [&] {
    if (current_t < 0) return;
    if (tr.dims == 0) {
      tr.dims = max_d;
      tr.first_index = current_t / delta_t;
    } else if (max_d != tr.dims) {
      corrupt("trace rows disagree on dimension count");
    }
    const long expect = tr.first_index + static_cast<long>(tr.samples());
    if (current_t != expect * delta_t) corrupt("trace samples are not consecutive");
    tr.log2_phi.insert(tr.log2_phi.end(), log2_row.begin(), log2_row.end());
    tr.psi.insert(tr.psi.end(), psi_row.begin(), psi_row.end());
    log2_row.clear();
    psi_row.clear();
    max_d = 0;
  };
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    if (line.empty()) continue;
    std::string_view f[5];
    std::size_t start = 0;
    for (int k = 0; k < 5; ++k) {
      const std::size_t c = k < 4 ? line.find(',', start) : line.size();
      if (c == std::string_view::npos) corrupt("trace CSV row has too few fields");
      f[k] = line.substr(start, c - start);
      start = c + 1;
    }
    const long t = get_long(f[0]);
    const long d = get_long(f[1]);
    if (t != current_t) {
      flush();
      current_t = t;
    }
    if (d != max_d + 1) corrupt("trace dimensions out of order");
    max_d = static_cast<int>(d);
    log2_row.push_back(get_double(f[2]));
    psi_row.push_back(get_double(f[3]));
  }
  flush();
  return tr;
}

std::vector<std::uint8_t> phi_sidecar_bytes(const PotentialTrace& trace) {
  std::vector<std::uint8_t> out(kPhiMagic, kPhiMagic + 8);
  auto put64 = [&](std::uint64_t v) {
    for (int k = 0; k < 8; ++k) out.push_back(static_cast<std::uint8_t>(v >> (8 * k)));
  };
  put64(trace.phi.size());
  put64(static_cast<std::uint64_t>(trace.dims));
  for (const auto& row : trace.phi) {
    if (static_cast<int>(row.size()) != trace.dims) throw Error(ErrorKind::DimensionMismatch, "phi row width");
    for (const auto& v : row) v.append_binary(out);
  }
  return out;
}

std::vector<std::vector<BigReal>> parse_phi_sidecar(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 24 || std::memcmp(bytes.data(), kPhiMagic, 8) != 0) corrupt("phi sidecar header");
  auto get64 = [&](std::size_t at) {
    std::uint64_t v = 0;
    for (int k = 0; k < 8; ++k) v |= static_cast<std::uint64_t>(bytes[at + k]) << (8 * k);
    return v;
  };
  const std::uint64_t rows = get64(8);
  const std::uint64_t dims = get64(16);
  std::size_t off = 24;
  std::vector<std::vector<BigReal>> out;
  try {
    for (std::uint64_t r = 0; r < rows; ++r) {
      std::vector<BigReal> row;
      row.reserve(dims);
      for (std::uint64_t d = 0; d < dims; ++d) row.push_back(BigReal::read_binary(bytes, off));
      out.push_back(std::move(row));
    }
  } catch (const Error& e) {
    corrupt(std::string("phi sidecar: ") + e.what());
  }
  if (off != bytes.size()) corrupt("phi sidecar has trailing bytes");
  return out;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoError, "cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& p, std::string_view bytes) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::IoError, "cannot write " + p.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorKind::IoError, "write failed for " + p.string());
}

fs::path persist_runlog(const RunLog& log, const fs::path& dir) {
  fs::create_directories(dir);
  if (!log.trace_file.empty()) write_file(dir / log.trace_file, trace_csv_text(log.trace));
  if (!log.phi_file.empty()) {
    const auto bytes = phi_sidecar_bytes(log.trace);
    write_file(dir / log.phi_file,
               std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
  }
  const fs::path p = dir / "runlog.json";
  write_file(p, runlog_json_text(log));
  return p;
}

RunLog load_runlog(const fs::path& path, bool load_trace) {
  const fs::path file = fs::is_directory(path) ? path / "runlog.json" : path;
  const fs::path dir = file.parent_path();
  RunLog log = parse_runlog_json(read_file(file));
  if (load_trace && !log.trace_file.empty()) {
    long dt = 1;
    try {
      dt = log.config.at("delta_t").get<long>();
    } catch (const json::exception&) {
      corrupt("config has no delta_t");
    }
    log.trace = parse_trace_csv(read_file(dir / log.trace_file), dt);
    if (!log.phi_file.empty()) {
      const std::string raw = read_file(dir / log.phi_file);
      log.trace.phi = parse_phi_sidecar(
          std::span<const std::uint8_t>(reinterpret_cast<const std::uint8_t*>(raw.data()), raw.size()));
      if (log.trace.phi.size() != log.trace.samples()) corrupt("phi sidecar and trace disagree on samples");
    }
    log.has_trace = true;
  }
  return log;
}

std::vector<fs::path> list_run_directories(const fs::path& output_dir) {
  const fs::path runs = output_dir / "runs";
  if (!fs::is_directory(runs)) throw Error(ErrorKind::IoError, "no runs directory in " + output_dir.string());
  std::vector<std::pair<std::uint64_t, fs::path>> found;
  for (const auto& entry : fs::directory_iterator(runs)) {
    const std::string name = entry.path().filename().string();
    if (!entry.is_directory() || name.rfind("run_", 0) != 0) continue;
    if (!fs::exists(entry.path() / "runlog.json")) continue;
    std::uint64_t seed = 0;
    const char* b = name.data() + 4;
    auto res = std::from_chars(b, name.data() + name.size(), seed);
    if (res.ec != std::errc() || res.ptr != name.data() + name.size()) continue;
    found.emplace_back(seed, entry.path());
  }
  std::sort(found.begin(), found.end());
  std::vector<fs::path> out;
  for (auto& [_, p] : found) out.push_back(std::move(p));
  return out;
}

}  // namespace swarmlab
