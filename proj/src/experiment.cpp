#include "lgt/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "lgt/errors.hpp"
#include "lgt/observables.hpp"
#include "lgt/oracle.hpp"
#include "lgt/stats.hpp"

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace lgt {

namespace {

constexpr const char* kCodeVersion = "0.1.0";

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split_ws(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream is(s);
  std::string tok;
  while (is >> tok) out.push_back(tok);
  return out;
}

long long parse_int(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    long long x = std::stoll(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw usage_error("config: key '" + key + "': not an integer: '" + v + "'");
  }
}

double parse_real(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw usage_error("config: key '" + key + "': not a number: '" + v + "'");
  }
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw usage_error("config: key '" + key + "': not a boolean: '" + v + "'");
}

const char* boundary_name(Boundary b) {
  return b == Boundary::Periodic ? "periodic" : "open";
}

Boundary boundary_from_name(const std::string& key, const std::string& v) {
  if (v == "periodic") return Boundary::Periodic;
  if (v == "open") return Boundary::Open;
  throw usage_error("config: key '" + key + "': unknown boundary '" + v + "'");
}

std::uint64_t splitmix_finalize(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ULL;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBULL;
  z ^= z >> 31;
  return z;
}

std::string fmt_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

ExperimentConfig ExperimentConfig::parse(std::istream& in) {
  ExperimentConfig cfg;
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::size_t hash_pos = line.find('#');
    if (hash_pos != std::string::npos) line.erase(hash_pos);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw usage_error("config line " + std::to_string(lineno) +
                          ": malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw usage_error("config line " + std::to_string(lineno) +
                        ": expected key = value");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    std::string full = section + "." + key;
    if (section == "model") {
      if (key == "group") cfg.model.group = group_from_name(value);
      else if (key == "ndims") cfg.model.ndims = static_cast<int>(parse_int(full, value));
      else if (key == "extents") {
        cfg.model.extents.clear();
        for (const std::string& t : split_ws(value))
          cfg.model.extents.push_back(static_cast<int>(parse_int(full, t)));
      } else if (key == "boundary") cfg.model.boundary = boundary_from_name(full, value);
      else throw usage_error("config: unknown key '" + full + "'");
    } else if (section == "sampler") {
      if (key == "beta") cfg.sampler.beta = parse_real(full, value);
      else if (key == "algorithm") cfg.sampler.algorithm = algorithm_from_name(value);
      else if (key == "proposal_spread") cfg.sampler.proposal_spread = parse_real(full, value);
      else if (key == "or_ratio") cfg.sampler.or_ratio = static_cast<int>(parse_int(full, value));
      else if (key == "seed") cfg.sampler.seed = static_cast<std::uint64_t>(parse_int(full, value));
      else if (key == "workers") cfg.sampler.workers = static_cast<int>(parse_int(full, value));
      else throw usage_error("config: unknown key '" + full + "'");
    } else if (section == "schedule") {
      if (key == "thermalization") cfg.schedule.thermalization = parse_int(full, value);
      else if (key == "measurement") cfg.schedule.measurement = parse_int(full, value);
      else if (key == "cadence") cfg.schedule.cadence = parse_int(full, value);
      else throw usage_error("config: unknown key '" + full + "'");
    } else if (section == "observables") {
      if (key == "loops") cfg.observables.loops = parse_bool(full, value);
      else if (key == "r_max") cfg.observables.r_max = static_cast<int>(parse_int(full, value));
      else if (key == "t_max") cfg.observables.t_max = static_cast<int>(parse_int(full, value));
      else if (key == "correlations") cfg.observables.correlations = parse_bool(full, value);
      else if (key == "separations") {
        cfg.observables.separations.clear();
        for (const std::string& t : split_ws(value))
          cfg.observables.separations.push_back(static_cast<int>(parse_int(full, t)));
      } else if (key == "tiny_exact_check")
        cfg.observables.tiny_exact_check = parse_bool(full, value);
      else throw usage_error("config: unknown key '" + full + "'");
    } else if (section == "scan") {
      if (key == "betas") {
        cfg.scan_betas.clear();
        for (const std::string& t : split_ws(value))
          cfg.scan_betas.push_back(parse_real(full, t));
      } else throw usage_error("config: unknown key '" + full + "'");
    } else if (section == "output") {
      if (key == "dir") cfg.output_dir = value;
      else throw usage_error("config: unknown key '" + full + "'");
    } else {
      throw usage_error("config: unknown section '" + section + "'");
    }
  }
  return cfg;
}

ExperimentConfig ExperimentConfig::parse_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw usage_error("config: cannot open '" + path.string() + "'");
  return parse(in);
}

void ExperimentConfig::validate() const {
  if (static_cast<int>(model.extents.size()) != model.ndims)
    throw usage_error("config: model.extents must list one extent per dimension");
  if (model.ndims < 2 || model.ndims > kMaxDims)
    throw usage_error("config: model.ndims must be 2, 3 or 4");
  int min_extent = model.extents.empty() ? 0 : model.extents[0];
  for (int e : model.extents) {
    if (e < 2) throw usage_error("config: model.extents entries must be >= 2");
    min_extent = std::min(min_extent, e);
  }
  if (sampler.beta < 0) throw usage_error("config: sampler.beta must be >= 0");
  if (!(sampler.proposal_spread > 0) || sampler.proposal_spread > 2)
    throw usage_error("config: sampler.proposal_spread must be in (0, 2]");
  if (sampler.or_ratio < 0) throw usage_error("config: sampler.or_ratio must be >= 0");
  if (sampler.workers < 1) throw usage_error("config: sampler.workers must be >= 1");
  if (schedule.thermalization < 0 || schedule.measurement < 0)
    throw usage_error("config: schedule sweep counts must be >= 0");
  if (schedule.cadence < 1) throw usage_error("config: schedule.cadence must be >= 1");
  if (observables.loops) {
    if (observables.r_max < 1 || observables.t_max < 1)
      throw usage_error("config: observables.r_max/t_max must be >= 1");
    if (std::max(observables.r_max, observables.t_max) > min_extent - 1)
      throw usage_error(
          "config: observables.r_max/t_max must be <= smallest extent - 1");
  }
  if (observables.correlations) {
    if (observables.separations.empty())
      throw usage_error("config: observables.separations must be nonempty");
    for (int x : observables.separations) {
      if (x < 0) throw usage_error("config: observables.separations must be >= 0");
      if (model.boundary == Boundary::Periodic && 2 * x > min_extent)
        throw usage_error("config: observables.separations must be <= extent/2");
    }
  }
  if (observables.tiny_exact_check && model.group != Group::Z2)
    throw usage_error("config: observables.tiny_exact_check requires group z2");
  for (std::size_t i = 0; i < scan_betas.size(); ++i) {
    if (!(scan_betas[i] > 0))
      throw usage_error("config: scan.betas must be positive");
    if (i > 0 && !(scan_betas[i] > scan_betas[i - 1]))
      throw usage_error("config: scan.betas must be strictly increasing");
  }
  if (output_dir.empty()) throw usage_error("config: output.dir must be set");
}

std::string ExperimentConfig::canonical_text() const {
  std::ostringstream os;
  os << "model.group=" << group_name(model.group) << "\n";
  os << "model.ndims=" << model.ndims << "\n";
  os << "model.extents=";
  for (std::size_t i = 0; i < model.extents.size(); ++i)
    os << (i ? " " : "") << model.extents[i];
  os << "\n";
  os << "model.boundary=" << boundary_name(model.boundary) << "\n";
  os << "sampler.beta=" << fmt_real(sampler.beta) << "\n";
  os << "sampler.algorithm=" << algorithm_name(sampler.algorithm) << "\n";
  os << "sampler.proposal_spread=" << fmt_real(sampler.proposal_spread) << "\n";
  os << "sampler.or_ratio=" << sampler.or_ratio << "\n";
  os << "sampler.seed=" << sampler.seed << "\n";
  os << "sampler.workers=" << sampler.workers << "\n";
  os << "schedule.thermalization=" << schedule.thermalization << "\n";
  os << "schedule.measurement=" << schedule.measurement << "\n";
  os << "schedule.cadence=" << schedule.cadence << "\n";
  os << "observables.loops=" << (observables.loops ? "true" : "false") << "\n";
  os << "observables.r_max=" << observables.r_max << "\n";
  os << "observables.t_max=" << observables.t_max << "\n";
  os << "observables.correlations="
     << (observables.correlations ? "true" : "false") << "\n";
  os << "observables.separations=";
  for (std::size_t i = 0; i < observables.separations.size(); ++i)
    os << (i ? " " : "") << observables.separations[i];
  os << "\n";
  os << "observables.tiny_exact_check="
     << (observables.tiny_exact_check ? "true" : "false") << "\n";
  os << "scan.betas=";
  for (std::size_t i = 0; i < scan_betas.size(); ++i)
    os << (i ? " " : "") << fmt_real(scan_betas[i]);
  os << "\n";
  os << "output.dir=" << output_dir << "\n";
  return os.str();
}

std::uint64_t ExperimentConfig::hash() const {
  std::string text = canonical_text();
  std::uint64_t h = 0xCBF29CE484222325ULL;  // FNV-1a 64
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return h;
}

// --- checkpoint -----------------------------------------------------------

namespace {

template <typename T>
void put(std::string& buf, T v) {
  char tmp[sizeof(T)];
  std::memcpy(tmp, &v, sizeof(T));
  buf.append(tmp, sizeof(T));  // host is little-endian per build target
}

template <typename T>
T take(const std::string& buf, std::size_t& pos) {
  if (pos + sizeof(T) > buf.size())
    throw numerical_error("checkpoint: truncated file");
  T v;
  std::memcpy(&v, buf.data() + pos, sizeof(T));
  pos += sizeof(T);
  return v;
}

}  // namespace

void Checkpoint::save(const fs::path& path) const {
  std::string buf;
  buf.append("LGTC", 4);
  put<std::uint32_t>(buf, 1);
  put<std::uint8_t>(buf, static_cast<std::uint8_t>(model.group));
  put<std::uint8_t>(buf, static_cast<std::uint8_t>(model.ndims));
  put<std::uint8_t>(buf, static_cast<std::uint8_t>(model.boundary));
  put<std::uint8_t>(buf, 0);
  for (int e : model.extents) put<std::uint32_t>(buf, static_cast<std::uint32_t>(e));
  put<double>(buf, beta);
  put<std::uint64_t>(buf, sweep);
  for (std::uint64_t w : rng_state) put<std::uint64_t>(buf, w);
  const int n = matrix_order(model.group);
  for (const Mat& m : links)
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c) {
        put<double>(buf, m(r, c).real());
        put<double>(buf, m(r, c).imag());
      }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw usage_error("checkpoint: cannot write '" + path.string() + "'");
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
}

Checkpoint Checkpoint::load(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw usage_error("checkpoint: cannot open '" + path.string() + "'");
  std::string buf((std::istreambuf_iterator<char>(in)),
                  std::istreambuf_iterator<char>());
  std::size_t pos = 0;
  if (buf.size() < 4 || buf.compare(0, 4, "LGTC") != 0)
    throw numerical_error("checkpoint: bad magic");
  pos = 4;
  if (take<std::uint32_t>(buf, pos) != 1)
    throw numerical_error("checkpoint: unsupported version");
  Checkpoint ck;
  ck.model.group = static_cast<Group>(take<std::uint8_t>(buf, pos));
  ck.model.ndims = take<std::uint8_t>(buf, pos);
  ck.model.boundary = static_cast<Boundary>(take<std::uint8_t>(buf, pos));
  take<std::uint8_t>(buf, pos);
  if (ck.model.ndims < 2 || ck.model.ndims > kMaxDims)
    throw numerical_error("checkpoint: bad dimension count");
  for (int j = 0; j < ck.model.ndims; ++j)
    ck.model.extents.push_back(static_cast<int>(take<std::uint32_t>(buf, pos)));
  ck.beta = take<double>(buf, pos);
  ck.sweep = take<std::uint64_t>(buf, pos);
  for (std::uint64_t& w : ck.rng_state) w = take<std::uint64_t>(buf, pos);
  Lattice lat(ck.model.ndims, ck.model.extents, ck.model.boundary);
  const int n = matrix_order(ck.model.group);
  const std::size_t payload = static_cast<std::size_t>(lat.n_links()) * n * n * 16;
  if (buf.size() - pos != payload)
    throw numerical_error("checkpoint: payload length mismatch");
  ck.links.reserve(static_cast<std::size_t>(lat.n_links()));
  for (std::int64_t i = 0; i < lat.n_links(); ++i) {
    Mat m(n, n);
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c) {
        double re = take<double>(buf, pos);
        double im = take<double>(buf, pos);
        m(r, c) = Complex(re, im);
      }
    ck.links.push_back(m);
  }
  return ck;
}

Checkpoint make_checkpoint(const Configuration& cfg, const ModelSpec& model,
                           double beta, std::uint64_t seed, std::uint64_t sweep) {
  Checkpoint ck;
  ck.model = model;
  ck.beta = beta;
  ck.sweep = sweep;
  // Streams are derived per (seed, sweep, link); the seed and sweep counter
  // are all the generator state there is.
  ck.rng_state = {seed, 0, sweep, 0};
  ck.links = cfg.raw_links();
  return ck;
}

Configuration restore_configuration(const Checkpoint& ckpt) {
  auto lattice = std::make_shared<Lattice>(ckpt.model.ndims, ckpt.model.extents,
                                           ckpt.model.boundary);
  Configuration cfg = cold_start(lattice, ckpt.model.group);
  if (ckpt.links.size() != static_cast<std::size_t>(lattice->n_links()))
    throw numerical_error("checkpoint: link count mismatch");
  for (std::size_t i = 0; i < ckpt.links.size(); ++i) {
    if (!in_group(ckpt.model.group, ckpt.links[i], 1e-8))
      throw numerical_error("checkpoint: link matrix not in the group");
    cfg.set_link(static_cast<std::int64_t>(i), ckpt.links[i]);
  }
  return cfg;
}

std::uint64_t scan_point_seed(std::uint64_t master_seed, int index) {
  return splitmix_finalize(master_seed +
                           0x9E3779B97F4A7C15ULL * (static_cast<std::uint64_t>(index) + 1));
}

// --- run ------------------------------------------------------------------

namespace {

ordered_json provenance_json(const ExperimentConfig& config) {
  char hex[20];
  std::snprintf(hex, sizeof hex, "%016llx",
                static_cast<unsigned long long>(config.hash()));
  ordered_json p;
  p["config_hash"] = hex;
  p["seed"] = config.sampler.seed;
  p["code_version"] = kCodeVersion;
  return p;
}

ordered_json fit_json(const FitResult& fit) {
  ordered_json j;
  j["ok"] = fit.ok;
  for (const auto& [k, v] : fit.params) {
    j["params"][k] = v;
    j["errors"][k] = fit.errors.at(k);
  }
  j["window"] = fit.window;
  j["quality"] = fit.quality;
  if (!fit.diagnostic.empty()) j["diagnostic"] = fit.diagnostic;
  return j;
}

/// Measurement records read back from disk, grouped for analysis.
struct SeriesStore {
  MeasurementSeries plaquette;
  LoopEnsemble loops;
  CorrelationEnsemble corr;
  std::vector<double> plaq_trace;  // parallel to corr.sweeps

  void load(const fs::path& file, const ObservablesSpec& obs) {
    corr.separations = obs.separations;
    std::ifstream in(file);
    if (!in) throw usage_error("summary: cannot open '" + file.string() + "'");
    std::string line;
    std::map<std::uint64_t, LoopSample> loop_rows;
    std::map<std::uint64_t, CorrelationSample> corr_rows;
    while (std::getline(in, line)) {
      if (trim(line).empty()) continue;
      ordered_json rec = ordered_json::parse(line);
      std::string name = rec["name"];
      if (name == "provenance") continue;
      std::uint64_t sweep = rec["sweep"];
      double value = rec["value"];
      if (name == "plaquette") {
        plaquette.append(sweep, value);
      } else if (name == "loop") {
        LoopSample& s = loop_rows[sweep];
        if (s.r_max == 0) {
          s.r_max = obs.r_max;
          s.t_max = obs.t_max;
          s.re.assign(static_cast<std::size_t>(obs.r_max) * obs.t_max, 0.0);
          s.im.assign(s.re.size(), 0.0);
        }
        s.at(rec["params"]["R"].get<int>(), rec["params"]["T"].get<int>()) = value;
      } else if (name == "plaquette_trace") {
        corr_rows[sweep].mean_plaquette = value;
      } else if (name == "corr_product") {
        CorrelationSample& s = corr_rows[sweep];
        if (s.products.empty()) s.products.resize(obs.separations.size(), 0.0);
        int x = rec["params"]["x"];
        for (std::size_t i = 0; i < obs.separations.size(); ++i)
          if (obs.separations[i] == x) s.products[i] = value;
      }
    }
    for (auto& [sweep, s] : loop_rows) loops.add(sweep, std::move(s));
    for (auto& [sweep, s] : corr_rows) corr.add(sweep, std::move(s));
  }
};

ordered_json build_summary(const ExperimentConfig& config, const fs::path& dir,
                           std::uint64_t sweeps_done, double acceptance) {
  const ObservablesSpec& obs = config.observables;
  SeriesStore store;
  store.load(dir / "measurements.ndjson", obs);

  ordered_json s;
  s["provenance"] = provenance_json(config);
  s["model"]["group"] = group_name(config.model.group);
  s["model"]["ndims"] = config.model.ndims;
  s["model"]["extents"] = config.model.extents;
  s["model"]["boundary"] = boundary_name(config.model.boundary);
  s["beta"] = config.sampler.beta;
  s["algorithm"] = algorithm_name(config.sampler.algorithm);
  s["sweeps"] = sweeps_done;
  s["acceptance"] = acceptance;
  s["n_measurements"] = store.plaquette.values.size();

  int bin_size = 1;
  if (!store.plaquette.values.empty()) {
    bin_size = default_bin_size(store.plaquette.values);
    ordered_json pj;
    if (store.plaquette.values.size() >= 2 * static_cast<std::size_t>(bin_size)) {
      Jackknife jk = jackknife_mean_error(store.plaquette.values, bin_size);
      pj["mean"] = jk.mean;
      pj["error"] = jk.error;
      pj["bin_size"] = bin_size;
    }
    if (store.plaquette.values.size() >= 100) {
      TauInt t = integrated_autocorrelation_time(store.plaquette.values);
      pj["tau_int"] = t.tau;
      pj["tau_int_error"] = t.error;
    }
    s["plaquette"] = pj;
  }

  if (obs.loops && !store.loops.samples.empty() &&
      store.loops.samples.size() >= 2 * static_cast<std::size_t>(bin_size)) {
    LoopTable table = loop_expectation_table(store.loops, bin_size);
    ordered_json lj;
    lj["r_max"] = table.r_max;
    lj["t_max"] = table.t_max;
    lj["mean"] = table.mean;
    lj["error"] = table.err;
    if (obs.r_max >= 2 && obs.t_max >= 2) {
      try {
        ValueWithError chi = creutz_ratio(store.loops, 2, 2, bin_size);
        lj["creutz_2_2"] = {{"value", chi.value}, {"error", chi.error}};
      } catch (const numerical_error& e) {
        lj["creutz_2_2"] = {{"diagnostic", e.what()}};
      }
    }
    ordered_json pot = ordered_json::array();
    for (int R = 1; R <= obs.r_max; ++R) {
      FitResult v = static_potential(table, R);
      ordered_json row = fit_json(v);
      row["R"] = R;
      pot.push_back(row);
    }
    lj["potential"] = pot;
    if (static_cast<std::size_t>(obs.r_max) * obs.t_max >= 6) {
      try {
        lj["perimeter_area_fit"] = fit_json(perimeter_area_fit(store.loops, bin_size));
      } catch (const std::exception& e) {
        lj["perimeter_area_fit"] = {{"ok", false}, {"diagnostic", e.what()}};
      }
    }
    s["loops"] = lj;
  }

  if (obs.correlations && !store.corr.samples.empty() &&
      store.corr.samples.size() >= 2 * static_cast<std::size_t>(bin_size)) {
    std::vector<CorrelationPoint> pts = plaquette_correlation(store.corr, bin_size);
    ordered_json cj;
    ordered_json rows = ordered_json::array();
    for (const CorrelationPoint& p : pts)
      rows.push_back({{"x", p.x}, {"f", p.f}, {"error", p.err}});
    cj["points"] = rows;
    cj["mass_gap_fit"] = fit_json(mass_gap_fit(pts));
    s["correlation"] = cj;
  }

  if (obs.tiny_exact_check) {
    Lattice lat(config.model.ndims, config.model.extents, config.model.boundary);
    ordered_json ej;
    if (lat.n_links() > 24) {
      ej["ok"] = false;
      ej["diagnostic"] = "lattice too large for exact enumeration";
    } else if (s.contains("plaquette") && s["plaquette"].contains("mean")) {
      double exact = exact_tiny_lattice(lat, config.sampler.beta,
                                        [](const Configuration& c) {
                                          return plaquette_average(c);
                                        });
      double mean = s["plaquette"]["mean"];
      double err = s["plaquette"]["error"];
      ej["exact"] = exact;
      ej["mcmc_mean"] = mean;
      ej["mcmc_error"] = err;
      ej["deviation_sigma"] = err > 0 ? std::abs(mean - exact) / err : 0.0;
      ej["ok"] = err > 0 && std::abs(mean - exact) <= 5.0 * err;
    } else {
      ej["ok"] = false;
      ej["diagnostic"] = "no plaquette statistics available";
    }
    s["exactness_check"] = ej;
  }
  return s;
}

}  // namespace

RunOutcome run_experiment(const ExperimentConfig& config, const fs::path& resume,
                          std::int64_t stop_after) {
  config.validate();
  fs::create_directories(config.output_dir);
  const fs::path dir = config.output_dir;

  auto lattice = std::make_shared<Lattice>(config.model.ndims, config.model.extents,
                                           config.model.boundary);
  Configuration cfg = cold_start(lattice, config.model.group);
  std::uint64_t start_sweep = 0;
  if (!resume.empty()) {
    Checkpoint ck = Checkpoint::load(resume);
    if (ck.model.group != config.model.group ||
        ck.model.ndims != config.model.ndims ||
        ck.model.extents != config.model.extents ||
        ck.model.boundary != config.model.boundary)
      throw usage_error("resume: checkpoint model does not match config");
    if (ck.beta != config.sampler.beta)
      throw usage_error("resume: checkpoint beta does not match config");
    cfg = restore_configuration(ck);
    start_sweep = ck.sweep;
  }

  const std::int64_t total =
      config.schedule.thermalization + config.schedule.measurement;
  std::int64_t remaining = total - static_cast<std::int64_t>(start_sweep);
  if (remaining < 0) remaining = 0;
  bool finished = true;
  if (stop_after > 0 && stop_after < remaining) {
    remaining = stop_after;
    finished = false;
  }

  std::ofstream meas;
  if (start_sweep == 0) {
    meas.open(dir / "measurements.ndjson", std::ios::trunc);
    ordered_json head;
    head["sweep"] = 0;
    head["name"] = "provenance";
    head["params"] = provenance_json(config);
    head["value"] = 0.0;
    meas << head.dump() << "\n";
  } else {
    meas.open(dir / "measurements.ndjson", std::ios::app);
  }
  if (!meas) throw usage_error("run: cannot write measurements in '" + dir.string() + "'");

  const std::int64_t therm = config.schedule.thermalization;
  const ObservablesSpec& obs = config.observables;
  auto hook = [&](const Configuration& c, std::uint64_t sweep) {
    if (static_cast<std::int64_t>(sweep) < therm) return;
    auto emit = [&](const char* name, ordered_json params, double value) {
      ordered_json rec;
      rec["sweep"] = sweep;
      rec["name"] = name;
      rec["params"] = std::move(params);
      rec["value"] = value;
      meas << rec.dump() << "\n";
    };
    emit("plaquette", ordered_json::object(), plaquette_average(c));
    if (obs.loops) {
      LoopSample ls = measure_loops(c, obs.r_max, obs.t_max);
      for (int R = 1; R <= obs.r_max; ++R)
        for (int T = 1; T <= obs.t_max; ++T)
          emit("loop", {{"R", R}, {"T", T}}, ls.at(R, T));
    }
    if (obs.correlations) {
      CorrelationSample cs = measure_plaquette_correlation(c, obs.separations);
      emit("plaquette_trace", ordered_json::object(), cs.mean_plaquette);
      for (std::size_t i = 0; i < obs.separations.size(); ++i)
        emit("corr_product", {{"x", obs.separations[i]}}, cs.products[i]);
    }
  };

  ChainStats stats = run_chain(cfg, config.sampler, remaining,
                               config.schedule.cadence, hook, start_sweep);
  meas.close();

  const std::uint64_t now = start_sweep + static_cast<std::uint64_t>(remaining);
  make_checkpoint(cfg, config.model, config.sampler.beta, config.sampler.seed, now)
      .save(dir / "checkpoint.ckpt");

  RunOutcome outcome;
  outcome.dir = dir;
  outcome.sweeps_done = now;
  outcome.finished = finished && static_cast<std::int64_t>(now) >= total;
  if (outcome.finished) {
    ordered_json summary = build_summary(config, dir, now, stats.mean_acceptance);
    std::ofstream out(dir / "summary.json", std::ios::trunc);
    out << summary.dump(2) << "\n";
  }
  return outcome;
}

// --- scan -----------------------------------------------------------------

namespace {

std::string beta_dir_name(int index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "beta_%03d", index);
  return buf;
}

double json_num(const ordered_json& j, std::initializer_list<const char*> path,
                double fallback) {
  const ordered_json* cur = &j;
  for (const char* key : path) {
    if (!cur->contains(key)) return fallback;
    cur = &(*cur)[key];
  }
  return cur->is_number() ? cur->get<double>() : fallback;
}

}  // namespace

int scan_experiment(const ExperimentConfig& config) {
  config.validate();
  if (config.scan_betas.empty())
    throw usage_error("scan: config has no scan.betas list");
  fs::create_directories(config.output_dir);

  ordered_json table = ordered_json::array();
  int failures = 0;
  const double nan = std::nan("");
  for (std::size_t i = 0; i < config.scan_betas.size(); ++i) {
    ExperimentConfig point = config;
    point.scan_betas.clear();
    point.sampler.beta = config.scan_betas[i];
    point.sampler.seed = scan_point_seed(config.sampler.seed, static_cast<int>(i));
    point.output_dir =
        (fs::path(config.output_dir) / beta_dir_name(static_cast<int>(i))).string();
    ordered_json row;
    row["beta"] = point.sampler.beta;
    row["seed"] = point.sampler.seed;
    row["dir"] = beta_dir_name(static_cast<int>(i));
    try {
      run_experiment(point);
      std::ifstream in(fs::path(point.output_dir) / "summary.json");
      ordered_json summary = ordered_json::parse(in);
      row["ok"] = true;
      row["plaquette"] = json_num(summary, {"plaquette", "mean"}, nan);
      row["plaquette_error"] = json_num(summary, {"plaquette", "error"}, nan);
      row["c"] = json_num(summary, {"loops", "perimeter_area_fit", "params", "c"}, nan);
      row["c_error"] = json_num(summary, {"loops", "perimeter_area_fit", "errors", "c"}, nan);
      row["d"] = json_num(summary, {"loops", "perimeter_area_fit", "params", "d"}, nan);
      row["d_error"] = json_num(summary, {"loops", "perimeter_area_fit", "errors", "d"}, nan);
      row["xi"] = json_num(summary, {"correlation", "mass_gap_fit", "params", "xi"}, nan);
      row["xi_error"] = json_num(summary, {"correlation", "mass_gap_fit", "errors", "xi"}, nan);
    } catch (const std::exception& e) {
      row["ok"] = false;
      row["diagnostic"] = e.what();
      ++failures;
    }
    table.push_back(row);
  }
  ordered_json out;
  out["provenance"] = provenance_json(config);
  out["points"] = table;
  std::ofstream jf(fs::path(config.output_dir) / "scan_table.json", std::ios::trunc);
  jf << out.dump(2) << "\n";

  std::ofstream tf(fs::path(config.output_dir) / "scan_table.tsv", std::ios::trunc);
  tf << "# beta\tplaquette\tplaquette_err\tc\tc_err\td\td_err\txi\txi_err\tok\n";
  for (const ordered_json& row : table) {
    auto col = [&](const char* k) {
      double v = row.contains(k) && row[k].is_number() ? row[k].get<double>() : nan;
      return fmt_real(v);
    };
    tf << fmt_real(row["beta"].get<double>()) << "\t" << col("plaquette") << "\t"
       << col("plaquette_error") << "\t" << col("c") << "\t" << col("c_error")
       << "\t" << col("d") << "\t" << col("d_error") << "\t" << col("xi") << "\t"
       << col("xi_error") << "\t" << (row["ok"].get<bool>() ? 1 : 0) << "\n";
  }
  return failures;
}

// --- report ---------------------------------------------------------------

void write_report(const fs::path& dir) {
  const fs::path summary_path = dir / "summary.json";
  const fs::path scan_path = dir / "scan_table.json";
  if (fs::exists(summary_path)) {
    std::ifstream in(summary_path);
    ordered_json s = ordered_json::parse(in);
    const double nan = std::nan("");
    if (s.contains("loops")) {
      const ordered_json& lj = s["loops"];
      double c_fit = json_num(lj, {"perimeter_area_fit", "params", "c"}, nan);
      int r_max = lj["r_max"], t_max = lj["t_max"];
      std::ofstream out(dir / "loops.dat", std::ios::trunc);
      out << "# R T area perimeter W W_err logW logW_plus_c_perimeter\n";
      for (int R = 1; R <= r_max; ++R)
        for (int T = 1; T <= t_max; ++T) {
          std::size_t idx = static_cast<std::size_t>(R - 1) * t_max + (T - 1);
          double w = lj["mean"][idx], err = lj["error"][idx];
          double logw = w > 0 ? std::log(w) : nan;
          out << R << " " << T << " " << R * T << " " << 2 * (R + T) << " "
              << fmt_real(w) << " " << fmt_real(err) << " " << fmt_real(logw)
              << " " << fmt_real(logw + c_fit * (R + T)) << "\n";
        }
      std::ofstream pot(dir / "potential.dat", std::ios::trunc);
      pot << "# R V V_err\n";
      for (const ordered_json& row : lj["potential"])
        if (row["ok"].get<bool>())
          pot << row["R"].get<int>() << " "
              << fmt_real(row["params"]["V"].get<double>()) << " "
              << fmt_real(row["errors"]["V"].get<double>()) << "\n";
    }
    if (s.contains("correlation")) {
      std::ofstream out(dir / "correlation.dat", std::ios::trunc);
      out << "# x f f_err logf\n";
      for (const ordered_json& row : s["correlation"]["points"]) {
        double f = row["f"];
        out << row["x"].get<int>() << " " << fmt_real(f) << " "
            << fmt_real(row["error"].get<double>()) << " "
            << fmt_real(f > 0 ? std::log(f) : std::nan("")) << "\n";
      }
    }
    if (!s.contains("loops") && !s.contains("correlation"))
      throw usage_error("report: summary has no loop or correlation data");
    return;
  }
  if (fs::exists(scan_path)) {
    std::ifstream in(scan_path);
    ordered_json s = ordered_json::parse(in);
    std::ofstream out(dir / "scan.dat", std::ios::trunc);
    out << "# beta plaquette plaquette_err c c_err d d_err xi xi_err\n";
    const double nan = std::nan("");
    for (const ordered_json& row : s["points"]) {
      if (!row["ok"].get<bool>()) continue;
      auto col = [&](const char* k) {
        double v = row.contains(k) && row[k].is_number() ? row[k].get<double>() : nan;
        return fmt_real(v);
      };
      out << fmt_real(row["beta"].get<double>()) << " " << col("plaquette") << " "
          << col("plaquette_error") << " " << col("c") << " " << col("c_error")
          << " " << col("d") << " " << col("d_error") << " " << col("xi") << " "
          << col("xi_error") << "\n";
    }
    return;
  }
  throw usage_error("report: no summary.json or scan_table.json in '" +
                    dir.string() + "'");
}

}  // namespace lgt
