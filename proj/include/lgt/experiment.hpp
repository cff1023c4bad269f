#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "lgt/sampler.hpp"

namespace lgt {

struct ModelSpec {
  Group group = Group::SU2;
  int ndims = 4;
  std::vector<int> extents;
  Boundary boundary = Boundary::Periodic;
};

struct ScheduleSpec {
  std::int64_t thermalization = 0;
  std::int64_t measurement = 0;
  std::int64_t cadence = 1;
};

struct ObservablesSpec {
  bool loops = true;
  int r_max = 2;
  int t_max = 2;
  bool correlations = false;
  std::vector<int> separations;
  bool tiny_exact_check = false;  // Z2 only: compare against enumeration
};

/// Declarative experiment description, parsed from a plain-text file of
/// `key = value` lines under bracketed `[section]` headers.
struct ExperimentConfig {
  ModelSpec model;
  SamplerParams sampler;
  ScheduleSpec schedule;
  ObservablesSpec observables;
  std::vector<double> scan_betas;
  std::string output_dir = "out";

  static ExperimentConfig parse(std::istream& in);
  static ExperimentConfig parse_file(const std::filesystem::path& path);

  /// Throws usage_error naming the offending key when inconsistent.
  void validate() const;

  /// Canonical one-line-per-key rendering; equal configs render equally.
  std::string canonical_text() const;
  /// FNV-1a hash of the canonical text, for provenance stamping.
  std::uint64_t hash() const;
};

/// Binary chain snapshot. Layout (little-endian): magic "LGTC", u32
/// version=1, u8 group, u8 ndims, u8 boundary, u8 pad, u32 extents[ndims],
/// f64 beta, u64 sweep counter, u64 x 4 RNG key/counter, then per stored
/// link the row-major (re, im) f64 pairs of its matrix.
struct Checkpoint {
  ModelSpec model;
  double beta = 0.0;
  std::uint64_t sweep = 0;
  std::array<std::uint64_t, 4> rng_state{{0, 0, 0, 0}};
  std::vector<Mat> links;

  void save(const std::filesystem::path& path) const;
  static Checkpoint load(const std::filesystem::path& path);
};

Checkpoint make_checkpoint(const Configuration& cfg, const ModelSpec& model,
                           double beta, std::uint64_t seed, std::uint64_t sweep);
Configuration restore_configuration(const Checkpoint& ckpt);

/// Seed for scan point `index`, derived from the master seed by
/// splitmix-style mixing so points are reproducible and independent.
std::uint64_t scan_point_seed(std::uint64_t master_seed, int index);

struct RunOutcome {
  std::filesystem::path dir;
  std::uint64_t sweeps_done = 0;
  bool finished = true;
};

/// Execute one chain: thermalize, measure, append newline-delimited JSON
/// measurement records, write checkpoint and summary.json. `resume` (may be
/// empty) points at a checkpoint to continue from; `stop_after` > 0 halts
/// after that many additional sweeps, leaving a resumable checkpoint.
RunOutcome run_experiment(const ExperimentConfig& config,
                          const std::filesystem::path& resume = {},
                          std::int64_t stop_after = 0);

/// Run every beta in the scan list (independent derived seeds) and write the
/// combined (beta, plaquette, c, d, xi) table. Per-point failures are
/// recorded and the scan continues. Returns the number of failed points.
int scan_experiment(const ExperimentConfig& config);

/// Turn run/scan outputs in `dir` into plot-ready columnar text files.
void write_report(const std::filesystem::path& dir);

}  // namespace lgt
