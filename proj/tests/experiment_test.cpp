#include <doctest.h>

#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "lgt/errors.hpp"
#include "lgt/experiment.hpp"

using namespace lgt;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           fs::path("lgt_test_" + std::to_string(::getpid()) + "_" +
                    std::to_string(counter()++));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  static int& counter() {
    static int c = 0;
    return c;
  }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ExperimentConfig tiny_config(const fs::path& out_dir) {
  std::istringstream in(
      "[model]\n"
      "group = z2\n"
      "ndims = 2\n"
      "extents = 2 2\n"
      "boundary = open\n"
      "[sampler]\n"
      "beta = 0.7\n"
      "algorithm = heatbath\n"
      "seed = 11\n"
      "[schedule]\n"
      "thermalization = 100\n"
      "measurement = 3000\n"
      "cadence = 1\n"
      "[observables]\n"
      "loops = true\n"
      "r_max = 1\n"
      "t_max = 1\n"
      "tiny_exact_check = true\n"
      "[output]\n"
      "dir = " + out_dir.string() + "\n");
  return ExperimentConfig::parse(in);
}

}  // namespace

TEST_SUITE("experiment") {

TEST_CASE("config parsing: round trip, diagnostics, validation") {
  std::istringstream in(
      "[model]\n"
      "group = su2\n"
      "ndims = 3\n"
      "extents = 4 4 4\n"
      "# comment lines and blanks are skipped\n"
      "\n"
      "[sampler]\n"
      "beta = 1.25\n"
      "algorithm = metropolis\n"
      "proposal_spread = 0.4\n"
      "seed = 99\n"
      "workers = 2\n"
      "[schedule]\n"
      "thermalization = 10\n"
      "measurement = 20\n"
      "[observables]\n"
      "r_max = 2\n"
      "t_max = 3\n");
  ExperimentConfig cfg = ExperimentConfig::parse(in);
  CHECK(cfg.model.group == Group::SU2);
  CHECK(cfg.model.extents == std::vector<int>{4, 4, 4});
  CHECK(cfg.sampler.beta == doctest::Approx(1.25));
  CHECK(cfg.sampler.workers == 2);
  CHECK(cfg.observables.t_max == 3);
  cfg.validate();

  // The canonical rendering hashes equal for equal configs and differs when
  // any field moves.
  std::uint64_t h = cfg.hash();
  ExperimentConfig copy = cfg;
  CHECK(copy.hash() == h);
  copy.sampler.beta = 1.26;
  CHECK(copy.hash() != h);

  // Unknown keys are named in the diagnostic.
  std::istringstream bad("[model]\nflavor = up\n");
  try {
    ExperimentConfig::parse(bad);
    FAIL("expected usage_error");
  } catch (const usage_error& e) {
    CHECK(std::string(e.what()).find("model.flavor") != std::string::npos);
  }

  // Loop sizes must fit inside the lattice.
  ExperimentConfig toobig = cfg;
  toobig.observables.r_max = 4;
  CHECK_THROWS_AS(toobig.validate(), usage_error);

  // Scan betas must be positive and increasing.
  ExperimentConfig scan = cfg;
  scan.scan_betas = {0.5, 0.5};
  CHECK_THROWS_AS(scan.validate(), usage_error);
}

TEST_CASE("checkpoint: byte-level round trip and corruption detection") {
  TempDir tmp;
  auto lat = std::make_shared<Lattice>(2, std::vector<int>{3, 3}, Boundary::Periodic);
  Configuration cfg = hot_start(lat, Group::SU2, 77);
  ModelSpec model{Group::SU2, 2, {3, 3}, Boundary::Periodic};
  Checkpoint ck = make_checkpoint(cfg, model, 1.5, 77, 42);
  fs::path p = tmp.path / "state.ckpt";
  ck.save(p);

  Checkpoint back = Checkpoint::load(p);
  CHECK(back.beta == 1.5);
  CHECK(back.sweep == 42);
  CHECK(back.rng_state == ck.rng_state);
  Configuration restored = restore_configuration(back);
  for (std::int64_t i = 0; i < lat->n_links(); ++i)
    CHECK((restored.link(i) - cfg.link(i)).norm() == 0.0);

  // Saving the reload reproduces the file byte for byte.
  fs::path p2 = tmp.path / "state2.ckpt";
  back.save(p2);
  CHECK(slurp(p) == slurp(p2));

  // Corrupted magic and truncation are both detected.
  std::string bytes = slurp(p);
  bytes[0] = 'X';
  {
    std::ofstream out(tmp.path / "bad.ckpt", std::ios::binary);
    out << bytes;
  }
  CHECK_THROWS_AS(Checkpoint::load(tmp.path / "bad.ckpt"), numerical_error);
  {
    std::ofstream out(tmp.path / "short.ckpt", std::ios::binary);
    out << slurp(p).substr(0, 40);
  }
  CHECK_THROWS_AS(Checkpoint::load(tmp.path / "short.ckpt"), numerical_error);
  CHECK_THROWS_AS(Checkpoint::load(tmp.path / "missing.ckpt"), usage_error);
}

TEST_CASE("scan point seeds are distinct and reproducible") {
  CHECK(scan_point_seed(1, 0) == scan_point_seed(1, 0));
  CHECK(scan_point_seed(1, 0) != scan_point_seed(1, 1));
  CHECK(scan_point_seed(1, 0) != scan_point_seed(2, 0));
}

TEST_CASE("a tiny run produces records, summary and a passing exactness check") {
  TempDir tmp;
  ExperimentConfig cfg = tiny_config(tmp.path / "run");
  RunOutcome out = run_experiment(cfg);
  CHECK(out.finished);
  CHECK(fs::exists(out.dir / "measurements.ndjson"));
  CHECK(fs::exists(out.dir / "checkpoint.ckpt"));
  CHECK(fs::exists(out.dir / "summary.json"));

  std::string summary = slurp(out.dir / "summary.json");
  CHECK(summary.find("\"plaquette\"") != std::string::npos);
  CHECK(summary.find("\"exactness_check\"") != std::string::npos);
  CHECK(summary.find("\"ok\": true") != std::string::npos);

  // First NDJSON line is the provenance header; the rest are records.
  std::ifstream nd(out.dir / "measurements.ndjson");
  std::string first;
  std::getline(nd, first);
  CHECK(first.find("\"config_hash\"") != std::string::npos);
  std::string rec;
  std::getline(nd, rec);
  CHECK(rec.find("\"name\"") != std::string::npos);
  CHECK(rec.find("\"sweep\"") != std::string::npos);
}

TEST_CASE("repeated runs of one config are byte-identical") {
  TempDir tmp;
  ExperimentConfig cfg = tiny_config(tmp.path / "run");
  run_experiment(cfg);
  std::string nd1 = slurp(tmp.path / "run" / "measurements.ndjson");
  std::string ck1 = slurp(tmp.path / "run" / "checkpoint.ckpt");
  run_experiment(cfg);
  CHECK(slurp(tmp.path / "run" / "measurements.ndjson") == nd1);
  CHECK(slurp(tmp.path / "run" / "checkpoint.ckpt") == ck1);
}

TEST_CASE("an interrupted run resumes to the identical result") {
  TempDir tmp;
  ExperimentConfig cfg = tiny_config(tmp.path / "full");
  run_experiment(cfg);
  std::string full_nd = slurp(tmp.path / "full" / "measurements.ndjson");
  std::string full_ck = slurp(tmp.path / "full" / "checkpoint.ckpt");

  ExperimentConfig split = tiny_config(tmp.path / "split");
  RunOutcome part = run_experiment(split, {}, 1234);
  CHECK_FALSE(part.finished);
  RunOutcome done = run_experiment(split, part.dir / "checkpoint.ckpt");
  CHECK(done.finished);
  // Output directory name feeds the provenance hash, so compare records
  // after the header line.
  auto body = [](std::string s) { return s.substr(s.find('\n') + 1); };
  CHECK(body(slurp(tmp.path / "split" / "measurements.ndjson")) == body(full_nd));
  CHECK(slurp(tmp.path / "split" / "checkpoint.ckpt") == full_ck);

  // Resuming with a mismatched model is refused.
  ExperimentConfig other = tiny_config(tmp.path / "other");
  other.sampler.beta = 0.9;
  CHECK_THROWS_AS(
      run_experiment(other, tmp.path / "split" / "checkpoint.ckpt"), usage_error);
}

TEST_CASE("scan: per-beta subdirectories and combined table") {
  TempDir tmp;
  ExperimentConfig cfg = tiny_config(tmp.path / "scan");
  cfg.schedule.measurement = 500;
  cfg.observables.tiny_exact_check = false;
  cfg.scan_betas = {0.4, 0.8};
  CHECK(scan_experiment(cfg) == 0);
  CHECK(fs::exists(tmp.path / "scan" / "beta_000" / "summary.json"));
  CHECK(fs::exists(tmp.path / "scan" / "beta_001" / "summary.json"));
  std::string table = slurp(tmp.path / "scan" / "scan_table.tsv");
  CHECK(table.find("0.4") != std::string::npos);
  CHECK(table.find("0.8") != std::string::npos);

  ExperimentConfig empty = cfg;
  empty.scan_betas.clear();
  CHECK_THROWS_AS(scan_experiment(empty), usage_error);
}

TEST_CASE("report: plot-ready files, idempotence, empty-directory guard") {
  TempDir tmp;
  ExperimentConfig cfg = tiny_config(tmp.path / "run");
  run_experiment(cfg);
  write_report(tmp.path / "run");
  CHECK(fs::exists(tmp.path / "run" / "loops.dat"));
  std::string first = slurp(tmp.path / "run" / "loops.dat");
  write_report(tmp.path / "run");
  CHECK(slurp(tmp.path / "run" / "loops.dat") == first);

  fs::create_directories(tmp.path / "empty");
  CHECK_THROWS_AS(write_report(tmp.path / "empty"), usage_error);
}

}  // TEST_SUITE
