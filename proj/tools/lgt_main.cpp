// Command-line front-end: run / scan / oracle / report.
//
// Exit codes: 0 success, 1 usage error, 2 numerical or validation failure.

#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "lgt/errors.hpp"
#include "lgt/experiment.hpp"
#include "lgt/observables.hpp"
#include "lgt/oracle.hpp"

using ordered_json = nlohmann::ordered_json;

namespace {

void print_record(const char* name, ordered_json params, ordered_json value) {
  ordered_json rec;
  rec["sweep"] = 0;
  rec["name"] = name;
  rec["params"] = std::move(params);
  rec["value"] = std::move(value);
  std::printf("%s\n", rec.dump().c_str());
}

int run_oracle(const std::string& group_id, double beta,
               const std::string& quantity, int R, int T, double epsilon,
               double box_len, double amp, const std::vector<int>& extents) {
  if (quantity == "w1") {
    lgt::Group g = lgt::group_from_name(group_id);
    print_record("w1", {{"group", group_id}, {"beta", beta}},
                 lgt::single_plaquette_expectation(g, beta));
    return 0;
  }
  if (quantity == "loop" || quantity == "strong_coupling") {
    lgt::Group g = lgt::group_from_name(group_id);
    double v = quantity == "loop" ? lgt::two_dim_exact_loop(g, beta, R, T)
                                  : lgt::strong_coupling_leading(g, beta, R, T);
    print_record(quantity.c_str(),
                 {{"group", group_id}, {"beta", beta}, {"R", R}, {"T", T}}, v);
    return 0;
  }
  if (quantity == "tiny") {
    if (lgt::group_from_name(group_id) != lgt::Group::Z2)
      throw lgt::usage_error("oracle: quantity 'tiny' supports --group z2 only");
    std::vector<int> shape = extents.empty() ? std::vector<int>{2, 2} : extents;
    lgt::Lattice lat(static_cast<int>(shape.size()), shape, lgt::Boundary::Open);
    double v = lgt::exact_tiny_lattice(lat, beta, [](const lgt::Configuration& c) {
      return lgt::plaquette_average(c);
    });
    print_record("tiny_plaquette",
                 {{"group", group_id}, {"beta", beta}, {"extents", shape}}, v);
    return 0;
  }
  if (quantity == "bch") {
    lgt::Group g = lgt::group_from_name(group_id);
    lgt::SmoothConnection conn;
    if (g == lgt::Group::U1)
      conn = lgt::abelian_trig_connection(2, amp);
    else if (g == lgt::Group::SU2)
      conn = lgt::su2_trig_connection(2, amp);
    else
      throw lgt::usage_error("oracle: quantity 'bch' supports u1 and su2 only");
    lgt::BchCheck c = lgt::bch_action_check(conn, epsilon, {box_len, box_len});
    print_record("bch",
                 {{"group", group_id},
                  {"epsilon", epsilon},
                  {"box", box_len},
                  {"amplitude", amp}},
                 {{"lattice_sum", c.lattice_sum},
                  {"continuum_integral", c.continuum_integral},
                  {"ratio", c.ratio}});
    return 0;
  }
  throw lgt::usage_error(
      "oracle: unsupported quantity '" + quantity +
      "'; supported: w1, loop, strong_coupling, tiny, bch");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Lattice gauge theory Monte Carlo engine for compact groups "
      "Z2, U(1), SU(2), SU(3).\n"
      "Convention: the coupling beta multiplies the plaquette action "
      "sum_p Re Tr(I - U_p) directly, with no 1/N factor; to match the "
      "common (beta/N) Re Tr normalization, divide this beta by N."};
  app.require_subcommand(1);

  std::string config_path, resume_path, dir_path;
  auto* run_cmd = app.add_subcommand("run", "Run one chain from a config file");
  run_cmd->add_option("--config", config_path, "experiment config file")->required();
  run_cmd->add_option("--resume", resume_path, "checkpoint to continue from");

  auto* scan_cmd = app.add_subcommand("scan", "Run every beta in the config's scan list");
  std::string scan_config;
  scan_cmd->add_option("--config", scan_config, "experiment config file")->required();

  auto* oracle_cmd = app.add_subcommand("oracle", "Print exact reference values");
  std::string group_id = "u1", quantity = "w1";
  double beta = 1.0, epsilon = 0.1, box_len = 1.0, amp = 1.0;
  int loop_r = 1, loop_t = 1;
  std::vector<int> extents;
  oracle_cmd->add_option("--group", group_id, "z2 | u1 | su2 | su3");
  oracle_cmd->add_option("--beta", beta, "coupling (see top-level help for the convention)");
  oracle_cmd->add_option("--quantity", quantity,
                         "w1 | loop | strong_coupling | tiny | bch")->required();
  oracle_cmd->add_option("--R", loop_r, "loop breadth (loop/strong_coupling)");
  oracle_cmd->add_option("--T", loop_t, "loop length (loop/strong_coupling)");
  oracle_cmd->add_option("--epsilon", epsilon, "grid spacing (bch)");
  oracle_cmd->add_option("--box", box_len, "box edge length (bch)");
  oracle_cmd->add_option("--amplitude", amp, "catalog connection amplitude (bch)");
  oracle_cmd->add_option("--extents", extents, "open lattice shape (tiny)");

  auto* report_cmd = app.add_subcommand("report", "Write plot-ready data files");
  report_cmd->add_option("--dir", dir_path, "run or scan output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*run_cmd) {
      lgt::ExperimentConfig config = lgt::ExperimentConfig::parse_file(config_path);
      lgt::RunOutcome out = lgt::run_experiment(config, resume_path);
      std::printf("run: %llu sweeps, output in %s\n",
                  static_cast<unsigned long long>(out.sweeps_done),
                  out.dir.string().c_str());
      return 0;
    }
    if (*scan_cmd) {
      lgt::ExperimentConfig config = lgt::ExperimentConfig::parse_file(scan_config);
      int failures = lgt::scan_experiment(config);
      std::printf("scan: %zu points, %d failed, table in %s\n",
                  config.scan_betas.size(), failures, config.output_dir.c_str());
      return failures == 0 ? 0 : 2;
    }
    if (*oracle_cmd)
      return run_oracle(group_id, beta, quantity, loop_r, loop_t, epsilon,
                        box_len, amp, extents);
    if (*report_cmd) {
      lgt::write_report(dir_path);
      std::printf("report: data files written in %s\n", dir_path.c_str());
      return 0;
    }
  } catch (const lgt::usage_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 1;
}
