#pragma once

#include <cstdint>
#include <functional>
#include <string_view>
#include <vector>

#include "lgt/action.hpp"

namespace lgt {

enum class Algorithm : std::uint8_t { Metropolis = 0, Heatbath = 1, OverrelaxMix = 2 };

const char* algorithm_name(Algorithm a);
Algorithm algorithm_from_name(std::string_view name);

struct SamplerParams {
  double beta = 1.0;
  Algorithm algorithm = Algorithm::Heatbath;
  double proposal_spread = 0.5;  // Metropolis kernel width, in (0, 2]
  int or_ratio = 0;              // overrelaxation sweeps per heat-bath sweep
  std::uint64_t seed = 1;
  int workers = 1;
};

/// Flattened staple paths per link ordinal, precomputed once per lattice so
/// sweeps touch no heap. Entry k holds the three (ordinal, reversed) legs of
/// one head-to-tail path.
struct StapleTable {
  explicit StapleTable(const Lattice& lat);
  struct Entry {
    std::int32_t ord[3];
    bool rev[3];
  };
  std::vector<std::int32_t> offsets;  // n_links + 1
  std::vector<Entry> entries;

  Mat sum(const Configuration& cfg, std::int64_t link_ordinal) const;
};

/// Single-link conditional sample from density ~ exp(beta Re Tr(U K)) dHaar,
/// K the staple sum. U(1): von Mises; SU(2): Creutz a0-rejection plus a
/// uniform sphere direction; Z2: two-point Gibbs weights. SU(3) links are
/// updated through su3_subgroup_sweep instead.
Mat heatbath_link(const Mat& staple_sum, Group g, double beta, RandomStream& rng);

/// One Metropolis pass over all links in checkerboard-class order; proposal
/// U' = R U with R = random_near_identity. Returns the acceptance fraction.
double metropolis_sweep(Configuration& cfg, const SamplerParams& params,
                        std::uint64_t sweep_index,
                        const StapleTable* table = nullptr);

/// One heat-bath pass (Z2, U(1), SU(2)).
void heatbath_sweep(Configuration& cfg, const SamplerParams& params,
                    std::uint64_t sweep_index, const StapleTable* table = nullptr);

/// Cabibbo-Marinari pass for SU(3): per link, heat-bath updates of the three
/// embedded SU(2) subgroups acting on index pairs (0,1), (0,2), (1,2).
void su3_subgroup_sweep(Configuration& cfg, const SamplerParams& params,
                        std::uint64_t sweep_index,
                        const StapleTable* table = nullptr);

/// Microcanonical reflection U -> W U^{-1} W with W the group projection of
/// the staple sum; preserves the action exactly and is an involution.
/// Supported for U(1) and SU(2) only.
void overrelax_sweep(Configuration& cfg, std::uint64_t sweep_index,
                     int workers = 1, const StapleTable* table = nullptr);

using MeasureHook =
    std::function<void(const Configuration& cfg, std::uint64_t sweep)>;

struct ChainStats {
  std::uint64_t sweeps = 0;
  double mean_acceptance = 1.0;  // Metropolis only
};

/// Drive n_sweeps sweeps of the configured algorithm, invoking the hook
/// after every `cadence`-th sweep (cadence 0: never) and reunitarizing every
/// `reunit_interval` sweeps. Sweep indices are absolute (`first_sweep`
/// onward) and key all randomness, so runs are bit-reproducible and resume
/// at any sweep boundary.
ChainStats run_chain(Configuration& cfg, const SamplerParams& params,
                     std::int64_t n_sweeps, std::int64_t cadence,
                     const MeasureHook& hook, std::uint64_t first_sweep = 0,
                     int reunit_interval = 100);

}  // namespace lgt
