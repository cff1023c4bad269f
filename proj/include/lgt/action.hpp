#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "lgt/group.hpp"
#include "lgt/lattice.hpp"

namespace lgt {

/// One group element per positively-oriented link, stored as a dense array
/// in link enumeration order. Reads of reversed links return the inverse,
/// so U(y,x) = U(x,y)^{-1} holds by construction.
class Configuration {
 public:
  Configuration(std::shared_ptr<const Lattice> lattice, Group group);

  const Lattice& lattice() const { return *lattice_; }
  std::shared_ptr<const Lattice> lattice_ptr() const { return lattice_; }
  Group group() const { return group_; }

  const Mat& link(std::int64_t ordinal) const { return links_[ordinal]; }
  const Mat& link(const LinkIndex& l) const;
  Mat directed(const DirectedLink& dl) const;

  void set_link(std::int64_t ordinal, const Mat& value) {
    links_[ordinal] = value;
  }
  void set_link(const LinkIndex& l, const Mat& value);

  std::vector<Mat>& raw_links() { return links_; }
  const std::vector<Mat>& raw_links() const { return links_; }

 private:
  std::shared_ptr<const Lattice> lattice_;
  Group group_;
  std::vector<Mat> links_;
};

/// All links identity; the action is exactly zero.
Configuration cold_start(std::shared_ptr<const Lattice> lattice, Group group);

/// Independent Haar links: the beta = 0 ensemble.
Configuration hot_start(std::shared_ptr<const Lattice> lattice, Group group,
                        std::uint64_t seed);

/// Ordered product around the plaquette cycle, inverses applied on links
/// traversed against storage orientation.
Mat plaquette_product(const Configuration& cfg, const PlaquetteIndex& p);

/// Wilson action S = sum_p Re Tr(I - U_p); always >= 0.
double wilson_action(const Configuration& cfg);

/// Sum over the staples of l of the ordered 3-link products, i.e. the K with
/// sum_{p containing l} Re Tr U_p = Re Tr(U_l K).
Mat staple_sum(const Configuration& cfg, const LinkIndex& l);

/// S(cfg with link l replaced) - S(cfg) from the staple decomposition;
/// touches only the plaquettes containing l.
double local_action_delta(const Configuration& cfg, const LinkIndex& l,
                          const Mat& new_value);

/// U(x,y) -> g(x) U(x,y) g(y)^{-1}; `site_g` indexed by site index.
void apply_gauge_transform(Configuration& cfg, const std::vector<Mat>& site_g);

/// Project every link back onto the group (floating-point drift control).
void reunitarize_all(Configuration& cfg);

}  // namespace lgt
