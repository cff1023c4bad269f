#pragma once

#include <array>
#include <cstdint>
#include <vector>

namespace lgt {

enum class Boundary : std::uint8_t { Periodic = 0, Open = 1 };

constexpr int kMaxDims = 4;

struct Site {
  std::array<int, kMaxDims> c{{0, 0, 0, 0}};
  friend bool operator==(const Site& a, const Site& b) { return a.c == b.c; }
};

/// Positively-oriented link from `site` to `site + e_mu`. Only these are
/// stored; the reverse orientation is realized by inverting at read time.
struct LinkIndex {
  Site site;
  int mu = 0;
};

/// Plaquette in the (mu, nu) plane, mu < nu, based at `site`.
struct PlaquetteIndex {
  Site site;
  int mu = 0;
  int nu = 1;
};

struct DirectedLink {
  LinkIndex link;
  bool reversed = false;
};

/// Closed directed lattice path: start site plus signed axis steps,
/// step = +(mu+1) for +e_mu, -(mu+1) for -e_mu.
struct LoopSpec {
  Site start;
  std::vector<int> steps;
};

/// Finite hypercubic lattice (2 <= ndims <= 4) with periodic or open
/// boundary. Owns the canonical enumerations of sites, links and
/// plaquettes; all orderings are lexicographic with the last axis fastest,
/// fixed so that checkpoints are bit-exact across platforms.
class Lattice {
 public:
  Lattice(int ndims, const std::vector<int>& extents, Boundary boundary);

  int ndims() const { return ndims_; }
  Boundary boundary() const { return boundary_; }
  int extent(int mu) const { return extents_[mu]; }
  std::int64_t n_sites() const { return n_sites_; }
  std::int64_t n_links() const { return static_cast<std::int64_t>(links_.size()); }
  std::int64_t n_plaquettes() const {
    return static_cast<std::int64_t>(plaquettes_.size());
  }

  const std::vector<LinkIndex>& links() const { return links_; }
  const std::vector<PlaquetteIndex>& plaquettes() const { return plaquettes_; }

  std::int64_t site_index(const Site& s) const;
  Site site_at(std::int64_t idx) const;

  /// Move `s` one step along +-e_mu. Returns false when the step leaves an
  /// open lattice (s is untouched in that case); periodic always succeeds.
  bool shift(Site& s, int mu, int dir) const;

  /// Ordinal of a stored link in enumeration order, -1 if absent (open
  /// boundary edge).
  std::int64_t link_ordinal(const LinkIndex& l) const;

  int n_planes() const { return ndims_ * (ndims_ - 1) / 2; }
  int plane_index(int mu, int nu) const;  // lexicographic over mu < nu
  std::int64_t plaquette_ordinal(const PlaquetteIndex& p) const;  // -1 if absent

  /// The four directed links of the cycle
  /// x -> x+e_mu -> x+e_mu+e_nu -> x+e_nu -> x.
  std::array<DirectedLink, 4> plaquette_links(const PlaquetteIndex& p) const;

  /// Three-link paths from head(l) to tail(l), one per plaquette containing
  /// l: completing any of them with U_l closes that plaquette. 2(ndims-1)
  /// paths in the periodic case, fewer near an open boundary.
  std::vector<std::array<DirectedLink, 3>> staples(const LinkIndex& l) const;

  /// R x T rectangle in the (mu, nu) plane: R steps +mu, T steps +nu,
  /// R steps -mu, T steps -nu. Winding loops are rejected.
  LoopSpec rectangular_loop(const Site& origin, int mu, int nu, int R, int T) const;

  bool contains(const Site& s) const;
  bool loop_is_closed(const LoopSpec& spec) const;

  /// Checkerboard partition: class (mu, parity of sum of coords), 2*ndims
  /// classes of link ordinals in enumeration order. For even extents no two
  /// links of one class share a plaquette.
  const std::vector<std::vector<std::int64_t>>& checkerboard_classes() const {
    return classes_;
  }

  /// True when every extent is even (parallel class updates are safe).
  bool even_extents() const;

 private:
  int ndims_;
  std::array<int, kMaxDims> extents_{{1, 1, 1, 1}};
  Boundary boundary_;
  std::int64_t n_sites_ = 0;
  std::array<std::int64_t, kMaxDims> strides_{{0, 0, 0, 0}};
  std::vector<LinkIndex> links_;
  std::vector<PlaquetteIndex> plaquettes_;
  std::vector<std::int32_t> link_ordinals_;  // site*ndims + mu -> ordinal
  std::vector<std::int32_t> plaq_ordinals_;  // site*n_planes + plane -> ordinal
  std::vector<std::vector<std::int64_t>> classes_;
};

}  // namespace lgt
