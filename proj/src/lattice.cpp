#include "lgt/lattice.hpp"

#include <cstdlib>

#include "lgt/errors.hpp"

namespace lgt {

Lattice::Lattice(int ndims, const std::vector<int>& extents, Boundary boundary)
    : ndims_(ndims), boundary_(boundary) {
  if (ndims < 2 || ndims > kMaxDims)
    throw usage_error("lattice: ndims must be 2, 3 or 4");
  if (static_cast<int>(extents.size()) != ndims)
    throw usage_error("lattice: need one extent per dimension");
  n_sites_ = 1;
  for (int mu = 0; mu < ndims; ++mu) {
    if (extents[mu] < 2) throw usage_error("lattice: extents must be >= 2");
    extents_[mu] = extents[mu];
    n_sites_ *= extents[mu];
    if (n_sites_ > (std::int64_t(1) << 40))
      throw usage_error("lattice: site count exceeds index range");
  }
  // Last axis fastest.
  strides_[ndims - 1] = 1;
  for (int mu = ndims - 2; mu >= 0; --mu)
    strides_[mu] = strides_[mu + 1] * extents_[mu + 1];

  link_ordinals_.assign(static_cast<std::size_t>(n_sites_) * ndims_, -1);
  for (std::int64_t si = 0; si < n_sites_; ++si) {
    Site s = site_at(si);
    for (int mu = 0; mu < ndims_; ++mu) {
      if (boundary_ == Boundary::Open && s.c[mu] + 1 >= extents_[mu]) continue;
      link_ordinals_[si * ndims_ + mu] =
          static_cast<std::int32_t>(links_.size());
      links_.push_back(LinkIndex{s, mu});
    }
  }
  plaq_ordinals_.assign(static_cast<std::size_t>(n_sites_) * n_planes(), -1);
  for (std::int64_t si = 0; si < n_sites_; ++si) {
    Site s = site_at(si);
    int plane = 0;
    for (int mu = 0; mu < ndims_; ++mu)
      for (int nu = mu + 1; nu < ndims_; ++nu, ++plane) {
        if (boundary_ == Boundary::Open &&
            (s.c[mu] + 1 >= extents_[mu] || s.c[nu] + 1 >= extents_[nu]))
          continue;
        plaq_ordinals_[si * n_planes() + plane] =
            static_cast<std::int32_t>(plaquettes_.size());
        plaquettes_.push_back(PlaquetteIndex{s, mu, nu});
      }
  }
  classes_.assign(static_cast<std::size_t>(2 * ndims_), {});
  for (std::size_t ord = 0; ord < links_.size(); ++ord) {
    const LinkIndex& l = links_[ord];
    int parity = 0;
    for (int mu = 0; mu < ndims_; ++mu) parity += l.site.c[mu];
    classes_[l.mu * 2 + (parity & 1)].push_back(static_cast<std::int64_t>(ord));
  }
}

std::int64_t Lattice::site_index(const Site& s) const {
  std::int64_t idx = 0;
  for (int mu = 0; mu < ndims_; ++mu) idx += strides_[mu] * s.c[mu];
  return idx;
}

Site Lattice::site_at(std::int64_t idx) const {
  Site s;
  for (int mu = 0; mu < ndims_; ++mu) {
    s.c[mu] = static_cast<int>(idx / strides_[mu]);
    idx -= s.c[mu] * strides_[mu];
  }
  return s;
}

bool Lattice::contains(const Site& s) const {
  for (int mu = 0; mu < ndims_; ++mu)
    if (s.c[mu] < 0 || s.c[mu] >= extents_[mu]) return false;
  return true;
}

bool Lattice::shift(Site& s, int mu, int dir) const {
  int v = s.c[mu] + dir;
  if (boundary_ == Boundary::Periodic) {
    if (v < 0) v += extents_[mu];
    if (v >= extents_[mu]) v -= extents_[mu];
  } else if (v < 0 || v >= extents_[mu]) {
    return false;
  }
  s.c[mu] = v;
  return true;
}

std::int64_t Lattice::link_ordinal(const LinkIndex& l) const {
  if (l.mu < 0 || l.mu >= ndims_ || !contains(l.site)) return -1;
  return link_ordinals_[site_index(l.site) * ndims_ + l.mu];
}

int Lattice::plane_index(int mu, int nu) const {
  if (mu < 0 || nu <= mu || nu >= ndims_)
    throw usage_error("plane_index: need 0 <= mu < nu < ndims");
  // Lexicographic rank of the pair (mu, nu).
  int idx = 0;
  for (int a = 0; a < mu; ++a) idx += ndims_ - 1 - a;
  return idx + (nu - mu - 1);
}

std::int64_t Lattice::plaquette_ordinal(const PlaquetteIndex& p) const {
  if (!contains(p.site)) return -1;
  return plaq_ordinals_[site_index(p.site) * n_planes() + plane_index(p.mu, p.nu)];
}

std::array<DirectedLink, 4> Lattice::plaquette_links(
    const PlaquetteIndex& p) const {
  Site x = p.site;
  Site xm = x;
  shift(xm, p.mu, +1);
  Site xn = x;
  shift(xn, p.nu, +1);
  return {DirectedLink{{x, p.mu}, false}, DirectedLink{{xm, p.nu}, false},
          DirectedLink{{xn, p.mu}, true}, DirectedLink{{x, p.nu}, true}};
}

std::vector<std::array<DirectedLink, 3>> Lattice::staples(
    const LinkIndex& l) const {
  std::vector<std::array<DirectedLink, 3>> out;
  out.reserve(2 * (ndims_ - 1));
  Site x = l.site;
  Site head = x;
  if (!shift(head, l.mu, +1)) throw usage_error("staples: invalid link");
  for (int nu = 0; nu < ndims_; ++nu) {
    if (nu == l.mu) continue;
    // Forward: plaquette (x; mu, nu) exists when head and x can step +nu.
    {
      Site xn = x;
      Site hn = head;
      if (shift(xn, nu, +1) && shift(hn, nu, +1)) {
        out.push_back({DirectedLink{{head, nu}, false},
                       DirectedLink{{xn, l.mu}, true},
                       DirectedLink{{x, nu}, true}});
      }
    }
    // Backward: plaquette based at x - e_nu.
    {
      Site y = x;
      Site hy = head;
      if (shift(y, nu, -1) && shift(hy, nu, -1)) {
        out.push_back({DirectedLink{{hy, nu}, true},
                       DirectedLink{{y, l.mu}, true},
                       DirectedLink{{y, nu}, false}});
      }
    }
  }
  return out;
}

LoopSpec Lattice::rectangular_loop(const Site& origin, int mu, int nu, int R,
                                   int T) const {
  if (R < 1 || T < 1) throw usage_error("rectangular_loop: R, T must be >= 1");
  if (mu == nu || mu < 0 || nu < 0 || mu >= ndims_ || nu >= ndims_)
    throw usage_error("rectangular_loop: bad plane");
  if (boundary_ == Boundary::Periodic) {
    if (R >= extents_[mu] || T >= extents_[nu])
      throw usage_error("rectangular_loop: winding loop (R or T >= extent)");
  } else {
    if (origin.c[mu] + R >= extents_[mu] || origin.c[nu] + T >= extents_[nu])
      throw usage_error("rectangular_loop: loop exceeds open-boundary extents");
  }
  LoopSpec spec;
  spec.start = origin;
  spec.steps.reserve(2 * (R + T));
  for (int i = 0; i < R; ++i) spec.steps.push_back(mu + 1);
  for (int i = 0; i < T; ++i) spec.steps.push_back(nu + 1);
  for (int i = 0; i < R; ++i) spec.steps.push_back(-(mu + 1));
  for (int i = 0; i < T; ++i) spec.steps.push_back(-(nu + 1));
  return spec;
}

bool Lattice::loop_is_closed(const LoopSpec& spec) const {
  if (spec.steps.empty()) return false;
  std::array<int, kMaxDims> net{{0, 0, 0, 0}};
  for (int st : spec.steps) {
    int mu = std::abs(st) - 1;
    if (mu < 0 || mu >= ndims_) return false;
    net[mu] += st > 0 ? 1 : -1;
  }
  for (int mu = 0; mu < ndims_; ++mu) {
    if (boundary_ == Boundary::Periodic) {
      if (net[mu] % extents_[mu] != 0) return false;
    } else if (net[mu] != 0) {
      return false;
    }
  }
  return true;
}

bool Lattice::even_extents() const {
  for (int mu = 0; mu < ndims_; ++mu)
    if (extents_[mu] % 2 != 0) return false;
  return true;
}

}  // namespace lgt
