#include "lgt/action.hpp"

#include "lgt/errors.hpp"

namespace lgt {

Configuration::Configuration(std::shared_ptr<const Lattice> lattice, Group group)
    : lattice_(std::move(lattice)), group_(group) {
  links_.assign(static_cast<std::size_t>(lattice_->n_links()),
                group_identity(group_));
}

const Mat& Configuration::link(const LinkIndex& l) const {
  std::int64_t ord = lattice_->link_ordinal(l);
  if (ord < 0) throw usage_error("configuration: no such link");
  return links_[ord];
}

Mat Configuration::directed(const DirectedLink& dl) const {
  const Mat& u = link(dl.link);
  return dl.reversed ? Mat(u.adjoint()) : u;
}

void Configuration::set_link(const LinkIndex& l, const Mat& value) {
  std::int64_t ord = lattice_->link_ordinal(l);
  if (ord < 0) throw usage_error("configuration: no such link");
  links_[ord] = value;
}

Configuration cold_start(std::shared_ptr<const Lattice> lattice, Group group) {
  return Configuration(std::move(lattice), group);
}

Configuration hot_start(std::shared_ptr<const Lattice> lattice, Group group,
                        std::uint64_t seed) {
  Configuration cfg(std::move(lattice), group);
  for (std::int64_t ord = 0; ord < cfg.lattice().n_links(); ++ord) {
    RandomStream rng = RandomStream::keyed(seed, 0x4A57u, ord);
    cfg.set_link(ord, haar_sample(rng, group));
  }
  return cfg;
}

Mat plaquette_product(const Configuration& cfg, const PlaquetteIndex& p) {
  auto dls = cfg.lattice().plaquette_links(p);
  const Lattice& lat = cfg.lattice();
  auto fetch = [&](const DirectedLink& dl) -> Mat {
    std::int64_t ord = lat.link_ordinal(dl.link);
    if (ord < 0) throw usage_error("plaquette_product: plaquette not in lattice");
    return dl.reversed ? Mat(cfg.link(ord).adjoint()) : cfg.link(ord);
  };
  Mat u = fetch(dls[0]);
  for (int i = 1; i < 4; ++i) u = mat_mul(u, fetch(dls[i]));
  return u;
}

double wilson_action(const Configuration& cfg) {
  const int n = matrix_order(cfg.group());
  double s = 0.0;
  for (const PlaquetteIndex& p : cfg.lattice().plaquettes())
    s += n - re_trace(plaquette_product(cfg, p));
  return s;
}

Mat staple_sum(const Configuration& cfg, const LinkIndex& l) {
  const Lattice& lat = cfg.lattice();
  const int n = matrix_order(cfg.group());
  Mat sum = Mat::Zero(n, n);
  for (const auto& path : lat.staples(l)) {
    Mat v = cfg.directed(path[0]);
    v = mat_mul(v, cfg.directed(path[1]));
    v = mat_mul(v, cfg.directed(path[2]));
    sum += v;
  }
  return sum;
}

double local_action_delta(const Configuration& cfg, const LinkIndex& l,
                          const Mat& new_value) {
  const int n = matrix_order(cfg.group());
  if (new_value.rows() != n || new_value.cols() != n)
    throw usage_error("local_action_delta: replacement size mismatch");
  Mat k = staple_sum(cfg, l);
  const Mat& old_value = cfg.link(l);
  return -re_trace(mat_mul(Mat(new_value - old_value), k));
}

void apply_gauge_transform(Configuration& cfg, const std::vector<Mat>& site_g) {
  const Lattice& lat = cfg.lattice();
  if (static_cast<std::int64_t>(site_g.size()) != lat.n_sites())
    throw usage_error("gauge_transform: need one element per site");
  for (std::int64_t ord = 0; ord < lat.n_links(); ++ord) {
    const LinkIndex& l = lat.links()[ord];
    Site head = l.site;
    lat.shift(head, l.mu, +1);
    const Mat& gx = site_g[lat.site_index(l.site)];
    const Mat& gy = site_g[lat.site_index(head)];
    cfg.set_link(ord, mat_mul_adj(mat_mul(gx, cfg.link(ord)), gy));
  }
}

void reunitarize_all(Configuration& cfg) {
  for (std::int64_t ord = 0; ord < cfg.lattice().n_links(); ++ord)
    cfg.set_link(ord, reunitarize(cfg.group(), cfg.link(ord)));
}

}  // namespace lgt
