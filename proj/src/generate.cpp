#include "clgl/generate.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "clgl/rng.hpp"

namespace clgl::graphs {

namespace {

using Edge = std::pair<std::uint32_t, std::uint32_t>;

Edge mk(std::uint32_t u, std::uint32_t v) { return u < v ? Edge{u, v} : Edge{v, u}; }

// Motif builders return edges over nodes [0, n).
struct Shape {
  std::uint32_t n = 0;
  std::vector<Edge> edges;
};

Shape build_house(bool variant, Rng& rng) {
  Shape s;
  s.n = 5;
  s.edges = {mk(0, 1), mk(1, 2), mk(2, 3), mk(3, 0), mk(0, 4), mk(1, 4)};
  if (variant && rng.next_bernoulli(0.5)) {
    s.edges.push_back(rng.next_bernoulli(0.5) ? mk(0, 2) : mk(1, 3));
  }
  return s;
}

Shape build_cycle(bool variant, Rng& rng) {
  const std::uint32_t len = variant ? static_cast<std::uint32_t>(rng.next_int(5, 7)) : 6;
  Shape s;
  s.n = len;
  for (std::uint32_t i = 0; i < len; ++i) s.edges.push_back(mk(i, (i + 1) % len));
  return s;
}

Shape build_crane(bool variant, Rng& rng) {
  const std::uint32_t l0 = variant ? static_cast<std::uint32_t>(rng.next_int(1, 3)) : 2;
  const std::uint32_t l1 = variant ? static_cast<std::uint32_t>(rng.next_int(1, 3)) : 2;
  Shape s;
  s.n = 3 + l0 + l1;
  s.edges = {mk(0, 1), mk(1, 2), mk(0, 2)};
  std::uint32_t next = 3;
  std::uint32_t prev = 0;
  for (std::uint32_t i = 0; i < l0; ++i) {
    s.edges.push_back(mk(prev, next));
    prev = next++;
  }
  prev = 1;
  for (std::uint32_t i = 0; i < l1; ++i) {
    s.edges.push_back(mk(prev, next));
    prev = next++;
  }
  return s;
}

Shape build_motif(int motif_class, Family family, Rng& rng) {
  const bool variant = family == Family::kMotifVariant;
  switch (motif_class) {
    case 0: return build_house(variant, rng);
    case 1: return build_cycle(variant, rng);
    case 2: return build_crane(variant, rng);
    default: throw std::invalid_argument("bad motif class");
  }
}

Shape build_tree(Rng& rng, bool large) {
  const std::uint32_t n = static_cast<std::uint32_t>(large ? rng.next_int(20, 40) : rng.next_int(10, 20));
  Shape s;
  s.n = n;
  for (std::uint32_t i = 1; i < n; ++i)
    s.edges.push_back(mk(i, static_cast<std::uint32_t>(rng.next_below(i))));
  return s;
}

Shape build_ladder(Rng& rng, bool large) {
  const std::uint32_t len = static_cast<std::uint32_t>(large ? rng.next_int(10, 20) : rng.next_int(5, 10));
  Shape s;
  s.n = 2 * len;
  for (std::uint32_t i = 0; i + 1 < len; ++i) {
    s.edges.push_back(mk(i, i + 1));              // top rail
    s.edges.push_back(mk(len + i, len + i + 1));  // bottom rail
  }
  for (std::uint32_t i = 0; i < len; ++i) s.edges.push_back(mk(i, len + i));  // rungs
  return s;
}

Shape build_wheel(Rng& rng, bool large) {
  const std::uint32_t ring = static_cast<std::uint32_t>(large ? rng.next_int(16, 24) : rng.next_int(8, 12));
  Shape s;
  s.n = ring + 1;
  for (std::uint32_t i = 1; i <= ring; ++i) {
    s.edges.push_back(mk(i, i % ring + 1));  // ring
    s.edges.push_back(mk(0, i));             // spokes
  }
  return s;
}

Shape build_confounder(int conf_class, Rng& rng, bool large) {
  switch (conf_class) {
    case 0: return build_tree(rng, large);
    case 1: return build_ladder(rng, large);
    case 2: return build_wheel(rng, large);
    default: throw std::invalid_argument("bad confounder class");
  }
}

GraphSample make_graph(std::int64_t id, const DatasetSpec& spec, Split split, Rng rng) {
  GraphSample g;
  g.id = id;
  g.split = split;
  g.motif_class = static_cast<int>(rng.next_below(3));
  g.label = g.motif_class;

  if (split == Split::kTest) {
    g.confounder_class = static_cast<int>(rng.next_below(3));
  } else if (rng.next_bernoulli(std::max(spec.bias, 1.0 / 3.0))) {
    g.confounder_class = g.motif_class;
  } else {
    const int off = static_cast<int>(rng.next_below(2));
    g.confounder_class = (g.motif_class + 1 + off) % 3;
  }

  const Shape motif = build_motif(g.motif_class, spec.family, rng);
  const bool large = spec.ood_test && split == Split::kTest;
  const Shape base = build_confounder(g.confounder_class, rng, large);

  g.num_nodes = motif.n + base.n;
  g.edges = motif.edges;
  for (const Edge& e : base.edges) g.edges.push_back(mk(motif.n + e.first, motif.n + e.second));

  g.connection_node = static_cast<std::uint32_t>(rng.next_below(motif.n));
  const std::uint32_t attach = motif.n + static_cast<std::uint32_t>(rng.next_below(base.n));
  g.edges.push_back(mk(g.connection_node, attach));
  std::sort(g.edges.begin(), g.edges.end());

  g.node_features.resize(g.num_nodes);
  for (std::uint32_t i = 0; i < g.num_nodes; ++i) {
    g.node_features[i][0] = 1.0;
    for (std::size_t k = 1; k < kFeatureWidth; ++k) g.node_features[i][k] = rng.next_unit();
  }

  g.embodiment_nodes = embodiment_of(g, 1);
  return g;
}

}  // namespace

std::string family_name(Family f) {
  return f == Family::kSpuriousMotif ? "spurious-motif" : "motif-variant";
}

Family family_from_name(const std::string& name) {
  if (name == "spurious-motif") return Family::kSpuriousMotif;
  if (name == "motif-variant") return Family::kMotifVariant;
  throw std::invalid_argument("unknown dataset family: " + name);
}

std::vector<GraphSample> generate_dataset(const DatasetSpec& spec) {
  if (spec.count == 0) throw std::invalid_argument("generate_dataset: count must be positive");
  if (spec.bias < 1.0 / 3.0 - 1e-6 || spec.bias > 1.0)
    throw std::invalid_argument("generate_dataset: bias must lie in [1/3, 1]");
  const double frac_sum = spec.frac_train + spec.frac_val + spec.frac_test;
  if (std::abs(frac_sum - 1.0) > 1e-9)
    throw std::invalid_argument("generate_dataset: split fractions must sum to 1");

  const std::size_t n_train = static_cast<std::size_t>(std::llround(spec.frac_train * static_cast<double>(spec.count)));
  const std::size_t n_val = static_cast<std::size_t>(std::llround(spec.frac_val * static_cast<double>(spec.count)));
  if (n_train + n_val > spec.count) throw std::invalid_argument("generate_dataset: split fractions overflow count");

  std::vector<GraphSample> out;
  out.reserve(spec.count);
  for (std::size_t i = 0; i < spec.count; ++i) {
    const Split split = i < n_train ? Split::kTrain : (i < n_train + n_val ? Split::kVal : Split::kTest);
    out.push_back(make_graph(static_cast<std::int64_t>(i), spec, split, Rng::derive(spec.seed, i)));
  }
  return out;
}

}  // namespace clgl::graphs
