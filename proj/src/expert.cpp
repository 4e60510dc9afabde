#include "clgl/expert.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace clgl::expert {

MorphologyDescriptor expert_embed(const graphs::GraphSample& g) {
  if (g.connection_node >= g.num_nodes) throw std::invalid_argument("expert_embed: connection node not set");
  const auto adj = graphs::adjacency(g);
  const std::uint32_t c = g.connection_node;

  MorphologyDescriptor d;
  d.degree = graphs::connection_motif_degree(g);
  d.on_cycle = graphs::connection_on_cycle(g);

  // Neighbor degrees and clustering are local to the embodiment subgraph.
  const auto& nbrs = adj[c];
  std::size_t nbr_edges = 0;
  for (std::size_t i = 0; i < nbrs.size(); ++i) {
    std::size_t deg_in_emb = 1;  // the edge back to the connection node
    for (std::size_t j = 0; j < nbrs.size(); ++j) {
      if (i == j) continue;
      const auto& a = adj[nbrs[i]];
      if (std::find(a.begin(), a.end(), nbrs[j]) != a.end()) {
        ++deg_in_emb;
        if (j > i) ++nbr_edges;
      }
    }
    d.neighbor_degrees.push_back(static_cast<std::uint32_t>(deg_in_emb));
  }
  std::sort(d.neighbor_degrees.begin(), d.neighbor_degrees.end());
  const std::size_t deg = nbrs.size();
  d.clustering = deg >= 2 ? 2.0 * static_cast<double>(nbr_edges) / (static_cast<double>(deg) * static_cast<double>(deg - 1)) : 0.0;
  return d;
}

int descriptor_class(const MorphologyDescriptor& d) {
  return (d.on_cycle ? 2 : 0) + (d.degree >= 3 ? 1 : 0);
}

std::vector<double> expert_project(const MorphologyDescriptor& d, double eps) {
  std::vector<double> p(graphs::kNumMorphologyClasses, eps / graphs::kNumMorphologyClasses);
  p[static_cast<std::size_t>(descriptor_class(d))] += 1.0 - eps;
  return p;
}

std::vector<double> expert_intervened(const std::vector<double>& p, int type_index) {
  if (type_index < 1 || type_index > kNumInterventionTypes)
    throw std::invalid_argument("expert_intervened: type index out of range");
  const double gamma = kGammas[type_index - 1];
  std::vector<double> out(p.size());
  double total = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    out[i] = std::pow(p[i], gamma);
    total += out[i];
  }
  for (double& v : out) v /= total;
  return out;
}

ExpertTargets targets_for(const graphs::GraphSample& g, int k_types) {
  ExpertTargets t;
  t.graph_id = g.id;
  t.rp = expert_project(expert_embed(g));
  for (int j = 1; j <= k_types; ++j) {
    // Types beyond the tempering table reuse the flattest entry.
    const int idx = std::min(j, kNumInterventionTypes);
    t.ri.push_back(expert_intervened(t.rp, idx));
  }
  return t;
}

void save_targets(const std::vector<ExpertTargets>& targets, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("save_targets: cannot open " + path);
  char buf[40];
  for (const ExpertTargets& t : targets) {
    std::string s = "{\"id\":" + std::to_string(t.graph_id) + ",\"rp\":[";
    for (std::size_t i = 0; i < t.rp.size(); ++i) {
      if (i) s += ",";
      std::snprintf(buf, sizeof(buf), "%.17g", t.rp[i]);
      s += buf;
    }
    s += "],\"ri\":[";
    for (std::size_t j = 0; j < t.ri.size(); ++j) {
      if (j) s += ",";
      s += "[";
      for (std::size_t i = 0; i < t.ri[j].size(); ++i) {
        if (i) s += ",";
        std::snprintf(buf, sizeof(buf), "%.17g", t.ri[j][i]);
        s += buf;
      }
      s += "]";
    }
    s += "]}";
    out << s << '\n';
  }
}

std::vector<ExpertTargets> load_targets(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("load_targets: cannot open " + path);
  std::vector<ExpertTargets> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      const nlohmann::json j = nlohmann::json::parse(line);
      ExpertTargets t;
      t.graph_id = j.at("id").get<std::int64_t>();
      t.rp = j.at("rp").get<std::vector<double>>();
      for (const auto& row : j.at("ri")) t.ri.push_back(row.get<std::vector<double>>());
      out.push_back(std::move(t));
    } catch (const std::exception& e) {
      throw std::runtime_error("load_targets: " + path + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace clgl::expert
