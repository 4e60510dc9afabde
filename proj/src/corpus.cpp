#include "clgl/corpus.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace clgl::graphs {

namespace {

void append_double(std::string& out, double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  out += buf;
}

}  // namespace

std::string graph_to_json_line(const GraphSample& g) {
  std::string s;
  s.reserve(256 + g.num_nodes * 80);
  s += "{\"id\":" + std::to_string(g.id);
  s += ",\"num_nodes\":" + std::to_string(g.num_nodes);
  s += ",\"edges\":[";
  for (std::size_t i = 0; i < g.edges.size(); ++i) {
    if (i) s += ",";
    s += "[" + std::to_string(g.edges[i].first) + "," + std::to_string(g.edges[i].second) + "]";
  }
  s += "],\"node_features\":[";
  for (std::size_t i = 0; i < g.node_features.size(); ++i) {
    if (i) s += ",";
    s += "[";
    for (std::size_t k = 0; k < kFeatureWidth; ++k) {
      if (k) s += ",";
      append_double(s, g.node_features[i][k]);
    }
    s += "]";
  }
  s += "],\"label\":" + std::to_string(g.label);
  s += ",\"motif_class\":" + std::to_string(g.motif_class);
  s += ",\"confounder_class\":" + std::to_string(g.confounder_class);
  s += ",\"connection_node\":" + std::to_string(g.connection_node);
  s += ",\"embodiment_nodes\":[";
  for (std::size_t i = 0; i < g.embodiment_nodes.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(g.embodiment_nodes[i]);
  }
  s += "],\"split\":\"" + split_name(g.split) + "\"}";
  return s;
}

GraphSample graph_from_json_line(const std::string& line) {
  const nlohmann::json j = nlohmann::json::parse(line);
  GraphSample g;
  g.id = j.at("id").get<std::int64_t>();
  g.num_nodes = j.at("num_nodes").get<std::uint32_t>();
  for (const auto& e : j.at("edges")) {
    g.edges.emplace_back(e.at(0).get<std::uint32_t>(), e.at(1).get<std::uint32_t>());
  }
  for (const auto& row : j.at("node_features")) {
    if (row.size() != kFeatureWidth) throw std::invalid_argument("node feature width must be 4");
    std::array<double, kFeatureWidth> f{};
    for (std::size_t k = 0; k < kFeatureWidth; ++k) f[k] = row.at(k).get<double>();
    g.node_features.push_back(f);
  }
  g.label = j.at("label").get<int>();
  g.motif_class = j.at("motif_class").get<int>();
  g.confounder_class = j.at("confounder_class").get<int>();
  g.connection_node = j.at("connection_node").get<std::uint32_t>();
  for (const auto& n : j.at("embodiment_nodes")) g.embodiment_nodes.push_back(n.get<std::uint32_t>());
  g.split = split_from_name(j.at("split").get<std::string>());
  return g;
}

void save_corpus(const std::vector<GraphSample>& samples, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("save_corpus: cannot open " + path);
  for (const GraphSample& g : samples) {
    out << graph_to_json_line(g) << '\n';
  }
  if (!out) throw std::runtime_error("save_corpus: write failed for " + path);
}

std::vector<GraphSample> load_corpus(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("load_corpus: cannot open " + path);
  std::vector<GraphSample> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      out.push_back(graph_from_json_line(line));
    } catch (const std::exception& e) {
      throw std::runtime_error("load_corpus: " + path + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

std::string file_content_hash(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("file_content_hash: cannot open " + path);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  char buf[1 << 16];
  while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
    const std::streamsize n = in.gcount();
    for (std::streamsize i = 0; i < n; ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 0x100000001b3ULL;
    }
    if (!in) break;
  }
  char hex[17];
  std::snprintf(hex, sizeof(hex), "%016llx", static_cast<unsigned long long>(h));
  return std::string(hex);
}

}  // namespace clgl::graphs
