#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "clgl/graph.hpp"

namespace clgl::graphs {

// JSON-lines corpus, one graph per line. Floats carry 17 significant digits
// so load(save(x)) reproduces every value bit-exactly.
void save_corpus(const std::vector<GraphSample>& samples, const std::string& path);
std::vector<GraphSample> load_corpus(const std::string& path);

std::string graph_to_json_line(const GraphSample& g);
GraphSample graph_from_json_line(const std::string& line);

// FNV-1a over file bytes, hex-encoded; used as corpus content hash.
std::string file_content_hash(const std::string& path);

}  // namespace clgl::graphs
