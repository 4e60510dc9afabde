#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "clgl/graph.hpp"

namespace clgl::graphs {

enum class Family { kSpuriousMotif, kMotifVariant };

std::string family_name(Family f);
Family family_from_name(const std::string& name);

struct DatasetSpec {
  Family family = Family::kSpuriousMotif;
  std::size_t count = 0;
  double bias = 1.0 / 3.0;  // P(confounder class == motif class) on train/val
  bool ood_test = false;    // random pairing is always used on test; this enlarges test confounders
  std::uint64_t seed = 0;
  double frac_train = 0.6;
  double frac_val = 0.2;
  double frac_test = 0.2;
};

// Stitches one motif (house / cycle / crane) to one confounder base
// (random tree / ladder / wheel) with a single bridge edge. Deterministic
// given the spec; each graph draws from its own counter-derived stream.
std::vector<GraphSample> generate_dataset(const DatasetSpec& spec);

}  // namespace clgl::graphs
