#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "clgl/scm.hpp"

namespace clgl::causal {

// Structural conformance to the Figure-3 parent sets. The optional latent L
// may sit behind S~ and S*.
struct ConformanceResult {
  bool conforming = true;
  std::string reason;
};

ConformanceResult check_figure3_structure(const DiscreteSCM& scm, bool require_deterministic_g);

// Upper-bound check: I(R;C)/H(G) <= 1 - I(R;S~)/H(G). Quantities are
// normalized by H(G), which makes I(X,C;G) = 1 exact for deterministic G.
struct Theorem1Result {
  bool conforming = false;
  std::string reason;
  bool degenerate = false;  // H(G) = 0; vacuous pass
  bool pass = false;
  double h_g = 0.0;
  double lhs = 0.0, rhs = 0.0;      // normalized
  double i_rc = 0.0, i_rs = 0.0;    // raw nats
};

Theorem1Result check_theorem1(const DiscreteSCM& scm);

// Information-maximization check: under the premise I(T~;S~) = I(G;S~), the
// sandwich I(S~;T) <= I(S~;R) <= I(S~;T~) holds, with equality of the outer
// terms exactly when the head conditionals match.
struct Theorem2Result {
  bool conforming = false;
  std::string reason;
  bool premise_ok = false;
  bool matched = false;      // p(t|s~) equals p(t~|s~) within 1e-9
  bool sandwich_ok = false;
  bool maximized = false;    // |I(S~;T) - I(S~;T~)| <= 1e-9
  bool pass = false;
  double i_st = 0.0, i_stt = 0.0, i_sr = 0.0, i_sg = 0.0;
};

Theorem2Result check_theorem2(const DiscreteSCM& scm);

// One corpus graph's contribution to the empirical factor-alignment check.
struct CorollaryObservation {
  int s_class = 0;   // ground-truth morphology class
  int t_pred = 0;    // argmax of f^P
  int t_expert = 0;  // argmax of r^P
  double kl = 0.0;   // KL(r^P || f^P)
};

struct Corollary1Report {
  bool coverage_ok = false;
  std::array<std::size_t, 4> class_counts{0, 0, 0, 0};
  double mean_lc = 0.0;
  double i_st = 0.0;   // plug-in I(S~; argmax f^P)
  double i_stt = 0.0;  // plug-in I(S~; argmax r^P)
  double gap = 0.0;
  bool premise_met = false;  // mean_lc <= lc_threshold
  bool pass = false;         // coverage and (premise -> gap small)
};

Corollary1Report check_corollary1(const std::vector<CorollaryObservation>& obs, double lc_threshold = 0.02,
                                  double gap_threshold = 0.05);

}  // namespace clgl::causal
