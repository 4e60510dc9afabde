#include "clgl/theorems.hpp"

#include <algorithm>
#include <cmath>

namespace clgl::causal {

namespace {

bool has_var(const DiscreteSCM& scm, const std::string& name) {
  for (const ScmVariable& v : scm.vars)
    if (v.name == name) return true;
  return false;
}

bool parents_are(const DiscreteSCM& scm, const std::string& child, std::vector<std::string> expected) {
  const std::size_t c = scm.index_of(child);
  std::vector<std::string> actual;
  for (std::size_t p : scm.parents[c]) actual.push_back(scm.vars[p].name);
  std::sort(actual.begin(), actual.end());
  std::sort(expected.begin(), expected.end());
  return actual == expected;
}

bool deterministic_given_parents(const DiscreteSCM& scm, const std::string& name) {
  const std::size_t v = scm.index_of(name);
  const std::size_t card = scm.vars[v].cardinality;
  const std::size_t rows = scm.cpts[v].size() / card;
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t k = 0; k < card; ++k) {
      const double p = scm.cpts[v][r * card + k];
      if (p != 0.0 && p != 1.0) return false;
    }
  }
  return true;
}

}  // namespace

ConformanceResult check_figure3_structure(const DiscreteSCM& scm, bool require_deterministic_g) {
  for (const char* name : {"S~", "S*", "C", "X", "G", "R", "T~", "T"}) {
    if (!has_var(scm, name)) return {false, std::string("missing variable ") + name};
  }
  const bool latent = has_var(scm, "L");
  const std::vector<std::string> factor_parents = latent ? std::vector<std::string>{"L"} : std::vector<std::string>{};
  if (!parents_are(scm, "S~", factor_parents)) return {false, "S~ must be exogenous (or latent-driven)"};
  if (!parents_are(scm, "S*", factor_parents)) return {false, "S* must be exogenous (or latent-driven)"};
  if (!parents_are(scm, "C", {})) return {false, "C must be exogenous"};
  if (!parents_are(scm, "X", {"S~", "S*"})) return {false, "X must have parents {S~, S*}"};
  if (!parents_are(scm, "G", {"X", "C"})) return {false, "G must have parents {X, C}"};
  if (!parents_are(scm, "R", {"G"})) return {false, "R must have parent {G}"};
  if (!parents_are(scm, "T~", {"G"})) return {false, "T~ must have parent {G}"};
  if (!parents_are(scm, "T", {"R"})) return {false, "T must have parent {R}"};
  if (require_deterministic_g && !deterministic_given_parents(scm, "G"))
    return {false, "G must be a function of (X, C)"};
  return {true, ""};
}

Theorem1Result check_theorem1(const DiscreteSCM& scm) {
  Theorem1Result res;
  const ConformanceResult conf = check_figure3_structure(scm, /*require_deterministic_g=*/true);
  res.conforming = conf.conforming;
  res.reason = conf.reason;
  if (!res.conforming) return res;

  const JointTable joint = enumerate_joint(scm);
  res.h_g = entropy(joint, {"G"});
  res.i_rc = mutual_information(joint, {"R"}, {"C"});
  res.i_rs = mutual_information(joint, {"R"}, {"S~"});
  if (res.h_g == 0.0) {
    res.degenerate = true;
    res.pass = true;
    return res;
  }
  res.lhs = res.i_rc / res.h_g;
  res.rhs = 1.0 - res.i_rs / res.h_g;
  res.pass = res.lhs <= res.rhs + 1e-9;
  return res;
}

Theorem2Result check_theorem2(const DiscreteSCM& scm) {
  Theorem2Result res;
  const ConformanceResult conf = check_figure3_structure(scm, /*require_deterministic_g=*/false);
  res.conforming = conf.conforming;
  res.reason = conf.reason;
  if (!res.conforming) return res;

  const JointTable joint = enumerate_joint(scm);
  res.i_st = mutual_information(joint, {"S~"}, {"T"});
  res.i_stt = mutual_information(joint, {"S~"}, {"T~"});
  res.i_sr = mutual_information(joint, {"S~"}, {"R"});
  res.i_sg = mutual_information(joint, {"S~"}, {"G"});

  res.premise_ok = std::abs(res.i_stt - res.i_sg) <= 1e-9;

  // Head conditionals p(t|s~) and p(t~|s~) — matched when identical tables.
  const std::size_t nt = joint.vars[joint.index_of("T")].cardinality;
  const std::size_t ntt = joint.vars[joint.index_of("T~")].cardinality;
  res.matched = nt == ntt;
  if (res.matched) {
    const auto qt = conditional_table(joint, "T", "S~");
    const auto pt = conditional_table(joint, "T~", "S~");
    for (std::size_t s = 0; s < qt.size() && res.matched; ++s)
      for (std::size_t t = 0; t < nt; ++t)
        if (std::abs(qt[s][t] - pt[s][t]) > 1e-9) {
          res.matched = false;
          break;
        }
  }

  res.sandwich_ok = res.i_st <= res.i_sr + 1e-9 && res.i_sr <= res.i_stt + 1e-9;
  res.maximized = std::abs(res.i_st - res.i_stt) <= 1e-9;
  res.pass = res.premise_ok && res.sandwich_ok && (!res.matched || res.maximized);
  return res;
}

namespace {

double plugin_mi_4x4(const std::array<std::array<double, 4>, 4>& p) {
  std::array<double, 4> ps{0, 0, 0, 0}, pt{0, 0, 0, 0};
  for (std::size_t s = 0; s < 4; ++s)
    for (std::size_t t = 0; t < 4; ++t) {
      ps[s] += p[s][t];
      pt[t] += p[s][t];
    }
  double info = 0.0;
  for (std::size_t s = 0; s < 4; ++s)
    for (std::size_t t = 0; t < 4; ++t)
      if (p[s][t] > 0.0) info += p[s][t] * std::log(p[s][t] / (ps[s] * pt[t]));
  return info;
}

}  // namespace

Corollary1Report check_corollary1(const std::vector<CorollaryObservation>& obs, double lc_threshold,
                                  double gap_threshold) {
  Corollary1Report rep;
  if (obs.empty()) return rep;

  std::array<std::array<double, 4>, 4> joint_pred{}, joint_expert{};
  double kl_sum = 0.0;
  const double w = 1.0 / static_cast<double>(obs.size());
  for (const CorollaryObservation& o : obs) {
    rep.class_counts[static_cast<std::size_t>(o.s_class)] += 1;
    joint_pred[static_cast<std::size_t>(o.s_class)][static_cast<std::size_t>(o.t_pred)] += w;
    joint_expert[static_cast<std::size_t>(o.s_class)][static_cast<std::size_t>(o.t_expert)] += w;
    kl_sum += o.kl;
  }
  rep.coverage_ok = std::all_of(rep.class_counts.begin(), rep.class_counts.end(), [](std::size_t c) { return c > 0; });
  rep.mean_lc = kl_sum * w;
  rep.i_st = plugin_mi_4x4(joint_pred);
  rep.i_stt = plugin_mi_4x4(joint_expert);
  rep.gap = std::abs(rep.i_st - rep.i_stt);
  rep.premise_met = rep.mean_lc <= lc_threshold;
  rep.pass = rep.coverage_ok && (!rep.premise_met || rep.gap <= gap_threshold);
  return rep;
}

}  // namespace clgl::causal
