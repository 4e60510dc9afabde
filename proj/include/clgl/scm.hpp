#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace clgl::causal {

struct ScmVariable {
  std::string name;
  std::size_t cardinality = 2;
  bool hidden = false;  // enumerated but excluded from discovery queries
};

// Finite structural causal model. Variables are stored in topological order
// (every parent index precedes its child), so enumeration is a single product
// sweep.
struct DiscreteSCM {
  std::vector<ScmVariable> vars;
  std::vector<std::vector<std::size_t>> parents;
  // cpt[v] is row-major over parent assignments; each row of length
  // vars[v].cardinality sums to 1.
  std::vector<std::vector<double>> cpts;

  std::size_t index_of(const std::string& name) const;
  std::size_t state_space_size() const;
  void validate() const;
};

struct JointTable {
  std::vector<ScmVariable> vars;
  std::vector<double> probs;  // dense, row-major in variable order

  std::size_t index_of(const std::string& name) const;
  std::size_t size() const { return probs.size(); }
};

inline constexpr std::size_t kMaxJointStates = 10'000'000;

JointTable enumerate_joint(const DiscreteSCM& scm);

// Dense marginal over the given variables (in the given order).
std::vector<double> marginal(const JointTable& joint, const std::vector<std::size_t>& vars);

double entropy(const JointTable& joint, const std::vector<std::string>& vars);

// I(A;B|C), exact plug-in sum over the joint. C may be empty.
double mutual_information(const JointTable& joint, const std::vector<std::string>& a,
                          const std::vector<std::string>& b, const std::vector<std::string>& given = {});

// Conditional table p(target | given) as rows indexed by `given` assignments.
std::vector<std::vector<double>> conditional_table(const JointTable& joint, const std::string& target,
                                                   const std::string& given);

// --- Figure-3 instances ---------------------------------------------------

// Exact reference: uniform binary accessible factor and confounder,
// X copies the factor, G pairs (X, C), R copies G, heads copy their inputs.
DiscreteSCM reference_scm();

struct Figure3SamplerOptions {
  bool deterministic_g = true;   // required by the upper-bound check
  bool noisy_g = false;          // relabeling noise on G (faithful discovery)
  bool with_latent = false;      // shared latent behind the two causal factors
  bool matched_heads = false;    // T's table given R equals T~'s given G, with R = G
};

// Random Figure-3-conforming SCM with relabeling noise on each structural
// equation (flip probability uniform in [0.05, 0.2]).
DiscreteSCM sample_figure3_scm(std::uint64_t seed, const Figure3SamplerOptions& opt);

}  // namespace clgl::causal
