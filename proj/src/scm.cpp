#include "clgl/scm.hpp"

#include <cmath>
#include <stdexcept>

#include "clgl/rng.hpp"

namespace clgl::causal {

std::size_t DiscreteSCM::index_of(const std::string& name) const {
  for (std::size_t i = 0; i < vars.size(); ++i)
    if (vars[i].name == name) return i;
  throw std::invalid_argument("scm: unknown variable " + name);
}

std::size_t DiscreteSCM::state_space_size() const {
  std::size_t n = 1;
  for (const ScmVariable& v : vars) {
    if (v.cardinality == 0) throw std::invalid_argument("scm: zero cardinality");
    n *= v.cardinality;
  }
  return n;
}

void DiscreteSCM::validate() const {
  if (vars.size() != parents.size() || vars.size() != cpts.size())
    throw std::invalid_argument("scm: inconsistent structure sizes");
  for (std::size_t v = 0; v < vars.size(); ++v) {
    std::size_t rows = 1;
    for (std::size_t p : parents[v]) {
      if (p >= v) throw std::invalid_argument("scm: parents must precede children (acyclic order)");
      rows *= vars[p].cardinality;
    }
    if (cpts[v].size() != rows * vars[v].cardinality)
      throw std::invalid_argument("scm: cpt size mismatch for " + vars[v].name);
    for (std::size_t r = 0; r < rows; ++r) {
      double s = 0.0;
      for (std::size_t k = 0; k < vars[v].cardinality; ++k) {
        const double p = cpts[v][r * vars[v].cardinality + k];
        if (p < 0.0) throw std::invalid_argument("scm: negative probability in " + vars[v].name);
        s += p;
      }
      if (std::abs(s - 1.0) > 1e-12)
        throw std::invalid_argument("scm: cpt row does not sum to 1 in " + vars[v].name);
    }
  }
}

std::size_t JointTable::index_of(const std::string& name) const {
  for (std::size_t i = 0; i < vars.size(); ++i)
    if (vars[i].name == name) return i;
  throw std::invalid_argument("joint: unknown variable " + name);
}

JointTable enumerate_joint(const DiscreteSCM& scm) {
  scm.validate();
  const std::size_t total = scm.state_space_size();
  if (total > kMaxJointStates)
    throw std::invalid_argument("enumerate_joint: state space too large (" + std::to_string(total) + " states)");

  JointTable joint;
  joint.vars = scm.vars;
  joint.probs.assign(total, 0.0);

  const std::size_t n = scm.vars.size();
  std::vector<std::size_t> assignment(n, 0);
  for (std::size_t cell = 0; cell < total; ++cell) {
    double p = 1.0;
    for (std::size_t v = 0; v < n && p > 0.0; ++v) {
      std::size_t row = 0;
      for (std::size_t par : scm.parents[v]) row = row * scm.vars[par].cardinality + assignment[par];
      p *= scm.cpts[v][row * scm.vars[v].cardinality + assignment[v]];
    }
    joint.probs[cell] = p;
    for (std::size_t v = n; v-- > 0;) {
      if (++assignment[v] < scm.vars[v].cardinality) break;
      assignment[v] = 0;
    }
  }
  return joint;
}

namespace {

// Stride of each variable in the dense joint layout.
std::vector<std::size_t> joint_strides(const JointTable& joint) {
  std::vector<std::size_t> stride(joint.vars.size(), 1);
  for (std::size_t v = joint.vars.size(); v-- > 1;)
    stride[v - 1] = stride[v] * joint.vars[v].cardinality;
  return stride;
}

std::vector<std::size_t> resolve(const JointTable& joint, const std::vector<std::string>& names) {
  std::vector<std::size_t> out;
  for (const std::string& n : names) out.push_back(joint.index_of(n));
  return out;
}

}  // namespace

std::vector<double> marginal(const JointTable& joint, const std::vector<std::size_t>& vars) {
  const auto stride = joint_strides(joint);
  std::size_t out_size = 1;
  for (std::size_t v : vars) out_size *= joint.vars[v].cardinality;
  std::vector<double> out(out_size, 0.0);
  for (std::size_t cell = 0; cell < joint.size(); ++cell) {
    const double p = joint.probs[cell];
    if (p == 0.0) continue;
    std::size_t idx = 0;
    for (std::size_t v : vars) idx = idx * joint.vars[v].cardinality + (cell / stride[v]) % joint.vars[v].cardinality;
    out[idx] += p;
  }
  return out;
}

double entropy(const JointTable& joint, const std::vector<std::string>& vars) {
  const auto m = marginal(joint, resolve(joint, vars));
  double h = 0.0;
  for (double p : m)
    if (p > 0.0) h -= p * std::log(p);
  return h;
}

double mutual_information(const JointTable& joint, const std::vector<std::string>& a,
                          const std::vector<std::string>& b, const std::vector<std::string>& given) {
  const auto va = resolve(joint, a);
  const auto vb = resolve(joint, b);
  const auto vc = resolve(joint, given);

  auto concat = [](std::vector<std::size_t> x, const std::vector<std::size_t>& y) {
    x.insert(x.end(), y.begin(), y.end());
    return x;
  };
  const auto vac = concat(va, vc);
  const auto vbc = concat(vb, vc);
  const auto vabc = concat(concat(va, vb), vc);

  const auto pac = marginal(joint, vac);
  const auto pbc = marginal(joint, vbc);
  const auto pabc = marginal(joint, vabc);
  const auto pc = vc.empty() ? std::vector<double>{1.0} : marginal(joint, vc);

  std::size_t na = 1, nb = 1, nc = 1;
  for (std::size_t v : va) na *= joint.vars[v].cardinality;
  for (std::size_t v : vb) nb *= joint.vars[v].cardinality;
  for (std::size_t v : vc) nc *= joint.vars[v].cardinality;

  // I(A;B|C) = sum p(a,b,c) ln( p(c) p(a,b,c) / (p(a,c) p(b,c)) )
  double info = 0.0;
  for (std::size_t ia = 0; ia < na; ++ia) {
    for (std::size_t ib = 0; ib < nb; ++ib) {
      for (std::size_t ic = 0; ic < nc; ++ic) {
        const double p = pabc[(ia * nb + ib) * nc + ic];
        if (p <= 0.0) continue;
        info += p * std::log(pc[ic] * p / (pac[ia * nc + ic] * pbc[ib * nc + ic]));
      }
    }
  }
  return info;
}

std::vector<std::vector<double>> conditional_table(const JointTable& joint, const std::string& target,
                                                   const std::string& given) {
  const std::size_t vt = joint.index_of(target);
  const std::size_t vg = joint.index_of(given);
  const auto pj = marginal(joint, {vg, vt});
  const auto pg = marginal(joint, {vg});
  const std::size_t nt = joint.vars[vt].cardinality, ng = joint.vars[vg].cardinality;
  std::vector<std::vector<double>> rows(ng, std::vector<double>(nt, 0.0));
  for (std::size_t g = 0; g < ng; ++g) {
    for (std::size_t t = 0; t < nt; ++t) rows[g][t] = pg[g] > 0.0 ? pj[g * nt + t] / pg[g] : 0.0;
  }
  return rows;
}

namespace {

std::vector<double> deterministic_cpt(std::size_t rows, std::size_t card, const std::vector<std::size_t>& target) {
  std::vector<double> cpt(rows * card, 0.0);
  for (std::size_t r = 0; r < rows; ++r) cpt[r * card + target[r]] = 1.0;
  return cpt;
}

std::vector<double> noisy_cpt(std::size_t rows, std::size_t card, const std::vector<std::size_t>& target, double flip) {
  std::vector<double> cpt(rows * card, 0.0);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t k = 0; k < card; ++k)
      cpt[r * card + k] = k == target[r] ? 1.0 - flip : flip / static_cast<double>(card - 1);
  }
  return cpt;
}

std::vector<double> random_dist(std::size_t card, Rng& rng) {
  std::vector<double> d(card);
  double total = 0.0;
  for (double& v : d) {
    v = rng.next_range(0.2, 1.0);
    total += v;
  }
  for (double& v : d) v /= total;
  return d;
}

}  // namespace

DiscreteSCM reference_scm() {
  DiscreteSCM scm;
  // Order: S~, S*, C, X, G, R, T~, T
  scm.vars = {{"S~", 2}, {"S*", 1}, {"C", 2}, {"X", 2}, {"G", 4}, {"R", 4}, {"T~", 4}, {"T", 4}};
  scm.parents = {{}, {}, {}, {0, 1}, {3, 2}, {4}, {4}, {5}};
  scm.cpts.resize(8);
  scm.cpts[0] = {0.5, 0.5};
  scm.cpts[1] = {1.0};
  scm.cpts[2] = {0.5, 0.5};
  scm.cpts[3] = deterministic_cpt(2, 2, {0, 1});                    // X = S~
  scm.cpts[4] = deterministic_cpt(4, 4, {0, 1, 2, 3});              // G = (X, C)
  scm.cpts[5] = deterministic_cpt(4, 4, {0, 1, 2, 3});              // R = G
  scm.cpts[6] = deterministic_cpt(4, 4, {0, 1, 2, 3});              // T~ = G
  scm.cpts[7] = deterministic_cpt(4, 4, {0, 1, 2, 3});              // T = R
  scm.validate();
  return scm;
}

DiscreteSCM sample_figure3_scm(std::uint64_t seed, const Figure3SamplerOptions& opt) {
  Rng rng = Rng::derive(seed, 0x73636d);
  auto flip = [&rng]() { return rng.next_range(0.05, 0.2); };

  const std::size_t ns = 2 + rng.next_below(2);   // |S~|
  const std::size_t nstar = 2 + rng.next_below(2);
  const std::size_t nc = 2 + rng.next_below(2);
  const std::size_t nx = 3;  // three values keep X sensitive to each factor
  const std::size_t ng = nx * nc;
  const std::size_t nr = opt.matched_heads ? ng : 2 + rng.next_below(2);
  const std::size_t nt = 2 + rng.next_below(2);

  DiscreteSCM scm;
  const bool latent = opt.with_latent;
  if (latent) scm.vars.push_back({"L", 2, true});
  const std::size_t base = latent ? 1 : 0;
  scm.vars.push_back({"S~", ns});
  scm.vars.push_back({"S*", nstar});
  scm.vars.push_back({"C", nc});
  scm.vars.push_back({"X", nx});
  scm.vars.push_back({"G", ng});
  scm.vars.push_back({"R", nr});
  // Matched heads need T~ to retain everything G carries about S~, so it
  // extracts the X component exactly; T then shares its table and value space.
  scm.vars.push_back({"T~", opt.matched_heads ? nx : nt});
  scm.vars.push_back({"T", opt.matched_heads ? nx : 2 + rng.next_below(2)});

  scm.parents.resize(scm.vars.size());
  scm.cpts.resize(scm.vars.size());
  const std::size_t iS = base, iStar = base + 1, iC = base + 2, iX = base + 3, iG = base + 4, iR = base + 5,
                    iTt = base + 6, iT = base + 7;

  if (latent) {
    scm.parents[0] = {};
    scm.cpts[0] = random_dist(2, rng);
    scm.parents[iS] = {0};
    std::vector<std::size_t> tgt_s(2);
    for (std::size_t l = 0; l < 2; ++l) tgt_s[l] = l % ns;
    scm.cpts[iS] = noisy_cpt(2, ns, tgt_s, flip());
    scm.parents[iStar] = {0};
    std::vector<std::size_t> tgt_star(2);
    for (std::size_t l = 0; l < 2; ++l) tgt_star[l] = l % nstar;
    scm.cpts[iStar] = noisy_cpt(2, nstar, tgt_star, flip());
  } else {
    scm.parents[iS] = {};
    scm.cpts[iS] = random_dist(ns, rng);
    scm.parents[iStar] = {};
    scm.cpts[iStar] = random_dist(nstar, rng);
  }
  scm.parents[iC] = {};
  scm.cpts[iC] = random_dist(nc, rng);

  // X | S~, S*
  scm.parents[iX] = {iS, iStar};
  {
    std::vector<std::size_t> tgt(ns * nstar);
    for (std::size_t s = 0; s < ns; ++s)
      for (std::size_t st = 0; st < nstar; ++st) tgt[s * nstar + st] = (s + st) % nx;
    scm.cpts[iX] = noisy_cpt(ns * nstar, nx, tgt, flip());
  }

  // G | X, C — pairing, deterministic or with relabeling noise
  scm.parents[iG] = {iX, iC};
  {
    std::vector<std::size_t> tgt(nx * nc);
    for (std::size_t x = 0; x < nx; ++x)
      for (std::size_t c = 0; c < nc; ++c) tgt[x * nc + c] = x * nc + c;
    scm.cpts[iG] = opt.noisy_g ? noisy_cpt(nx * nc, ng, tgt, flip()) : deterministic_cpt(nx * nc, ng, tgt);
  }

  // R | G. The base map must mix both components of G: a plain g mod |R|
  // collapses to the C component whenever |R| divides |C|, which would make R
  // exactly independent of X and poison discovery.
  scm.parents[iR] = {iG};
  {
    std::vector<std::size_t> tgt(ng);
    for (std::size_t g = 0; g < ng; ++g) tgt[g] = opt.matched_heads ? g : (g / nc + g % nc) % nr;
    scm.cpts[iR] = opt.matched_heads ? deterministic_cpt(ng, nr, tgt) : noisy_cpt(ng, nr, tgt, flip());
  }

  // T~ | G
  scm.parents[iTt] = {iG};
  const std::size_t ntt = scm.vars[iTt].cardinality;
  std::vector<std::size_t> head_tgt(ng);
  if (opt.matched_heads) {
    // T~ extracts the X component of G exactly, so I(T~;S~) = I(G;S~).
    for (std::size_t g = 0; g < ng; ++g) head_tgt[g] = (g / nc) % ntt;
    scm.cpts[iTt] = deterministic_cpt(ng, ntt, head_tgt);
  } else {
    for (std::size_t g = 0; g < ng; ++g) head_tgt[g] = (g / nc + 2 * (g % nc)) % ntt;
    scm.cpts[iTt] = noisy_cpt(ng, ntt, head_tgt, flip());
  }

  // T | R
  scm.parents[iT] = {iR};
  {
    const std::size_t ntv = scm.vars[iT].cardinality;
    if (opt.matched_heads) {
      // R = G, and T applies the same table as T~ | G.
      scm.cpts[iT] = scm.cpts[iTt];
    } else {
      std::vector<std::size_t> tgt(nr);
      for (std::size_t r = 0; r < nr; ++r) tgt[r] = r % ntv;
      scm.cpts[iT] = noisy_cpt(nr, ntv, tgt, flip());
    }
  }

  scm.validate();
  return scm;
}

}  // namespace clgl::causal
