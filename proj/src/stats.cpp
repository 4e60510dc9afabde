#include "clgl/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace clgl {

std::vector<double> floor_normalize(const std::vector<double>& q) {
  std::vector<double> out(q.size());
  double total = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    out[i] = std::max(q[i], kProbFloor);
    total += out[i];
  }
  for (double& v : out) v /= total;
  return out;
}

double kl_divergence(const std::vector<double>& p, const std::vector<double>& q) {
  if (p.size() != q.size()) throw std::invalid_argument("kl_divergence: length mismatch");
  if (p.empty()) throw std::invalid_argument("kl_divergence: empty input");
  double psum = 0.0;
  for (double v : p) {
    if (v < 0.0) throw std::invalid_argument("kl_divergence: negative probability in p");
    psum += v;
  }
  if (std::abs(psum - 1.0) > 1e-6) throw std::invalid_argument("kl_divergence: p does not sum to 1");
  const std::vector<double> qn = floor_normalize(q);
  double kl = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] > 0.0) kl += p[i] * std::log(p[i] / qn[i]);
  }
  return std::max(kl, 0.0);
}

double cross_entropy(const std::vector<double>& logits, std::size_t label) {
  if (label >= logits.size()) throw std::invalid_argument("cross_entropy: label out of range");
  const double mx = *std::max_element(logits.begin(), logits.end());
  double lse = 0.0;
  for (double z : logits) lse += std::exp(z - mx);
  return mx + std::log(lse) - logits[label];
}

std::vector<double> softmax_normalize(const std::vector<double>& v) {
  if (v.empty()) throw std::invalid_argument("softmax_normalize: empty input");
  const double mx = *std::max_element(v.begin(), v.end());
  std::vector<double> out(v.size());
  double total = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    out[i] = std::exp(v[i] - mx);
    total += out[i];
  }
  for (double& x : out) x /= total;
  return out;
}

double cosine_similarity(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) throw std::invalid_argument("cosine_similarity: length mismatch");
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) throw std::invalid_argument("cosine_similarity: zero vector");
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

double entropy_nats(const std::vector<double>& p) {
  double h = 0.0;
  for (double v : p) {
    if (v > 0.0) h -= v * std::log(v);
  }
  return h;
}

}  // namespace clgl
