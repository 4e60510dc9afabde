#pragma once

#include <cstddef>
#include <vector>

namespace clgl {

// All information quantities are in nats.

// Floor applied to the right-hand side of KL before renormalization, so
// deterministic targets never produce infinite divergences.
inline constexpr double kProbFloor = 1e-8;

// Clamp entries to >= kProbFloor and renormalize to sum 1.
std::vector<double> floor_normalize(const std::vector<double>& q);

// KL(p || q) with the 0*ln(0/q) = 0 convention. q is floor-clamped and
// renormalized first. p must be nonnegative and sum to 1 within 1e-6.
double kl_divergence(const std::vector<double>& p, const std::vector<double>& q);

// -ln softmax(logits)[label].
double cross_entropy(const std::vector<double>& logits, std::size_t label);

// Shift-invariant softmax; output sums to 1 within 1e-9.
std::vector<double> softmax_normalize(const std::vector<double>& v);

// a.b / (|a||b|); rejects zero vectors.
double cosine_similarity(const std::vector<double>& a, const std::vector<double>& b);

// -sum p ln p over nonzero entries.
double entropy_nats(const std::vector<double>& p);

}  // namespace clgl
