#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "ncpu/numerics.hpp"

namespace ncpu {

struct LossWeights {
  double w_r = 50.0;   // representation-alignment weight
  double w_ent = 5.0;  // entropy-regularizer weight
};

struct LossBreakdown {
  double ldce_p = 0.0;
  double ldce_u = 0.0;
  double rep = 0.0;
  double ent = 0.0;
  double total = 0.0;
  bool degenerate_p = false;  // batch had no P samples; term reported as 0
  bool degenerate_u = false;
};

// Label-disambiguation cross-entropy: -s^T log f, with f clamped away from 0.
inline double ldce(const Prob2& f, const Prob2& s) {
  return -(s[0] * std::log(clamp_prob(f[0])) + s[1] * std::log(clamp_prob(f[1])));
}

// Self-supervised alignment of the two views of one sample: 2(1 - <q~,k~>).
inline double self_ncl(const Vec& q, const Vec& k) {
  return 2.0 * (1.0 - cosine(q, k));
}

// Supervised non-contrastive loss on a same-label pair; 0 otherwise.
inline double sup_ncl(const Vec& q, const Vec& k, bool same_label) {
  if (!same_label) return 0.0;
  return 2.0 * (1.0 - cosine(q, k));
}

// Noisy-pair robust variant: 2*sqrt(1 - <q~,k~>) on same-label pairs. The
// square root flattens the loss away from alignment, so gradient magnitude
// grows with alignment and clean pairs drive the optimization.
inline double noisncl(const Vec& q, const Vec& k, bool same_label) {
  if (!same_label) return 0.0;
  double r = 1.0 - cosine(q, k);
  if (r < 0.0) r = 0.0;
  return 2.0 * std::sqrt(r);
}

// d sup_ncl / d q = -(2/||q||) (I - q~ q~^T) k~   (same-label case)
inline Vec grad_sup_ncl(const Vec& q, const Vec& k) {
  double qn = norm(q);
  double kn = norm(k);
  if (qn <= 0.0 || kn <= 0.0) throw NumericError("grad_sup_ncl: zero vector");
  double c = dot(q, k) / (qn * kn);
  Vec g(q.size());
  for (std::size_t i = 0; i < q.size(); ++i) {
    double kt = k[i] / kn;
    double qt = q[i] / qn;
    g[i] = -(2.0 / qn) * (kt - c * qt);
  }
  return g;
}

// d noisncl / d q = -(I - q~ q~^T) k~ / (||q|| sqrt(1 - <q~,k~>))
inline Vec grad_noisncl(const Vec& q, const Vec& k) {
  double qn = norm(q);
  double kn = norm(k);
  if (qn <= 0.0 || kn <= 0.0) throw NumericError("grad_noisncl: zero vector");
  double c = dot(q, k) / (qn * kn);
  double rad = 1.0 - c;
  if (rad < kProbEps) rad = kProbEps;  // 0/0 at perfect alignment; keep stable
  double denom = qn * std::sqrt(rad);
  Vec g(q.size());
  for (std::size_t i = 0; i < q.size(); ++i) {
    double kt = k[i] / kn;
    double qt = q[i] / qn;
    g[i] = -(kt - c * qt) / denom;
  }
  return g;
}

// ||d sup_ncl / d q||^2 = (4/||q||^2)(1 - <q~,k~>^2)
inline double grad_mag_sq_sup(const Vec& q, const Vec& k) {
  double qn = norm(q);
  double kn = norm(k);
  if (qn <= 0.0 || kn <= 0.0) throw NumericError("grad_mag_sq_sup: zero vector");
  double c = dot(q, k) / (qn * kn);
  return 4.0 / (qn * qn) * (1.0 - c * c);
}

// ||d noisncl / d q||^2 = (1 + <q~,k~>)/||q||^2. The vector gradient is 0/0 at
// cos = 1; the scalar limit there is 2/||q||^2 but this refuses to evaluate.
inline double grad_mag_sq_noisncl(const Vec& q, const Vec& k) {
  double qn = norm(q);
  double kn = norm(k);
  if (qn <= 0.0 || kn <= 0.0) throw NumericError("grad_mag_sq_noisncl: zero vector");
  double c = dot(q, k) / (qn * kn);
  if (c >= 1.0) throw NumericError("grad_mag_sq_noisncl: cos = 1 (gradient undefined)");
  return (1.0 + c) / (qn * qn);
}

// Negated entropy of the batch-mean prediction. Minimizing it pushes the
// batch-average prediction toward uniform, countering all-one-class collapse.
inline double entropy_reg(const std::vector<Prob2>& batch_probs) {
  if (batch_probs.empty()) throw std::invalid_argument("entropy_reg: empty batch");
  double m0 = 0.0, m1 = 0.0;
  for (const Prob2& f : batch_probs) {
    m0 += f[0];
    m1 += f[1];
  }
  m0 /= static_cast<double>(batch_probs.size());
  m1 /= static_cast<double>(batch_probs.size());
  return m0 * std::log(clamp_prob(m0)) + m1 * std::log(clamp_prob(m1));
}

// One training batch, already pushed through the networks. pair_sets[i] holds
// batch indices of the same-label peer set Q(i); every entry is treated as a
// same-label pair (construction guarantees it).
struct CompositeBatch {
  std::vector<char> is_positive;
  std::vector<Prob2> probs;    // f(x_i)
  std::vector<Prob2> targets;  // pseudo targets s_i
  std::vector<Vec> q;          // online embeddings
  std::vector<Vec> k;          // target embeddings (constants: stop-gradient)
  std::vector<std::vector<int>> pair_sets;
};

// total = mean-over-P LDCE + mean-over-U LDCE + w_r * mean_i mean_{Q(i)} noisncl
//         + w_ent * entropy_reg. Deterministic left-to-right accumulation.
inline LossBreakdown composite_loss(const CompositeBatch& b, const LossWeights& w) {
  const std::size_t n = b.is_positive.size();
  if (n == 0) throw std::invalid_argument("composite_loss: empty batch");
  if (b.probs.size() != n || b.targets.size() != n || b.q.size() != n ||
      b.k.size() != n || b.pair_sets.size() != n)
    throw std::invalid_argument("composite_loss: inconsistent batch fields");

  LossBreakdown out;
  double sum_p = 0.0, sum_u = 0.0;
  std::size_t n_p = 0, n_u = 0;
  for (std::size_t i = 0; i < n; ++i) {
    double l = ldce(b.probs[i], b.targets[i]);
    if (b.is_positive[i]) {
      sum_p += l;
      ++n_p;
    } else {
      sum_u += l;
      ++n_u;
    }
  }
  out.degenerate_p = (n_p == 0);
  out.degenerate_u = (n_u == 0);
  out.ldce_p = out.degenerate_p ? 0.0 : sum_p / static_cast<double>(n_p);
  out.ldce_u = out.degenerate_u ? 0.0 : sum_u / static_cast<double>(n_u);

  double rep = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& qset = b.pair_sets[i];
    if (qset.empty()) throw std::invalid_argument("composite_loss: empty pair set");
    double s = 0.0;
    for (int j : qset) s += noisncl(b.q[i], b.k[static_cast<std::size_t>(j)], true);
    rep += s / static_cast<double>(qset.size());
  }
  out.rep = rep / static_cast<double>(n);
  out.ent = entropy_reg(b.probs);
  out.total = out.ldce_p + out.ldce_u + w.w_r * out.rep + w.w_ent * out.ent;
  return out;
}

}  // namespace ncpu
