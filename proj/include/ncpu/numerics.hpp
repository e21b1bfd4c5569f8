#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace ncpu {

using Vec = std::vector<double>;

// Runtime numeric failure (non-finite values, degenerate inputs discovered
// mid-computation). The CLI maps this to exit code 2.
struct NumericError : std::runtime_error {
  explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

constexpr double kProbEps = 1e-12;   // probabilities clamped before any log
constexpr double kFdStep = 1e-6;     // central-difference default step

inline double clamp_prob(double p) {
  if (p < kProbEps) return kProbEps;
  if (p > 1.0 - kProbEps) return 1.0 - kProbEps;
  return p;
}

inline void check_finite(const Vec& v, const char* what) {
  for (double x : v) {
    if (!std::isfinite(x)) throw NumericError(std::string(what) + ": non-finite entry");
  }
}

inline double dot(const Vec& a, const Vec& b) {
  if (a.size() != b.size()) throw std::invalid_argument("dot: dimension mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm(const Vec& a) { return std::sqrt(dot(a, a)); }

// L2-normalized vector; constructed via l2_normalize so the unit-norm
// invariant holds by construction.
struct UnitVec {
  Vec v;
  double operator[](std::size_t i) const { return v[i]; }
  std::size_t size() const { return v.size(); }
};

inline UnitVec l2_normalize(const Vec& v) {
  if (v.empty()) throw std::invalid_argument("l2_normalize: empty vector");
  check_finite(v, "l2_normalize");
  double n = norm(v);
  if (n <= 0.0) throw NumericError("l2_normalize: zero vector (degenerate embedding)");
  Vec out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i] / n;
  return UnitVec{std::move(out)};
}

// Two-class probability vector: entries in [0,1], sum 1.
struct Prob2 {
  std::array<double, 2> p{0.5, 0.5};
  double operator[](int i) const { return p[static_cast<std::size_t>(i)]; }
  bool valid(double tol = 1e-9) const {
    return p[0] >= -tol && p[0] <= 1.0 + tol && p[1] >= -tol && p[1] <= 1.0 + tol &&
           std::abs(p[0] + p[1] - 1.0) <= tol;
  }
};

inline int argmax(const Prob2& f) { return f.p[0] >= f.p[1] ? 0 : 1; }

inline Prob2 softmax2(double z0, double z1) {
  if (!std::isfinite(z0) || !std::isfinite(z1))
    throw NumericError("softmax: non-finite logit");
  double m = z0 > z1 ? z0 : z1;
  double e0 = std::exp(z0 - m);
  double e1 = std::exp(z1 - m);
  double s = e0 + e1;
  return Prob2{{e0 / s, e1 / s}};
}

inline Prob2 softmax(const Vec& logits) {
  if (logits.size() != 2) throw std::invalid_argument("softmax: expected 2 logits");
  return softmax2(logits[0], logits[1]);
}

inline double cosine(const Vec& u, const Vec& v) {
  double nu = norm(u);
  double nv = norm(v);
  if (nu <= 0.0 || nv <= 0.0) throw NumericError("cosine: zero vector");
  double c = dot(u, v) / (nu * nv);
  if (c > 1.0) c = 1.0;
  if (c < -1.0) c = -1.0;
  return c;
}

// Central-difference gradient of a scalar field. Independent oracle for the
// closed-form gradients; must never share code with the analytic path.
template <typename Field>
Vec finite_diff_grad(Field&& field, const Vec& at, double step = kFdStep) {
  if (step <= 0.0) throw std::invalid_argument("finite_diff_grad: step must be > 0");
  Vec g(at.size());
  Vec point = at;
  for (std::size_t i = 0; i < at.size(); ++i) {
    double orig = point[i];
    point[i] = orig + step;
    double fp = field(point);
    point[i] = orig - step;
    double fm = field(point);
    point[i] = orig;
    if (!std::isfinite(fp) || !std::isfinite(fm))
      throw NumericError("finite_diff_grad: non-finite field value at coordinate " +
                         std::to_string(i));
    g[i] = (fp - fm) / (2.0 * step);
  }
  return g;
}

// ||a - b|| / max(||a||, ||b||); standard gradient-check metric.
inline double rel_error(const Vec& a, const Vec& b) {
  if (a.size() != b.size()) throw std::invalid_argument("rel_error: dimension mismatch");
  double d = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double t = a[i] - b[i];
    d += t * t;
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  double scale = std::sqrt(na > nb ? na : nb);
  if (scale < 1e-300) return std::sqrt(d);
  return std::sqrt(d) / scale;
}

}  // namespace ncpu
