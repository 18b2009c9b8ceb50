#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "gradest/core/error.hpp"
#include "gradest/core/rational.hpp"

namespace gradest {

/// q_end = N (gamma - (p-1)) / gamma.
inline Rational endpoint_exponent(int N, const Rational& p, const Rational& gamma) {
  if (N < 2) throw ParameterError("dimension must be at least 2");
  if (!(gamma > p - 1)) throw RegimeError("endpoint exponent requires gamma > p-1");
  return Rational(N) * (gamma - (p - 1)) / gamma;
}

struct Theorem1Exponents {
  Rational beta;
  Rational eta;    // (beta + p/2) N/(N-2)
  Rational alpha;  // N(2 beta + p) / (4 beta + 2(p-1)N - 2(p-2))
  Rational q_eta;  // 2 alpha
};

inline Theorem1Exponents theorem1_exponents(int N, const Rational& p, const Rational& beta) {
  if (N < 3) throw ParameterError("Sobolev bookkeeping needs N >= 3");
  const Rational denom = 4 * beta + 2 * (p - 1) * N - 2 * (p - 2);
  if (!(denom > 0)) throw ParameterError("beta too small: nonpositive denominator in alpha");
  Theorem1Exponents e;
  e.beta = beta;
  e.eta = (beta + p / 2) * Rational(N, N - 2);
  e.alpha = Rational(N) * (2 * beta + p) / denom;
  e.q_eta = 2 * e.alpha;
  return e;
}

struct Theorem2Exponents {
  Rational r;
  Rational beta;  // (r-2) gamma + p - 1
  Rational eta;   // 2 gamma - p + 1
};

/// The prescribed r does not exceed 2, so the lemma needing r > 2 cannot be invoked.
struct ProofGap {
  Rational r;
};

using Theorem2Result = std::variant<Theorem2Exponents, ProofGap>;

/// r = (2/N) q_end + ((N-2)/N) q,  beta = (r-2) gamma + p - 1,  eta = 2 gamma - p + 1.
inline Theorem2Result theorem2_exponents(int N, const Rational& p, const Rational& gamma, const Rational& q) {
  if (N < 3) throw RegimeError("maximal regularity bookkeeping needs N >= 3");
  if (!(gamma > p - 1)) throw RegimeError("requires gamma > p-1");
  if (p < 2) throw RegimeError("requires p >= 2");
  const Rational q_end = endpoint_exponent(N, p, gamma);
  if (q < q_end) throw RegimeError("requires q >= q_end = " + to_string(q_end));
  const Rational r = Rational(2, N) * q_end + Rational(N - 2, N) * q;
  if (r <= 2) return ProofGap{r};
  return Theorem2Exponents{r, (r - 2) * gamma + p - 1, 2 * gamma - p + 1};
}

enum class Regime { Thm1, Thm2Interior, Thm2Endpoint_i, Thm2Endpoint_ii, ProofGap, Inadmissible };

inline std::string to_string(Regime r) {
  switch (r) {
    case Regime::Thm1: return "Thm1";
    case Regime::Thm2Interior: return "Thm2Interior";
    case Regime::Thm2Endpoint_i: return "Thm2Endpoint_i";
    case Regime::Thm2Endpoint_ii: return "Thm2Endpoint_ii";
    case Regime::ProofGap: return "ProofGap";
    case Regime::Inadmissible: return "Inadmissible";
  }
  return "?";
}

/// All applicable regime tags, most specific first. ProofGap accompanies
/// Thm2Interior when the prescribed r is <= 2.
struct RegimeSet {
  std::vector<Regime> tags;

  bool has(Regime r) const {
    for (auto t : tags)
      if (t == r) return true;
    return false;
  }
  Regime primary() const { return tags.front(); }
  bool admissible() const { return !has(Regime::Inadmissible); }
};

inline RegimeSet classify_regime(int N, const Rational& p, const Rational& gamma, const Rational& q,
                                 const Rational& lambda) {
  RegimeSet out;
  if (!(p > 1) || !(gamma > p - 1) || lambda < 0 || N < 2) {
    out.tags.push_back(Regime::Inadmissible);
    return out;
  }
  if (N >= 3 && p >= 2) {
    const Rational q_end = endpoint_exponent(N, p, gamma);
    const Rational two = 2;
    if (q == q_end && gamma > Rational(N) * (p - 1) / (N - 2)) {
      out.tags.push_back(lambda == 0 ? Regime::Thm2Endpoint_i : Regime::Thm2Endpoint_ii);
    }
    if (q > q_end && q > two) {
      out.tags.push_back(Regime::Thm2Interior);
      if (std::holds_alternative<ProofGap>(theorem2_exponents(N, p, gamma, q))) out.tags.push_back(Regime::ProofGap);
    }
  }
  if (q >= N) out.tags.push_back(Regime::Thm1);
  if (out.tags.empty()) out.tags.push_back(Regime::Inadmissible);
  return out;
}

}  // namespace gradest

namespace gradest {

/// Every derived exponent for one (N, p, gamma, q, lambda) point.
struct ExponentTable {
  int N = 3;
  Rational p, gamma, q, lambda;
  std::optional<Rational> q_end;
  RegimeSet regime;
  std::optional<Theorem1Exponents> thm1;
  std::optional<Theorem2Result> thm2;
  // r gamma and q gamma, reported when thm2 yields exponents
  std::optional<Rational> r_gamma;
  std::optional<Rational> q_gamma;
};

inline ExponentTable exponent_table(int N, const Rational& p, const Rational& gamma, const Rational& q,
                                    const Rational& lambda, std::optional<Rational> thm1_beta = std::nullopt) {
  ExponentTable t;
  t.N = N;
  t.p = p;
  t.gamma = gamma;
  t.q = q;
  t.lambda = lambda;
  t.regime = classify_regime(N, p, gamma, q, lambda);
  if (gamma > p - 1 && N >= 2) t.q_end = endpoint_exponent(N, p, gamma);
  if (thm1_beta && N >= 3) t.thm1 = theorem1_exponents(N, p, *thm1_beta);
  if (N >= 3 && p >= 2 && t.q_end && q >= *t.q_end) {
    t.thm2 = theorem2_exponents(N, p, gamma, q);
    t.q_gamma = q * gamma;
    if (auto* e = std::get_if<Theorem2Exponents>(&*t.thm2)) t.r_gamma = e->r * gamma;
  }
  return t;
}

}  // namespace gradest
