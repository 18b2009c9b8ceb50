#pragma once

#include <string>
#include <vector>

#include "gradest/core/error.hpp"
#include "gradest/model/coefficient.hpp"
#include "gradest/model/hamiltonian.hpp"
#include "gradest/model/source.hpp"

namespace gradest {

/// lambda u - div(a(|Du|^2 + eps) Du) + H(Du) = f in a box, du/dnu = 0 on its faces.
struct ProblemSpec {
  int N = 2;
  std::vector<double> extents{1.0, 1.0};
  double p = 2.0;
  double gamma = 2.0;
  double lambda = 1.0;
  double eps = 1e-2;
  CoefficientFamily coefficient = PowerDiffusion{2.0};
  SourceSpec source{CosineProduct{1.0, {1, 1}}};

  HamiltonianFamily hamiltonian() const { return PowerHamiltonian{gamma, eps}; }

  /// H(0) = eps^{gamma/2}.
  double hamiltonian_at_origin() const { return std::pow(eps, 0.5 * gamma); }

  double domain_volume() const {
    double v = 1.0;
    for (double l : extents) v *= l;
    return v;
  }
};

inline void validate(const ProblemSpec& pb) {
  if (pb.N != 2 && pb.N != 3) throw ParameterError("dimension must be 2 or 3");
  if (static_cast<int>(pb.extents.size()) != pb.N) throw ParameterError("box extents do not match the dimension");
  for (double l : pb.extents)
    if (!(l > 0.0)) throw ParameterError("box extents must be positive");
  if (!(pb.p > 1.0)) throw ParameterError("p must exceed 1");
  if (!(pb.gamma > pb.p - 1.0)) throw RegimeError("growth exponent must satisfy gamma > p-1");
  if (!(pb.lambda >= 0.0)) throw ParameterError("lambda must be non-negative");
  if (!(pb.eps > 0.0)) throw ParameterError("regularisation eps must be positive");
  validate(pb.coefficient);
  if (family_exponent(pb.coefficient) != pb.p) throw ParameterError("coefficient family exponent differs from p");
}

template <int Dim>
Box<Dim> problem_box(const ProblemSpec& pb) {
  if (pb.N != Dim) throw ContractError("problem dimension does not match the requested grid dimension");
  Box<Dim> b;
  for (int d = 0; d < Dim; ++d) b.extents[d] = pb.extents[static_cast<std::size_t>(d)];
  return b;
}

}  // namespace gradest
