// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 mcassm contributors
//
// Test-only oracles, independent of the optimized implementation paths they
// check: exhaustive enumerations, numerical integration and the reference
// case-study channel.
#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "mcassm/analysis.hpp"
#include "mcassm/channel.hpp"
#include "mcassm/constellation.hpp"
#include "mcassm/mca.hpp"

namespace oracles {

using Scalar = double;
using mcassm::Index;

// Five-component reference link used throughout the case-study tests.
inline mcassm::ChannelScenario<Scalar> reference_scenario() {
  const double beta[5] = {0.9356, -0.2807, 0.1871, -0.0936, 0.0468};
  const double tht[5] = {2.0, 2.05, 1.2, 3.0, 0.4};
  const double thr[5] = {2.0, 1.6, 2.4, 2.45, 2.8};
  std::vector<mcassm::MultipathComponent<Scalar>> comps;
  for (int i = 0; i < 5; ++i) comps.push_back({{beta[i], 0.0}, tht[i], thr[i]});
  return mcassm::make_scenario<Scalar>("ref", comps, mcassm::ArrayConfig<Scalar>{});
}

// Faithful eigen-spectrum of the reference link (N_s = 4). The fourth value
// published alongside this case study (0.05) is inconsistent with the
// published eigenbasis; 0.362 is what the stated construction yields.
inline const double kReferenceLambda[4] = {410.08755, 9.8421505, 1.4062838, 0.36202487};

// Published |eigenbasis| for the reference link, columns in ascending
// eigenvalue order as printed.
inline const double kReferenceAbsU[4][4] = {
    {0.0697, 0.6370, 0.0568, 0.7656},
    {0.0275, 0.7688, 0.0187, 0.6386},
    {0.3857, 0.0558, 0.9192, 0.0569},
    {0.9196, 0.0019, 0.3892, 0.0533},
};

inline Scalar brute_min_distance(const mcassm::Constellation<Scalar>& c) {
  Scalar best = std::numeric_limits<Scalar>::infinity();
  for (Index i = 0; i < c.order; ++i)
    for (Index j = i + 1; j < c.order; ++j)
      best = std::min(best, std::abs(c.symbols(i) - c.symbols(j)));
  return best;
}

// Full cross-beam candidate enumeration over all M^2 ordered symbol pairs and
// both signs (the reduced-pair-set sufficiency oracle).
inline std::vector<mcassm::Vec<Scalar>> full_cross_candidates(
    const mcassm::BeamVectorBook<Scalar>& book, const mcassm::Vec<Scalar>& lam,
    const mcassm::Constellation<Scalar>& c) {
  const Index nsa = book.n_sa;
  std::vector<mcassm::Vec<Scalar>> out;
  for (Index a = 0; a < book.size(); ++a)
    for (Index b = a + 1; b < book.size(); ++b)
      for (Index m1 = 0; m1 < c.order; ++m1)
        for (Index m2 = 0; m2 < c.order; ++m2)
          for (int sign : {-1, +1}) {
            mcassm::Vec<Scalar> e(nsa);
            for (Index k = 0; k < nsa; ++k)
              e(k) = lam(k) * std::norm(book.vectors(a, k) * c.symbols(m1) +
                                        Scalar(sign) * book.vectors(b, k) * c.symbols(m2));
            out.push_back(std::move(e));
          }
  return out;
}

inline std::vector<mcassm::Vec<Scalar>> same_beam_candidates(
    const mcassm::BeamVectorBook<Scalar>& book, const mcassm::Vec<Scalar>& lam,
    const mcassm::Constellation<Scalar>& c) {
  const Scalar d = brute_min_distance(c);
  std::vector<mcassm::Vec<Scalar>> out;
  for (Index l = 0; l < book.size(); ++l) {
    mcassm::Vec<Scalar> e(book.n_sa);
    for (Index k = 0; k < book.n_sa; ++k)
      e(k) = d * d * lam(k) * book.vectors(l, k) * book.vectors(l, k);
    out.push_back(std::move(e));
  }
  return out;
}

// Non-dominated (elementwise-minimal) subset for two-coordinate candidate
// vectors, computed by the sorted-staircase construction.
inline std::vector<std::pair<Scalar, Scalar>> staircase2(
    const std::vector<mcassm::Vec<Scalar>>& vs, Scalar round_to = 1e-9) {
  std::vector<std::pair<Scalar, Scalar>> p;
  p.reserve(vs.size());
  const auto snap = [round_to](Scalar x) { return std::round(x / round_to) * round_to; };
  for (const auto& v : vs) p.emplace_back(snap(v(0)), snap(v(1)));
  std::sort(p.begin(), p.end());
  p.erase(std::unique(p.begin(), p.end()), p.end());
  std::vector<std::pair<Scalar, Scalar>> keep;
  Scalar best_y = std::numeric_limits<Scalar>::infinity();
  std::size_t i = 0;
  while (i < p.size()) {
    std::size_t j = i;
    while (j < p.size() && p[j].first == p[i].first) ++j;
    if (p[i].second < best_y) {
      keep.push_back(p[i]);
      best_y = p[i].second;
    }
    i = j;
  }
  return keep;
}

// Q(x) by numerical integration of the standard normal density on [x, 40].
inline Scalar q_by_integration(Scalar x) {
  const Scalar hi = 40;
  const int n = 400000;
  const Scalar h = (hi - x) / n;
  const auto phi = [](Scalar t) {
    return std::exp(-t * t / 2) / std::sqrt(2 * std::numbers::pi_v<Scalar>);
  };
  Scalar acc = (phi(x) + phi(hi)) / 2;
  for (int i = 1; i < n; ++i) acc += phi(x + i * h);
  return acc * h;
}

// Scalar effective channel (G = [1]) for degenerate textbook cases.
inline mcassm::EffectiveChannel<Scalar> scalar_channel() {
  mcassm::EffectiveChannel<Scalar> e;
  e.g = mcassm::CMat<Scalar>::Identity(1, 1);
  e.whitener_factor = mcassm::CMat<Scalar>::Identity(1, 1);
  e.eigvals = mcassm::Vec<Scalar>::Ones(1);
  e.eigvecs = mcassm::CMat<Scalar>::Identity(1, 1);
  e.n_s = 1;
  return e;
}

inline mcassm::MCADesign<Scalar> scalar_design() {
  mcassm::MCADesign<Scalar> d;
  d.w = mcassm::CMat<Scalar>::Identity(1, 1);
  d.v = mcassm::Mat<Scalar>::Identity(1, 1);
  d.xi = mcassm::Vec<Scalar>::Ones(1);
  d.iota = mcassm::Vec<Scalar>::Ones(1);
  d.n_sa = 1;
  d.mean_power_raw = 1;
  return d;
}

}  // namespace oracles
