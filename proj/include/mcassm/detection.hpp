// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 mcassm contributors
//
// Bit mapping, transmit synthesis, whitened reception and ML detection.
#pragma once

#include <bit>
#include <cstdint>
#include <stdexcept>
#include <utility>

#include "mcassm/constellation.hpp"
#include "mcassm/effective.hpp"
#include "mcassm/mca.hpp"

namespace mcassm {

// Indices are 0-based throughout; a hypothesis is h = l * M + m.
struct BeamSymbol {
  Index l = 0;
  Index m = 0;
};

// First log2(L) bits select the beam (natural binary, MSB first); the rest
// select the symbol through the constellation's Gray label table.
template <class Scalar>
BeamSymbol map_bits(std::uint64_t bits, Index l_count, const Constellation<Scalar>& c) {
  const Index lb = ilog2(l_count);
  const Index mb = c.bits();
  if (bits >> (lb + mb)) throw std::invalid_argument("map_bits: bit string too long");
  BeamSymbol out;
  out.l = static_cast<Index>(bits >> mb);
  const auto label = static_cast<std::uint32_t>(bits & ((std::uint64_t(1) << mb) - 1));
  out.m = c.label_to_index[label];
  return out;
}

template <class Scalar>
std::uint64_t unmap_bits(BeamSymbol bs, Index l_count, const Constellation<Scalar>& c) {
  if (bs.l < 0 || bs.l >= l_count || bs.m < 0 || bs.m >= c.order)
    throw std::invalid_argument("unmap_bits: index out of range");
  return (static_cast<std::uint64_t>(bs.l) << c.bits()) |
         c.labels[static_cast<std::size_t>(bs.m)];
}

// Concatenated (beam bits, symbol label) word used for bit-error counting.
template <class Scalar>
std::uint32_t hypothesis_label(Index l, Index m, const Constellation<Scalar>& c) {
  return (static_cast<std::uint32_t>(l) << c.bits()) | c.labels[static_cast<std::size_t>(m)];
}

// Antenna-domain transmit vector x = [W(l,:) A_t(1:N_s,:)]^H s_m.
template <class Scalar>
CVec<Scalar> transmit(Index l, Index m, const MCADesign<Scalar>& design,
                      const ChannelScenario<Scalar>& scenario,
                      const Constellation<Scalar>& constellation) {
  if (l < 0 || l >= design.beam_count() || m < 0 || m >= constellation.order)
    throw std::invalid_argument("transmit: index out of range");
  ChannelScenario<Scalar> sc = scenario;
  sort_components_by_gain(sc.components);
  const auto [a_t, a_r] = steering_matrices(sc);
  const Index ns = design.w.cols();
  if (ns > a_t.rows()) throw std::invalid_argument("transmit: design needs more components");
  return (design.w.row(l) * a_t.topRows(ns)).adjoint() * constellation.symbols(m);
}

// z = sqrt(rho) G W^H(l,:) s_m + noise, in the whitened effective domain.
template <class Scalar>
CVec<Scalar> receive_whitened(Index l, Index m, Scalar snr_linear,
                              const MCADesign<Scalar>& design,
                              const EffectiveChannel<Scalar>& effective,
                              const Constellation<Scalar>& constellation,
                              const CVec<Scalar>& noise) {
  CVec<Scalar> z = std::sqrt(snr_linear) * (effective.g * design.w.row(l).adjoint()) *
                   constellation.symbols(m);
  return z + noise;
}

// Precomputed noiseless receive points, one column per hypothesis.
template <class Scalar>
struct HypothesisSet {
  CMat<Scalar> points;  // N_s x (L*M), column l*M + m = G W^H(l,:) s_m
  Index l_count = 0;
  Index m_count = 0;
};

template <class Scalar>
HypothesisSet<Scalar> make_hypotheses(const MCADesign<Scalar>& design,
                                      const EffectiveChannel<Scalar>& effective,
                                      const Constellation<Scalar>& constellation) {
  HypothesisSet<Scalar> h;
  h.l_count = design.beam_count();
  h.m_count = constellation.order;
  const CMat<Scalar> t = effective.g * design.w.adjoint();  // N_s x L
  h.points.resize(effective.n_s, h.l_count * h.m_count);
  for (Index l = 0; l < h.l_count; ++l)
    for (Index m = 0; m < h.m_count; ++m)
      h.points.col(l * h.m_count + m) = t.col(l) * constellation.symbols(m);
  return h;
}

// Exhaustive argmin over all L*M hypotheses; ties resolve to the lowest
// (l, m) index pair.
template <class Scalar>
BeamSymbol ml_detect(const CVec<Scalar>& z, const HypothesisSet<Scalar>& hyp, Scalar snr_linear) {
  const Scalar a = std::sqrt(snr_linear);
  Index best = 0;
  Scalar best_metric = std::numeric_limits<Scalar>::infinity();
  for (Index hcol = 0; hcol < hyp.points.cols(); ++hcol) {
    const Scalar metric = (z - a * hyp.points.col(hcol)).squaredNorm();
    if (metric < best_metric) {
      best_metric = metric;
      best = hcol;
    }
  }
  return {best / hyp.m_count, best % hyp.m_count};
}

// Reduced detector. Rotating the whitened receive vector into eigen
// coordinates (z_e = Lambda^{-1/2} (G U)^H z) turns every hypothesis into a
// diagonal template sqrt(rho lambda_k) v_l(k) s_m with v_l = U^H W(l,:)^H,
// so the metric needs only the n_active coordinates the design occupies.
// Decisions match ml_detect exactly.
template <class Scalar>
class ReducedDetector {
 public:
  ReducedDetector(const MCADesign<Scalar>& design, const EffectiveChannel<Scalar>& effective,
                  const Constellation<Scalar>& constellation)
      : m_count_(constellation.order), symbols_(constellation.symbols) {
    const Index ns = effective.n_s;
    Index limit = design.n_sa > 0 ? design.n_sa : ns;
    // zero eigenvalues carry no signal; drop them from the metric
    Index active = 0;
    while (active < limit && effective.eigvals(active) > Scalar(0)) ++active;
    if (active == 0) throw std::invalid_argument("ReducedDetector: no active subchannels");
    n_active_ = active;

    const CMat<Scalar> u_a = effective.eigvecs.leftCols(active);
    rotation_ = effective.eigvals.head(active).cwiseSqrt().cwiseInverse().asDiagonal() *
                (effective.g * u_a).adjoint();
    // per-beam amplitudes sqrt(lambda_k) v_l(k), v_l(k) = u_k^H W(l,:)^H
    amplitudes_ = (design.w * u_a).conjugate().transpose();  // active x L
    for (Index k = 0; k < active; ++k)
      amplitudes_.row(k) *= std::sqrt(effective.eigvals(k));
  }

  BeamSymbol detect(const CVec<Scalar>& z, Scalar snr_linear) const {
    const CVec<Scalar> ze = rotation_ * z;
    const Scalar a = std::sqrt(snr_linear);
    Index best_l = 0, best_m = 0;
    Scalar best_metric = std::numeric_limits<Scalar>::infinity();
    for (Index l = 0; l < amplitudes_.cols(); ++l) {
      for (Index m = 0; m < m_count_; ++m) {
        Scalar metric = 0;
        for (Index k = 0; k < n_active_; ++k)
          metric += std::norm(ze(k) - a * amplitudes_(k, l) * symbols_(m));
        if (metric < best_metric) {
          best_metric = metric;
          best_l = l;
          best_m = m;
        }
      }
    }
    return {best_l, best_m};
  }

  Index n_active() const { return n_active_; }

 private:
  Index m_count_;
  CVec<Scalar> symbols_;
  CMat<Scalar> rotation_;    // n_active x N_s
  CMat<Scalar> amplitudes_;  // n_active x L
  Index n_active_ = 0;
};

}  // namespace mcassm
