// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 mcassm contributors
//
// Sparse multipath MIMO channel: ULA steering vectors, per-component rank-one
// channel terms and their sum, gain normalization, synthetic scenarios.
#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "mcassm/rng.hpp"
#include "mcassm/types.hpp"

namespace mcassm {

template <class Scalar>
struct ArrayConfig {
  Index n_tx = 16;
  Index n_rx = 16;
  Scalar d_tx = Scalar(0.5);  // element spacing in wavelengths
  Scalar d_rx = Scalar(0.5);

  void validate() const {
    if (n_tx < 1 || n_rx < 1) throw std::invalid_argument("ArrayConfig: antenna counts must be >= 1");
    if (!(d_tx > Scalar(0)) || !(d_rx > Scalar(0)))
      throw std::invalid_argument("ArrayConfig: element spacings must be > 0");
  }
};

template <class Scalar>
struct MultipathComponent {
  Complex<Scalar> gain{};  // beta; real-valued in the usual ingestion path
  Scalar aod{};            // radians
  Scalar aoa{};            // radians
};

// Components are kept sorted by |gain| descending. Gains printed with mixed
// signs still sort into the expected "strongest first" order this way.
template <class Scalar>
struct ChannelScenario {
  std::string link_id;
  std::vector<MultipathComponent<Scalar>> components;
  ArrayConfig<Scalar> array;

  Index n_paths() const { return static_cast<Index>(components.size()); }

  void validate() const {
    array.validate();
    if (components.empty()) throw std::invalid_argument("ChannelScenario: no multipath components");
    for (const auto& c : components) {
      if (!std::isfinite(c.aod) || !std::isfinite(c.aoa) || !std::isfinite(c.gain.real()) ||
          !std::isfinite(c.gain.imag()))
        throw std::invalid_argument("ChannelScenario: non-finite component parameter");
    }
  }
};

template <class Scalar>
void sort_components_by_gain(std::vector<MultipathComponent<Scalar>>& components) {
  std::stable_sort(components.begin(), components.end(),
                   [](const auto& a, const auto& b) { return std::abs(a.gain) > std::abs(b.gain); });
}

template <class Scalar>
ChannelScenario<Scalar> make_scenario(std::string link_id,
                                      std::vector<MultipathComponent<Scalar>> components,
                                      const ArrayConfig<Scalar>& array) {
  sort_components_by_gain(components);
  ChannelScenario<Scalar> s{std::move(link_id), std::move(components), array};
  s.validate();
  return s;
}

// ULA steering vector with centered element indexing: element k (1-based) is
// exp(j 2*pi*spacing*(k - (1+n)/2)*cos(angle)). All entries unit modulus.
template <class Scalar>
CVec<Scalar> steering_vector(Index n_elems, Scalar spacing_wl, Scalar angle) {
  if (n_elems < 1) throw std::invalid_argument("steering_vector: n_elems must be >= 1");
  CVec<Scalar> a(n_elems);
  const Scalar c = Scalar(2) * std::numbers::pi_v<Scalar> * spacing_wl * std::cos(angle);
  const Scalar mid = (Scalar(1) + Scalar(n_elems)) / Scalar(2);
  for (Index k = 0; k < n_elems; ++k) {
    const Scalar phase = c * (Scalar(k + 1) - mid);
    a(k) = Complex<Scalar>(std::cos(phase), std::sin(phase));
  }
  return a;
}

// H = sum_k beta_k a_r^H a_t over all components (N_r x N_t).
template <class Scalar>
CMat<Scalar> build_channel_matrix(const ChannelScenario<Scalar>& scenario) {
  scenario.validate();
  const auto& ar_cfg = scenario.array;
  CMat<Scalar> h = CMat<Scalar>::Zero(ar_cfg.n_rx, ar_cfg.n_tx);
  for (const auto& c : scenario.components) {
    const CVec<Scalar> at = steering_vector(ar_cfg.n_tx, ar_cfg.d_tx, c.aod);
    const CVec<Scalar> ar = steering_vector(ar_cfg.n_rx, ar_cfg.d_rx, c.aoa);
    h.noalias() += c.gain * (ar.conjugate() * at.transpose());
  }
  return h;
}

// Scales gains so that sum |beta|^2 = 1. Angles and ordering are untouched.
template <class Scalar>
std::vector<MultipathComponent<Scalar>> normalize_gains(
    std::vector<MultipathComponent<Scalar>> components) {
  Scalar ss = 0;
  for (const auto& c : components) ss += std::norm(c.gain);
  if (!(ss > Scalar(0)))
    throw std::invalid_argument("normalize_gains: all gains are zero (degenerate channel)");
  const Scalar inv = Scalar(1) / std::sqrt(ss);
  for (auto& c : components) c.gain *= inv;
  return components;
}

template <class Scalar>
struct SynthProfile {
  Scalar decay = Scalar(0.45);      // geometric gain decay per path
  Scalar jitter_lo = Scalar(0.75);  // uniform multiplicative jitter on each gain
  Scalar jitter_hi = Scalar(1.25);
  bool signed_gains = true;
};

// Deterministic synthetic link: geometric-decay gains with jitter and random
// signs, angles uniform on (0, pi), sorted by |gain| and normalized.
template <class Scalar>
ChannelScenario<Scalar> synth_scenario(Index n_paths, std::uint64_t seed,
                                       const SynthProfile<Scalar>& profile = {},
                                       const ArrayConfig<Scalar>& array = {}) {
  if (n_paths < 1) throw std::invalid_argument("synth_scenario: n_paths must be >= 1");
  SplitMix64 rng(stream_key(seed, 0x73796e74ull, 0));  // "synt"
  std::vector<MultipathComponent<Scalar>> comps;
  comps.reserve(static_cast<std::size_t>(n_paths));
  const Scalar pi = std::numbers::pi_v<Scalar>;
  Scalar mag = Scalar(1);
  for (Index k = 0; k < n_paths; ++k) {
    const Scalar jit = profile.jitter_lo +
                       (profile.jitter_hi - profile.jitter_lo) * static_cast<Scalar>(rng.uniform());
    const bool neg = profile.signed_gains && rng.uniform() < 0.5;
    const Scalar g = (neg ? -mag : mag) * jit;
    const Scalar aod = pi * static_cast<Scalar>(rng.uniform());
    const Scalar aoa = pi * static_cast<Scalar>(rng.uniform());
    comps.push_back({Complex<Scalar>(g, Scalar(0)), aod, aoa});
    mag *= profile.decay;
  }
  sort_components_by_gain(comps);
  comps = normalize_gains(std::move(comps));
  return ChannelScenario<Scalar>{"synth-" + std::to_string(seed), std::move(comps), array};
}

}  // namespace mcassm
