// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 mcassm contributors
//
// Seeded Monte-Carlo bit-error simulation in the whitened effective domain.
// Every symbol's bits and noise come from a counter-based stream keyed by
// (seed, snr_index, symbol_index), so results are bit-identical for any
// worker count.
#pragma once

#include <bit>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "mcassm/detection.hpp"
#include "mcassm/rng.hpp"

namespace mcassm {

template <class Scalar>
struct SnrPoint {
  Scalar snr_db = 0;
  std::uint64_t bit_errors = 0;
  std::uint64_t bits_sent = 0;
  Scalar ber = 0;
};

template <class Scalar>
struct SimResult {
  std::vector<SnrPoint<Scalar>> points;
  std::uint64_t seed = 0;
};

template <class Scalar>
struct LinkConfig {
  MCADesign<Scalar> design;
  EffectiveChannel<Scalar> effective;
  Constellation<Scalar> constellation;
  Vec<Scalar> snr_db_list;
  Index n_symbols_per_point = 100000;
  std::uint64_t seed = 1;
  int workers = 1;

  void validate() const {
    const Index lm = design.beam_count() * constellation.order;
    if (!is_power_of_two(lm) || lm < 2)
      throw std::invalid_argument("LinkConfig: L*M must be a power of two >= 2");
    if (n_symbols_per_point < 1)
      throw std::invalid_argument("LinkConfig: need at least one symbol per point");
    if (workers < 1) throw std::invalid_argument("LinkConfig: workers must be >= 1");
  }
};

namespace detail {

template <class Scalar>
std::uint64_t simulate_range(const HypothesisSet<Scalar>& hyp,
                             const std::vector<std::uint32_t>& labels,
                             const std::vector<Index>& col_of_bits, Index bits_per_symbol,
                             Scalar snr_linear, std::uint64_t seed, std::uint64_t snr_index,
                             Index begin, Index end) {
  const Index ns = hyp.points.rows();
  const Scalar amp = std::sqrt(snr_linear);
  const std::uint64_t mask = (std::uint64_t(1) << bits_per_symbol) - 1;
  const Scalar inv_sqrt2 = Scalar(1) / std::sqrt(Scalar(2));
  CVec<Scalar> z(ns);
  std::uint64_t errors = 0;
  for (Index sym = begin; sym < end; ++sym) {
    SplitMix64 rng(stream_key(seed, snr_index, static_cast<std::uint64_t>(sym)));
    const std::uint64_t bits = rng.next() & mask;
    const Index tx_col = col_of_bits[static_cast<std::size_t>(bits)];
    for (Index k = 0; k < ns; ++k) {
      const auto [re, im] = rng.normal_pair();
      z(k) = amp * hyp.points(k, tx_col) +
             Complex<Scalar>(static_cast<Scalar>(re), static_cast<Scalar>(im)) * inv_sqrt2;
    }
    const BeamSymbol dec = ml_detect(z, hyp, snr_linear);
    const Index rx_col = dec.l * hyp.m_count + dec.m;
    errors += static_cast<std::uint64_t>(
        std::popcount(static_cast<std::uint64_t>(labels[static_cast<std::size_t>(tx_col)] ^
                                                 labels[static_cast<std::size_t>(rx_col)])));
  }
  return errors;
}

}  // namespace detail

template <class Scalar>
SimResult<Scalar> run_monte_carlo(const LinkConfig<Scalar>& config) {
  config.validate();
  const auto hyp = make_hypotheses(config.design, config.effective, config.constellation);
  const Index lm = hyp.l_count * hyp.m_count;
  const Index bits_per_symbol = ilog2(lm);

  // per-hypothesis concatenated bit labels, indexed by column l*M + m, plus
  // the inverse map from a drawn bit word to the transmitted column
  std::vector<std::uint32_t> labels(static_cast<std::size_t>(lm));
  std::vector<Index> col_of_bits(static_cast<std::size_t>(lm));
  for (Index l = 0; l < hyp.l_count; ++l)
    for (Index m = 0; m < hyp.m_count; ++m) {
      const Index col = l * hyp.m_count + m;
      const std::uint32_t word = hypothesis_label(l, m, config.constellation);
      labels[static_cast<std::size_t>(col)] = word;
      col_of_bits[static_cast<std::size_t>(word)] = col;
    }

  SimResult<Scalar> result;
  result.seed = config.seed;
  for (Index si = 0; si < config.snr_db_list.size(); ++si) {
    const Scalar rho = std::pow(Scalar(10), config.snr_db_list(si) / Scalar(10));
    const Index n = config.n_symbols_per_point;
    const int nw = static_cast<int>(std::min<Index>(config.workers, n));
    std::vector<std::uint64_t> partial(static_cast<std::size_t>(nw), 0);
    if (nw <= 1) {
      partial[0] = detail::simulate_range(hyp, labels, col_of_bits, bits_per_symbol, rho,
                                          config.seed, static_cast<std::uint64_t>(si), 0, n);
    } else {
      std::vector<std::thread> pool;
      const Index chunk = (n + nw - 1) / nw;
      for (int w = 0; w < nw; ++w) {
        const Index b = std::min<Index>(n, w * chunk);
        const Index e = std::min<Index>(n, b + chunk);
        pool.emplace_back([&, w, b, e] {
          partial[static_cast<std::size_t>(w)] =
              detail::simulate_range(hyp, labels, col_of_bits, bits_per_symbol, rho, config.seed,
                                     static_cast<std::uint64_t>(si), b, e);
        });
      }
      for (auto& t : pool) t.join();
    }
    std::uint64_t errors = 0;
    for (auto p : partial) errors += p;
    SnrPoint<Scalar> pt;
    pt.snr_db = config.snr_db_list(si);
    pt.bit_errors = errors;
    pt.bits_sent = static_cast<std::uint64_t>(n) * static_cast<std::uint64_t>(bits_per_symbol);
    pt.ber = static_cast<Scalar>(errors) / static_cast<Scalar>(pt.bits_sent);
    result.points.push_back(pt);
  }
  return result;
}

}  // namespace mcassm
