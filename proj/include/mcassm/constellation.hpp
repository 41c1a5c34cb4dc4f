// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 mcassm contributors
//
// APM symbol sets with Gray bit labels, family minimum distances, and the
// reduced symbol-pair sets feeding the beam-pair candidate construction.
#pragma once

#include <cctype>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "mcassm/types.hpp"

namespace mcassm {

enum class ModFamily { Psk, SquareQam, RectQam };

inline std::uint32_t gray_code(std::uint32_t i) { return i ^ (i >> 1); }

inline bool is_power_of_two(Index m) { return m >= 1 && (m & (m - 1)) == 0; }

inline Index ilog2(Index m) {
  Index b = 0;
  while ((Index(1) << b) < m) ++b;
  return b;
}

template <class Scalar>
struct Constellation {
  ModFamily family = ModFamily::Psk;
  Index order = 2;                      // M
  CVec<Scalar> symbols;                 // unit average energy
  std::vector<std::uint32_t> labels;    // Gray label per symbol, log2(M) bits
  std::vector<Index> label_to_index;    // inverse of labels

  Index bits() const { return ilog2(order); }
};

// Integer grid levels {-(n-1), ..., -1, 1, ..., n-1} in steps of 2.
namespace detail {
inline std::vector<int> qam_levels(Index n) {
  std::vector<int> lv(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) lv[static_cast<std::size_t>(i)] = static_cast<int>(2 * i + 1 - n);
  return lv;
}
}  // namespace detail

// PSK: s_m = exp(j 2 pi (m-1)/M), circular Gray labels.
// Square QAM: sqrt(M) x sqrt(M) grid of odd levels scaled by sqrt(3/(2(M-1))).
// Rectangular QAM: sqrt(2M) in-phase x sqrt(M/2) quadrature levels scaled by
// sqrt(6/(5M-4)). QAM labels are per-axis Gray, in-phase bits first.
template <class Scalar>
Constellation<Scalar> gen_constellation(ModFamily family, Index order) {
  if (!is_power_of_two(order) || order < 2)
    throw std::invalid_argument("gen_constellation: order must be a power of two >= 2");
  const Index nbits = ilog2(order);
  Constellation<Scalar> c;
  c.family = family;
  c.order = order;
  c.symbols.resize(order);
  c.labels.resize(static_cast<std::size_t>(order));

  if (family == ModFamily::Psk) {
    for (Index m = 0; m < order; ++m) {
      const Scalar ph = Scalar(2) * std::numbers::pi_v<Scalar> * Scalar(m) / Scalar(order);
      c.symbols(m) = Complex<Scalar>(std::cos(ph), std::sin(ph));
      c.labels[static_cast<std::size_t>(m)] = gray_code(static_cast<std::uint32_t>(m));
    }
  } else {
    Index ni = 0, nq = 0;
    Scalar scale = 0;
    if (family == ModFamily::SquareQam) {
      if (nbits % 2 != 0)
        throw std::invalid_argument("gen_constellation: square QAM needs even log2(M)");
      ni = nq = Index(1) << (nbits / 2);
      scale = std::sqrt(Scalar(3) / (Scalar(2) * Scalar(order - 1)));
    } else {
      if (nbits % 2 == 0 || order < 8)
        throw std::invalid_argument("gen_constellation: rectangular QAM needs odd log2(M), M >= 8");
      ni = Index(1) << ((nbits + 1) / 2);
      nq = Index(1) << ((nbits - 1) / 2);
      scale = std::sqrt(Scalar(6) / (Scalar(5 * order - 4)));
    }
    const auto lvi = detail::qam_levels(ni);
    const auto lvq = detail::qam_levels(nq);
    const Index qbits = ilog2(nq);
    Index m = 0;
    for (Index r = 0; r < ni; ++r) {
      for (Index q = 0; q < nq; ++q, ++m) {
        c.symbols(m) = scale * Complex<Scalar>(Scalar(lvi[static_cast<std::size_t>(r)]),
                                               Scalar(lvq[static_cast<std::size_t>(q)]));
        c.labels[static_cast<std::size_t>(m)] =
            (gray_code(static_cast<std::uint32_t>(r)) << qbits) |
            gray_code(static_cast<std::uint32_t>(q));
      }
    }
  }

  c.label_to_index.assign(static_cast<std::size_t>(order), -1);
  for (Index m = 0; m < order; ++m) c.label_to_index[c.labels[static_cast<std::size_t>(m)]] = m;
  return c;
}

// Family closed form; equals the brute-force minimum pairwise distance.
template <class Scalar>
Scalar min_distance(const Constellation<Scalar>& c) {
  switch (c.family) {
    case ModFamily::Psk:
      return Scalar(2) * std::sin(std::numbers::pi_v<Scalar> / Scalar(c.order));
    case ModFamily::SquareQam:
      return std::sqrt(Scalar(6) / Scalar(c.order - 1));
    case ModFamily::RectQam:
      return std::sqrt(Scalar(24) / Scalar(5 * c.order - 4));
  }
  throw std::logic_error("min_distance: bad family");
}

template <class Scalar>
bool is_constant_modulus(const Constellation<Scalar>& c) {
  const Scalar a0 = std::abs(c.symbols(0));
  for (Index m = 1; m < c.order; ++m)
    if (std::abs(std::abs(c.symbols(m)) - a0) > Scalar(1e-12)) return false;
  return true;
}

template <class Scalar>
struct SymbolPairSet {
  std::vector<std::pair<Complex<Scalar>, Complex<Scalar>>> pairs;
};

namespace detail {

// Reduced first-octant grid points R + jI: R, I odd and in range, I <= R,
// and R does not divide I unless R = 1. These are exactly the amplitude/angle
// representatives that can realize a minimal cross-beam distance; scalar
// multiples of (1+j) and mirror images are excluded.
inline std::vector<std::pair<int, int>> sm_singles(Index rmax, Index imax) {
  std::vector<std::pair<int, int>> out;
  for (int r = 1; r <= rmax; r += 2)
    for (int i = 1; i <= std::min<Index>(r, imax); i += 2) {
      if (r != 1 && i % r == 0) continue;
      out.emplace_back(r, i);
    }
  return out;
}

}  // namespace detail

// All unordered pairs of the reduced first-octant points, plus the smallest
// same-symbol pair (1+j, 1+j), scaled to the constellation's grid scale.
// PSK has no reduced pair set: its cross-beam candidates come directly from
// the (upsilon_l1 +/- upsilon_l2) branch.
template <class Scalar>
SymbolPairSet<Scalar> build_sm(const Constellation<Scalar>& c) {
  if (c.family == ModFamily::Psk)
    throw std::invalid_argument("build_sm: not defined for PSK; use the +/- beam-sum branch");
  Index ni = 0, nq = 0;
  Scalar scale = 0;
  if (c.family == ModFamily::SquareQam) {
    ni = nq = Index(1) << (ilog2(c.order) / 2);
    scale = std::sqrt(Scalar(3) / (Scalar(2) * Scalar(c.order - 1)));
  } else {
    ni = Index(1) << ((ilog2(c.order) + 1) / 2);
    nq = Index(1) << ((ilog2(c.order) - 1) / 2);
    scale = std::sqrt(Scalar(6) / Scalar(5 * c.order - 4));
  }
  const auto singles = detail::sm_singles(ni - 1, nq - 1);
  SymbolPairSet<Scalar> sm;
  const auto mk = [scale](std::pair<int, int> p) {
    return scale * Complex<Scalar>(Scalar(p.first), Scalar(p.second));
  };
  sm.pairs.emplace_back(mk(singles.front()), mk(singles.front()));  // (1+j, 1+j)
  for (std::size_t a = 0; a < singles.size(); ++a)
    for (std::size_t b = a + 1; b < singles.size(); ++b)
      sm.pairs.emplace_back(mk(singles[a]), mk(singles[b]));
  return sm;
}

// CLI tags: psk<M>, qam<M> (square), qam<M>r (rectangular), e.g. qam8r.
template <class Scalar>
Constellation<Scalar> parse_constellation_tag(const std::string& tag) {
  std::string t = tag;
  for (auto& ch : t) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  ModFamily fam;
  std::string num;
  if (t.rfind("psk", 0) == 0) {
    fam = ModFamily::Psk;
    num = t.substr(3);
  } else if (t.rfind("qam", 0) == 0) {
    num = t.substr(3);
    if (!num.empty() && num.back() == 'r') {
      fam = ModFamily::RectQam;
      num.pop_back();
    } else {
      fam = ModFamily::SquareQam;
    }
  } else {
    throw std::invalid_argument("unknown constellation tag '" + tag + "' (psk<M>, qam<M>, qam<M>r)");
  }
  Index m = 0;
  try {
    m = static_cast<Index>(std::stoll(num));
  } catch (...) {
    throw std::invalid_argument("unknown constellation tag '" + tag + "'");
  }
  return gen_constellation<Scalar>(fam, m);
}

}  // namespace mcassm
