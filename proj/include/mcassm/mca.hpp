// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 mcassm contributors
//
// Analytic max-min-distance design of the multipath-component-aggregation
// matrix. The squared distance between two received hypotheses decomposes
// over eigen-subchannels as
//   J = sum_k lambda_k xi^2(k) |u_{l1}(k) s_{m1} - u_{l2}(k) s_{m2}|^2,
// an affine function of the power ratios iota_k = xi^2(k)/xi^2(1). The
// optimizer enumerates the candidate coefficient vectors that can attain the
// minimum, prunes dominated ones, intersects the surviving hyperplanes, and
// certifies the best intersection against the full candidate set.
#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <vector>

#include <Eigen/LU>

#include "mcassm/constellation.hpp"
#include "mcassm/effective.hpp"
#include "mcassm/types.hpp"

namespace mcassm {

struct DegenerateSpectrumError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

template <class Scalar>
struct BeamVectorBook {
  Mat<Scalar> vectors;  // L x N_s real unit rows, zero beyond column n_sa
  Index n_sa = 2;

  Index size() const { return vectors.rows(); }
};

// upsilon_l = [cos(pi/4 + (l-1) pi / L), sin(pi/4 + (l-1) pi / L), 0, ...].
// The built-in designer covers n_sa = 2 only; larger books must be supplied
// by the caller.
template <class Scalar>
BeamVectorBook<Scalar> design_upsilon(Index l_count, Index n_sa, Index n_s) {
  if (n_sa != 2)
    throw std::invalid_argument("design_upsilon: built-in book supports n_sa = 2 only");
  if (!is_power_of_two(l_count))
    throw std::invalid_argument("design_upsilon: L must be a power of two");
  if (n_sa > n_s) throw std::invalid_argument("design_upsilon: n_sa must not exceed n_s");
  BeamVectorBook<Scalar> book;
  book.n_sa = n_sa;
  book.vectors = Mat<Scalar>::Zero(l_count, n_s);
  for (Index l = 0; l < l_count; ++l) {
    const Scalar a = std::numbers::pi_v<Scalar> / 4 +
                     Scalar(l) * std::numbers::pi_v<Scalar> / Scalar(l_count);
    book.vectors(l, 0) = std::cos(a);
    book.vectors(l, 1) = std::sin(a);
  }
  return book;
}

// One candidate coefficient vector. l2 < 0 marks the same-beam (modulation
// error) branch; pair_index indexes the symbol pair for QAM cross-beam
// entries, -1 for PSK-style +/- beam sums.
template <class Scalar>
struct CandidateEntry {
  Vec<Scalar> eps;  // length n_sa, elementwise >= 0
  Index l1 = -1;
  Index l2 = -1;
  int pair_index = -1;
  int sign = 0;
};

template <class Scalar>
struct CandidateSet {
  std::vector<CandidateEntry<Scalar>> entries;
  Index n_sa = 2;
};

namespace detail {

template <class Scalar>
bool vec_close(const Vec<Scalar>& a, const Vec<Scalar>& b, Scalar rtol) {
  const Scalar scale = std::max(Scalar(1), std::max(a.cwiseAbs().maxCoeff(), b.cwiseAbs().maxCoeff()));
  return (a - b).cwiseAbs().maxCoeff() <= rtol * scale;
}

}  // namespace detail

// D0 = D1 (same-beam, scaled by the family minimum distance) plus D2
// (cross-beam). Constant-modulus constellations (all PSK orders, 4-QAM) use
// the +/- beam-sum branch; QAM uses the reduced symbol-pair set applied in
// both assignment orders and both signs.
template <class Scalar>
CandidateSet<Scalar> build_candidates(const BeamVectorBook<Scalar>& book,
                                      const Vec<Scalar>& eigvals,
                                      const Constellation<Scalar>& constellation) {
  const Index nsa = book.n_sa;
  if (eigvals.size() < nsa) throw std::invalid_argument("build_candidates: too few eigenvalues");
  for (Index k = 0; k < nsa; ++k)
    if (!(eigvals(k) > Scalar(0)))
      throw DegenerateSpectrumError("build_candidates: active eigenvalue not positive");

  const Vec<Scalar> lam = eigvals.head(nsa);
  const Index big_l = book.size();
  const Scalar dmin = min_distance(constellation);
  const bool const_mod = is_constant_modulus(constellation);

  CandidateSet<Scalar> d0;
  d0.n_sa = nsa;
  for (Index l = 0; l < big_l; ++l) {
    CandidateEntry<Scalar> e;
    e.eps = (dmin * dmin * lam.array() *
             book.vectors.row(l).head(nsa).transpose().array().square())
                .matrix();
    e.l1 = l;
    d0.entries.push_back(std::move(e));
  }

  SymbolPairSet<Scalar> sm;
  if (!const_mod) sm = build_sm(constellation);
  for (Index a = 0; a < big_l; ++a) {
    for (Index b = a + 1; b < big_l; ++b) {
      const Vec<Scalar> ua = book.vectors.row(a).head(nsa).transpose();
      const Vec<Scalar> ub = book.vectors.row(b).head(nsa).transpose();
      if (const_mod) {
        const Scalar e0 = std::norm(constellation.symbols(0));  // exactly 1 at unit energy
        for (int sign : {-1, +1}) {
          CandidateEntry<Scalar> e;
          e.eps = (e0 * lam.array() * (ua + Scalar(sign) * ub).array().square()).matrix();
          e.l1 = a;
          e.l2 = b;
          e.sign = sign;
          d0.entries.push_back(std::move(e));
        }
      } else {
        for (int p = 0; p < static_cast<int>(sm.pairs.size()); ++p) {
          const auto [s1, s2] = sm.pairs[static_cast<std::size_t>(p)];
          for (int order = 0; order < 2; ++order) {
            const Complex<Scalar> x = order ? s2 : s1;
            const Complex<Scalar> y = order ? s1 : s2;
            for (int sign : {-1, +1}) {
              CandidateEntry<Scalar> e;
              e.eps.resize(nsa);
              for (Index k = 0; k < nsa; ++k)
                e.eps(k) = lam(k) * std::norm(ua(k) * x + Scalar(sign) * ub(k) * y);
              e.l1 = a;
              e.l2 = b;
              e.pair_index = p;
              e.sign = sign;
              d0.entries.push_back(std::move(e));
            }
          }
        }
      }
    }
  }
  return d0;
}

// Removes every entry some other entry dominates elementwise; exact
// duplicates collapse to one representative.
template <class Scalar>
CandidateSet<Scalar> prune_dominated(const CandidateSet<Scalar>& d0) {
  CandidateSet<Scalar> uniq;
  uniq.n_sa = d0.n_sa;
  for (const auto& e : d0.entries) {
    bool dup = false;
    for (const auto& u : uniq.entries)
      if (detail::vec_close(e.eps, u.eps, Scalar(1e-12))) {
        dup = true;
        break;
      }
    if (!dup) uniq.entries.push_back(e);
  }
  CandidateSet<Scalar> out;
  out.n_sa = d0.n_sa;
  for (std::size_t i = 0; i < uniq.entries.size(); ++i) {
    bool dominated = false;
    for (std::size_t j = 0; j < uniq.entries.size() && !dominated; ++j) {
      if (i == j) continue;
      dominated = (uniq.entries[j].eps.array() <= uniq.entries[i].eps.array()).all();
    }
    if (!dominated) out.entries.push_back(uniq.entries[i]);
  }
  return out;
}

// For every size-n_sa subset of the pruned set, equate the n_sa affine forms
// eps . iota (iota_1 = 1) and keep strictly positive solutions. Singular
// subsets (parallel hyperplanes) are skipped.
template <class Scalar>
std::vector<Vec<Scalar>> solve_iota_candidates(const CandidateSet<Scalar>& d, Index n_sa) {
  const Index n = static_cast<Index>(d.entries.size());
  if (n < n_sa) throw std::invalid_argument("solve_iota_candidates: |D| < n_sa");

  std::vector<Vec<Scalar>> out;
  std::vector<Index> pick(static_cast<std::size_t>(n_sa));
  const auto try_subset = [&]() {
    const Index k = n_sa - 1;  // unknowns iota_2 .. iota_nsa
    Mat<Scalar> a(k, k);
    Vec<Scalar> rhs(k);
    const auto& e0 = d.entries[static_cast<std::size_t>(pick[0])].eps;
    for (Index r = 0; r < k; ++r) {
      const auto& er = d.entries[static_cast<std::size_t>(pick[static_cast<std::size_t>(r + 1)])].eps;
      for (Index c = 0; c < k; ++c) a(r, c) = er(c + 1) - e0(c + 1);
      rhs(r) = e0(0) - er(0);
    }
    Eigen::FullPivLU<Mat<Scalar>> lu(a);
    if (lu.rank() < k) return;
    const Vec<Scalar> x = lu.solve(rhs);
    if (((a * x - rhs).cwiseAbs().maxCoeff()) >
        Scalar(1e-9) * std::max(Scalar(1), rhs.cwiseAbs().maxCoeff()))
      return;
    for (Index i = 0; i < k; ++i)
      if (!(x(i) > Scalar(0)) || !std::isfinite(x(i))) return;
    Vec<Scalar> iota(n_sa);
    iota(0) = Scalar(1);
    iota.tail(k) = x;
    out.push_back(std::move(iota));
  };

  // enumerate combinations
  std::vector<Index> idx(static_cast<std::size_t>(n_sa));
  for (Index i = 0; i < n_sa; ++i) idx[static_cast<std::size_t>(i)] = i;
  while (true) {
    pick = idx;
    try_subset();
    Index i = n_sa - 1;
    while (i >= 0 && idx[static_cast<std::size_t>(i)] == n - n_sa + i) --i;
    if (i < 0) break;
    ++idx[static_cast<std::size_t>(i)];
    for (Index j = i + 1; j < n_sa; ++j)
      idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
  }

  std::sort(out.begin(), out.end(), [](const Vec<Scalar>& a, const Vec<Scalar>& b) {
    for (Index i = 1; i < a.size(); ++i) {
      if (a(i) < b(i)) return true;
      if (a(i) > b(i)) return false;
    }
    return false;
  });
  std::vector<Vec<Scalar>> dedup;
  for (auto& v : out) {
    if (dedup.empty() || !detail::vec_close(dedup.back(), v, Scalar(1e-9)))
      dedup.push_back(std::move(v));
  }
  return dedup;
}

// min over the full candidate set of (eps . iota) / sum(iota); the certified
// value must come from D0, not the pruned set.
template <class Scalar>
Scalar certified_min(const CandidateSet<Scalar>& d0, const Vec<Scalar>& iota) {
  Scalar best = std::numeric_limits<Scalar>::infinity();
  const Scalar denom = iota.sum();
  for (const auto& e : d0.entries) best = std::min(best, e.eps.dot(iota) / denom);
  return best;
}

template <class Scalar>
struct OptimumChoice {
  Vec<Scalar> iota;
  Scalar min_value_raw = 0;  // in the ||xi|| = 1 convention
  std::size_t candidate_index = 0;
};

// Candidates arrive sorted ascending; ties keep the earlier (smaller iota_2)
// entry, which fixes the output across platforms.
template <class Scalar>
OptimumChoice<Scalar> select_optimum(const std::vector<Vec<Scalar>>& candidates,
                                     const CandidateSet<Scalar>& d0) {
  if (candidates.empty())
    throw std::invalid_argument("select_optimum: empty candidate list (degenerate D)");
  OptimumChoice<Scalar> best;
  best.iota = candidates[0];
  best.min_value_raw = certified_min(d0, candidates[0]);
  for (std::size_t i = 1; i < candidates.size(); ++i) {
    const Scalar v = certified_min(d0, candidates[i]);
    if (v > best.min_value_raw * (Scalar(1) + Scalar(1e-12))) {
      best.min_value_raw = v;
      best.iota = candidates[i];
      best.candidate_index = i;
    }
  }
  return best;
}

template <class Scalar>
struct MCADesign {
  Vec<Scalar> iota;  // length n_sa, iota(0) = 1; empty for baselines
  Vec<Scalar> xi;    // length N_s, sum of squares = 1, zero beyond n_sa
  Mat<Scalar> v;     // L x N_s rows upsilon_l .* xi (design domain)
  CMat<Scalar> w;    // L x N_s aggregation matrix, mean row power = 1
  Scalar min_ed = std::numeric_limits<Scalar>::quiet_NaN();
  Scalar mean_power_raw = 1;  // mean row power of the un-rescaled construction
  Index n_sa = 0;

  Index beam_count() const { return w.rows(); }
};

// xi from iota, V rows upsilon .* xi, and W rows as the xi-weighted
// combination of eigenvector columns. W is rescaled once so the mean beam
// power (1/L) sum_l ||W(l,:)||^2 is exactly 1; reported distances and the
// simulator both live in this convention.
template <class Scalar>
MCADesign<Scalar> assemble_design(const Vec<Scalar>& iota_opt, const BeamVectorBook<Scalar>& book,
                                  const EffectiveChannel<Scalar>& effective) {
  const Index nsa = book.n_sa;
  if (iota_opt.size() != nsa) throw std::invalid_argument("assemble_design: iota size != n_sa");
  for (Index i = 0; i < nsa; ++i)
    if (!(iota_opt(i) > Scalar(0))) throw std::invalid_argument("assemble_design: iota must be > 0");
  const Index ns = effective.n_s;
  if (book.vectors.cols() != ns)
    throw std::invalid_argument("assemble_design: book width != N_s");

  MCADesign<Scalar> d;
  d.n_sa = nsa;
  d.iota = iota_opt;
  d.xi = Vec<Scalar>::Zero(ns);
  d.xi.head(nsa) = (iota_opt / iota_opt.sum()).cwiseSqrt();

  d.v = (book.vectors.array().rowwise() * d.xi.transpose().array()).matrix();
  d.mean_power_raw = d.v.rowwise().squaredNorm().mean();
  const Scalar rescale = Scalar(1) / std::sqrt(d.mean_power_raw);
  d.w = rescale * (d.v * effective.eigvecs.adjoint());
  return d;
}

template <class Scalar>
struct CandidateReport {
  Vec<Scalar> iota;
  Scalar min_ed = 0;  // in the stored-W (unit mean beam power) convention
};

template <class Scalar>
struct OptimizeResult {
  MCADesign<Scalar> design;
  std::vector<CandidateReport<Scalar>> table;  // sorted by iota ascending
  std::size_t winner_index = 0;
};

// Full Theorem-style pipeline: candidates, pruning, intersections, selection,
// assembly. Throws DegenerateSpectrumError when the active eigenvalues are
// too spread for the book (lambda_k < 1e-9 lambda_1 for some k <= n_sa).
template <class Scalar>
OptimizeResult<Scalar> optimize_design(const EffectiveChannel<Scalar>& effective,
                                       const BeamVectorBook<Scalar>& book,
                                       const Constellation<Scalar>& constellation) {
  for (Index k = 0; k < book.n_sa; ++k)
    if (effective.eigvals(k) < Scalar(1e-9) * effective.eigvals(0))
      throw DegenerateSpectrumError(
          "optimize_design: eigen-subchannel " + std::to_string(k + 1) +
          " is degenerate for this book; reduce n_sa");

  const CandidateSet<Scalar> d0 = build_candidates(book, effective.eigvals, constellation);
  const CandidateSet<Scalar> d = prune_dominated(d0);
  const auto candidates = solve_iota_candidates(d, book.n_sa);
  const auto choice = select_optimum(candidates, d0);

  OptimizeResult<Scalar> res;
  res.design = assemble_design(choice.iota, book, effective);
  res.design.min_ed = choice.min_value_raw / res.design.mean_power_raw;
  res.winner_index = choice.candidate_index;
  for (const auto& c : candidates) {
    CandidateReport<Scalar> r;
    r.iota = c;
    // mean_power_raw is xi-dependent in general; evaluate per candidate
    Vec<Scalar> xi = Vec<Scalar>::Zero(book.vectors.cols());
    xi.head(book.n_sa) = (c / c.sum()).cwiseSqrt();
    const Mat<Scalar> v = (book.vectors.array().rowwise() * xi.transpose().array()).matrix();
    r.min_ed = certified_min(d0, c) / v.rowwise().squaredNorm().mean();
    res.table.push_back(std::move(r));
  }
  return res;
}

// Conventional SSM: W = I, one beam per applied component. Requires L = N_s.
template <class Scalar>
MCADesign<Scalar> baseline_ssm(Index n_s) {
  if (n_s < 1) throw std::invalid_argument("baseline_ssm: n_s must be >= 1");
  MCADesign<Scalar> d;
  d.n_sa = n_s;
  d.w = CMat<Scalar>::Identity(n_s, n_s);
  d.v = Mat<Scalar>::Identity(n_s, n_s);
  d.xi = Vec<Scalar>::Zero(n_s);
  d.mean_power_raw = 1;
  return d;
}

// Generalized SSM with fixed equal-weight component subsets (N_s = 5, L = 8).
template <class Scalar>
MCADesign<Scalar> baseline_gssm() {
  static constexpr int pattern[8][5] = {
      {1, 1, 0, 0, 0}, {1, 0, 1, 0, 0}, {1, 0, 0, 1, 0}, {1, 0, 0, 0, 1},
      {0, 1, 1, 0, 0}, {0, 1, 0, 1, 0}, {0, 1, 0, 0, 1}, {0, 0, 1, 1, 0},
  };
  MCADesign<Scalar> d;
  d.n_sa = 5;
  d.w = CMat<Scalar>::Zero(8, 5);
  const Scalar s = Scalar(1) / std::sqrt(Scalar(2));
  for (Index r = 0; r < 8; ++r)
    for (Index c = 0; c < 5; ++c)
      if (pattern[r][c]) d.w(r, c) = s;
  d.v = d.w.real();
  d.xi = Vec<Scalar>::Zero(5);
  d.mean_power_raw = 1;
  return d;
}

}  // namespace mcassm
