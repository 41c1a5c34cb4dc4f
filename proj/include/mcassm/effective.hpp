// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 mcassm contributors
//
// Whitened effective channel. The RF-chain outputs see colored noise with
// covariance C = A_r(1:N_s,:) A_r^H(1:N_s,:); whitening left-multiplies by
// (B^H)^{-1} where B is the UPPER Cholesky factor, C = B^H B. Only this
// convention makes the whitened noise covariance exactly the identity.
#pragma once

#include <cmath>
#include <stdexcept>
#include <utility>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "mcassm/channel.hpp"
#include "mcassm/types.hpp"

namespace mcassm {

template <class Scalar>
struct EffectiveChannel {
  CMat<Scalar> g;                // N_s x N_s effective matrix
  CMat<Scalar> whitener_factor;  // upper-triangular B with C = B^H B
  Vec<Scalar> eigvals;           // eigenvalues of G^H G, descending, >= 0
  CMat<Scalar> eigvecs;          // columns are the matching eigenvectors
  Index n_s = 0;
  bool ridge_applied = false;
};

// Rows of (A_t, A_r) are the per-component Tx / Rx steering vectors.
template <class Scalar>
std::pair<CMat<Scalar>, CMat<Scalar>> steering_matrices(const ChannelScenario<Scalar>& scenario) {
  scenario.validate();
  const Index nts = scenario.n_paths();
  CMat<Scalar> at(nts, scenario.array.n_tx);
  CMat<Scalar> ar(nts, scenario.array.n_rx);
  for (Index i = 0; i < nts; ++i) {
    const auto& c = scenario.components[static_cast<std::size_t>(i)];
    at.row(i) = steering_vector(scenario.array.n_tx, scenario.array.d_tx, c.aod).transpose();
    ar.row(i) = steering_vector(scenario.array.n_rx, scenario.array.d_rx, c.aoa).transpose();
  }
  return {std::move(at), std::move(ar)};
}

template <class Scalar>
CMat<Scalar> noise_covariance(const CMat<Scalar>& a_r, Index n_s) {
  if (n_s < 1 || n_s > a_r.rows())
    throw std::invalid_argument("noise_covariance: n_s exceeds available components");
  return a_r.topRows(n_s) * a_r.topRows(n_s).adjoint();
}

// Upper-triangular B with C = B^H B. Throws if C is not positive definite.
template <class Scalar>
CMat<Scalar> whitener(const CMat<Scalar>& c_noise) {
  Eigen::LLT<CMat<Scalar>> llt(c_noise);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error(
        "whitener: noise covariance is not positive definite; "
        "reduce N_s or regularize (near-identical AoAs)");
  return llt.matrixU();
}

namespace detail {

// Deterministic eigenvector phases: scale each column so its
// largest-magnitude entry is real and positive.
template <class Scalar>
void fix_eigvec_phases(CMat<Scalar>& u) {
  for (Index k = 0; k < u.cols(); ++k) {
    Index imax = 0;
    u.col(k).cwiseAbs().maxCoeff(&imax);
    const Complex<Scalar> v = u(imax, k);
    const Scalar m = std::abs(v);
    if (m > Scalar(0)) u.col(k) *= std::conj(v) / m;
  }
}

}  // namespace detail

template <class Scalar>
EffectiveChannel<Scalar> effective_channel(const ChannelScenario<Scalar>& scenario, Index n_s) {
  scenario.validate();
  if (n_s < 1 || n_s > scenario.n_paths())
    throw std::invalid_argument("effective_channel: need 1 <= n_s <= number of components");

  // Strongest-first ordering is a scenario invariant; enforce locally so a
  // hand-built scenario cannot silently pick the wrong N_s subset.
  ChannelScenario<Scalar> sc = scenario;
  sort_components_by_gain(sc.components);

  const auto [a_t, a_r] = steering_matrices(sc);
  const CMat<Scalar> h = build_channel_matrix(sc);

  EffectiveChannel<Scalar> eff;
  eff.n_s = n_s;

  CMat<Scalar> c = noise_covariance(a_r, n_s);
  Eigen::SelfAdjointEigenSolver<CMat<Scalar>> ces(c, Eigen::EigenvaluesOnly);
  const Scalar floor = Scalar(1e-10) * static_cast<Scalar>(sc.array.n_rx);
  if (ces.eigenvalues().minCoeff() < floor) {
    c += floor * CMat<Scalar>::Identity(n_s, n_s);
    eff.ridge_applied = true;
  }
  eff.whitener_factor = whitener(c);

  const CMat<Scalar> m = a_r.topRows(n_s) * h * a_t.topRows(n_s).adjoint();
  const Scalar inv_sqrt_nt = Scalar(1) / std::sqrt(static_cast<Scalar>(sc.array.n_tx));
  eff.g = eff.whitener_factor.adjoint().template triangularView<Eigen::Lower>().solve(m) *
          inv_sqrt_nt;

  Eigen::SelfAdjointEigenSolver<CMat<Scalar>> es(eff.g.adjoint() * eff.g);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("effective_channel: eigendecomposition failed");

  // Eigen returns ascending order; flip to descending.
  eff.eigvals = es.eigenvalues().reverse();
  eff.eigvecs = es.eigenvectors().rowwise().reverse();

  const Scalar lam_max = std::max(Scalar(1), eff.eigvals(0));
  for (Index i = 0; i < eff.eigvals.size(); ++i) {
    if (eff.eigvals(i) < -Scalar(1e-9) * lam_max)
      throw std::runtime_error("effective_channel: significantly negative eigenvalue");
    if (eff.eigvals(i) < Scalar(0)) eff.eigvals(i) = Scalar(0);
  }
  detail::fix_eigvec_phases(eff.eigvecs);
  return eff;
}

}  // namespace mcassm
