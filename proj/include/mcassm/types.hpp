// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 mcassm contributors
#pragma once

#include <complex>

#include <Eigen/Dense>

namespace mcassm {

using Index = Eigen::Index;

template <class Scalar>
using Complex = std::complex<Scalar>;

template <class Scalar>
using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <class Scalar>
using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <class Scalar>
using CVec = Eigen::Matrix<Complex<Scalar>, Eigen::Dynamic, 1>;

template <class Scalar>
using CMat = Eigen::Matrix<Complex<Scalar>, Eigen::Dynamic, Eigen::Dynamic>;

}  // namespace mcassm
