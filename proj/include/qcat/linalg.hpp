// Copyright 2026 qcat contributors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <Eigen/Dense>

namespace qcat::linalg {

// Hermitian eigensolvers on (M + M^dag)/2. Large inputs go to LAPACK zheevd.
Eigen::VectorXd eigvalsh(const Eigen::MatrixXcd& m);
void eigh(const Eigen::MatrixXcd& m, Eigen::VectorXd& values, Eigen::MatrixXcd& vectors);
double min_eigenvalue(const Eigen::MatrixXcd& m);
// Square root of a PSD matrix; negative rounding eigenvalues are clipped to zero.
Eigen::MatrixXcd sqrt_psd(const Eigen::MatrixXcd& m);

}  // namespace qcat::linalg
