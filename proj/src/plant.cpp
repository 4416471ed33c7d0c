// Copyright 2026 The CICA Subnetwork Authors
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

#include "cica/plant.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace cica {
namespace {

constexpr double kSymmetryTol = 1e-10;

void require_symmetric(const Matrix& M, const char* name) {
  if (M.rows() != M.cols()) {
    throw std::invalid_argument(std::string(name) + " must be square");
  }
  if (M.size() > 0 && (M - M.transpose()).cwiseAbs().maxCoeff() > kSymmetryTol * std::max(1.0, M.cwiseAbs().maxCoeff())) {
    throw std::invalid_argument(std::string(name) + " must be symmetric");
  }
}

void require_psd(const Matrix& M, const char* name) {
  require_symmetric(M, name);
  if (M.size() == 0) return;
  Eigen::SelfAdjointEigenSolver<Matrix> eig(M);
  if (eig.info() != Eigen::Success || eig.eigenvalues().minCoeff() < -1e-12 * std::max(1.0, M.cwiseAbs().maxCoeff())) {
    throw std::invalid_argument(std::string(name) + " must be positive semidefinite");
  }
}

void require_pd(const Matrix& M, const char* name) {
  require_symmetric(M, name);
  Eigen::LLT<Matrix> llt(M);
  if (llt.info() != Eigen::Success) {
    throw std::invalid_argument(std::string(name) + " must be positive definite");
  }
}

Matrix psd_factor(const Matrix& M) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(M);
  Vector root = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return eig.eigenvectors() * root.asDiagonal();
}

Matrix cart_pole_A() {
  Matrix A(4, 4);
  A << 1, 1, 0, 0,
       0, 1, -1.78, 0,
       0, 0, 1, 1,
       0, 0, 106.91, 1;
  return A;
}

Matrix cart_pole_B() {
  Matrix B(4, 1);
  B << 0, 1.97, 0, -18.18;
  return B;
}

Matrix cart_pole_Q() {
  Vector d(4);
  d << 1, 10, 10, 100;
  return d.asDiagonal();
}

}  // namespace

PlantModel::PlantModel(Matrix A, Matrix B, Matrix Q, Matrix R, Matrix noise_cov)
    : A_(std::move(A)), B_(std::move(B)), Q_(std::move(Q)), R_(std::move(R)), noise_cov_(std::move(noise_cov)) {
  const auto q = A_.rows();
  if (q == 0 || A_.cols() != q) throw std::invalid_argument("A must be a non-empty square matrix");
  if (B_.rows() != q || B_.cols() == 0) throw std::invalid_argument("B must have as many rows as A");
  const auto r = B_.cols();
  if (Q_.rows() != q || Q_.cols() != q) throw std::invalid_argument("Q must be q x q");
  if (R_.rows() != r || R_.cols() != r) throw std::invalid_argument("R must be r x r");
  if (noise_cov_.rows() != q || noise_cov_.cols() != q) throw std::invalid_argument("noise_cov must be q x q");
  if (!A_.allFinite() || !B_.allFinite()) throw std::invalid_argument("A and B must be finite");
  require_psd(Q_, "Q");
  require_pd(R_, "R");
  require_psd(noise_cov_, "noise_cov");
  noise_factor_ = psd_factor(noise_cov_);
}

PlantModel PlantModel::cart_pole(double noise_std) {
  return cart_pole_sampled(1.0, noise_std);
}

PlantModel PlantModel::cart_pole_sampled(double dt, double noise_std) {
  if (!(dt > 0.0)) throw std::invalid_argument("sampling interval must be positive");
  if (!(noise_std >= 0.0)) throw std::invalid_argument("noise std must be non-negative");
  const Matrix I = Matrix::Identity(4, 4);
  Matrix A = dt == 1.0 ? cart_pole_A() : Matrix(I + dt * (cart_pole_A() - I));
  Matrix B = dt == 1.0 ? cart_pole_B() : Matrix(dt * cart_pole_B());
  Matrix R(1, 1);
  R << 0.1;
  return PlantModel(std::move(A), std::move(B), cart_pole_Q(), std::move(R), noise_std * noise_std * I);
}

double PlantModel::stage_cost(const Vector& x, const Vector& u) const {
  return x.dot(Q_ * x) + u.dot(R_ * u);
}

double spectral_radius(const Matrix& M) {
  Eigen::EigenSolver<Matrix> eig(M, false);
  return eig.eigenvalues().cwiseAbs().maxCoeff();
}

LqrGain solve_dare(const PlantModel& model, double tol, int max_iter) {
  if (!(tol > 0.0)) throw std::invalid_argument("solve_dare: tol must be positive");
  if (max_iter < 1) throw std::invalid_argument("solve_dare: max_iter must be positive");
  const Matrix& A = model.A();
  const Matrix& B = model.B();
  const Matrix& Q = model.Q();
  const Matrix& R = model.R();

  auto gain_for = [&](const Matrix& P) {
    const Matrix S = R + B.transpose() * P * B;
    Eigen::FullPivLU<Matrix> lu(S);
    if (!lu.isInvertible()) throw std::runtime_error("solve_dare: R + B'PB is singular");
    return Matrix(lu.solve(B.transpose() * P * A));
  };

  Matrix P = Q;
  for (int it = 1; it <= max_iter; ++it) {
    const Matrix K = gain_for(P);
    Matrix next = A.transpose() * P * A - A.transpose() * P * B * K + Q;
    next = 0.5 * (next + next.transpose());
    if (!next.allFinite()) break;
    // Relative to the iterate: an absolute test can sit below one ulp of a large P.
    const double change = (next - P).cwiseAbs().maxCoeff();
    const double scale = std::max(1.0, next.cwiseAbs().maxCoeff());
    P = std::move(next);
    if (change < tol * scale) {
      LqrGain gain{gain_for(P), P, it};
      if (spectral_radius(A - B * gain.phi) >= 1.0) {
        throw std::runtime_error("solve_dare: closed loop is not stable");
      }
      return gain;
    }
  }
  throw std::runtime_error("solve_dare: Riccati iteration did not converge (is (A, B) stabilizable?)");
}

PlantState PlantState::at(Vector x0, int input_dim) {
  PlantState s;
  s.x = std::move(x0);
  s.u_prev = Vector::Zero(input_dim);
  return s;
}

StepResult step_plant(PlantState& state, const PlantModel& model, const LqrGain& gain,
                      const std::optional<DelayedObservation>& delivered, const Vector& process_noise) {
  StepResult out;
  Vector u = delivered ? Vector(-gain.phi * delivered->x_observed) : state.u_prev;
  out.closed_loop = delivered.has_value();
  out.eta = model.stage_cost(state.x, u);
  state.x = model.A() * state.x + model.B() * u + process_noise;
  state.u_prev = std::move(u);
  state.lqr_running_sum += out.eta;
  ++state.steps;
  return out;
}

Vector sample_noise(const PlantModel& model, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector z(model.state_dim());
  for (int i = 0; i < z.size(); ++i) z[i] = normal(rng);
  return model.noise_factor() * z;
}

StepResult step_plant(PlantState& state, const PlantModel& model, const LqrGain& gain,
                      const std::optional<DelayedObservation>& delivered, std::mt19937_64& rng) {
  return step_plant(state, model, gain, delivered, sample_noise(model, rng));
}

double mean_lqr(const PlantState& state, std::int64_t horizon) {
  if (horizon <= 0) throw std::invalid_argument("mean_lqr: horizon must be positive");
  if (state.steps != horizon) throw std::invalid_argument("mean_lqr: plant has not run exactly `horizon` steps");
  return state.lqr_running_sum / static_cast<double>(horizon);
}

}  // namespace cica
