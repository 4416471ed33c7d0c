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

#pragma once

#include <cstdint>
#include <optional>
#include <random>

#include <Eigen/Dense>

namespace cica {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Discrete LTI plant x' = A x + B u + w with quadratic stage cost
/// x'Qx + u'Ru and Gaussian noise covariance `noise_cov`.
///
/// Construction validates dimensions, Q and noise_cov symmetric PSD and
/// R symmetric PD; violations throw std::invalid_argument.
class PlantModel {
 public:
  PlantModel(Matrix A, Matrix B, Matrix Q, Matrix R, Matrix noise_cov);

  /// Linearized cart-pole: state [x, x_dot, theta, theta_dot], a single
  /// force input, R = [0.1]. The matrices are taken verbatim as the
  /// one-step map.
  static PlantModel cart_pole(double noise_std = 0.0);

  /// Same cart-pole with the verbatim matrices read as I + Ac and [Bc],
  /// discretized by forward Euler at `dt` seconds: A = I + dt (A0 - I),
  /// B = dt B0. dt = 1 reproduces cart_pole().
  static PlantModel cart_pole_sampled(double dt, double noise_std = 0.0);

  const Matrix& A() const { return A_; }
  const Matrix& B() const { return B_; }
  const Matrix& Q() const { return Q_; }
  const Matrix& R() const { return R_; }
  const Matrix& noise_cov() const { return noise_cov_; }
  /// Lower Cholesky-like factor L with L L' = noise_cov (zero when noise_cov = 0).
  const Matrix& noise_factor() const { return noise_factor_; }

  int state_dim() const { return static_cast<int>(A_.rows()); }
  int input_dim() const { return static_cast<int>(B_.cols()); }

  /// x'Qx + u'Ru.
  double stage_cost(const Vector& x, const Vector& u) const;

 private:
  Matrix A_, B_, Q_, R_, noise_cov_, noise_factor_;
};

struct LqrGain {
  Matrix phi;        // r x q, u = -phi x
  Matrix riccati_P;  // q x q
  int iterations = 0;
};

/// Solves the discrete algebraic Riccati equation by fixed-point iteration
///   P <- A'PA - A'PB (R + B'PB)^-1 B'PA + Q,  P_0 = Q
/// until the max-abs element change drops below tol * max(1, max|P|). Throws
/// std::runtime_error on non-convergence, on a singular R + B'PB, or if the
/// resulting closed loop A - B phi is not Schur stable.
LqrGain solve_dare(const PlantModel& model, double tol = 1e-10, int max_iter = 1000000);

/// Largest eigenvalue modulus.
double spectral_radius(const Matrix& M);

struct PlantState {
  Vector x;
  Vector u_prev;
  double lqr_running_sum = 0.0;
  std::int64_t steps = 0;

  static PlantState at(Vector x0, int input_dim);
};

/// Noisy, possibly stale state observation handed to the controller.
struct DelayedObservation {
  Vector x_observed;  // x(t - t_D) + measurement noise
  std::int64_t delay = 0;
};

struct StepResult {
  double eta = 0.0;  // instantaneous cost on the pre-update state
  bool closed_loop = false;
};

/// One control step. Closed loop (u = -phi x_obs) when `delivered` is set,
/// otherwise the previous action is held. The cost is evaluated on the
/// pre-update state with the applied action; then the state advances with
/// `process_noise` added.
StepResult step_plant(PlantState& state, const PlantModel& model, const LqrGain& gain,
                      const std::optional<DelayedObservation>& delivered,
                      const Vector& process_noise);

/// Convenience overload drawing the process noise from `rng`.
StepResult step_plant(PlantState& state, const PlantModel& model, const LqrGain& gain,
                      const std::optional<DelayedObservation>& delivered, std::mt19937_64& rng);

/// Draws N(0, noise_cov) using the model's factor.
Vector sample_noise(const PlantModel& model, std::mt19937_64& rng);

/// Mean LQR cost over a horizon of `horizon` steps; requires steps == horizon.
double mean_lqr(const PlantState& state, std::int64_t horizon);

}  // namespace cica
