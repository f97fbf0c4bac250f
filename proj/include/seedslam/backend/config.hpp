/******************************************************************************
 * Copyright 2026 The seedslam Authors. All Rights Reserved.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 *****************************************************************************/

#pragma once

#include <cmath>
#include <limits>
#include <string>

#include "seedslam/core/errors.hpp"

namespace seedslam::backend {

enum class OptimizerKind { Dogleg, LevenbergMarquardt };

inline const char* to_string(OptimizerKind k) {
  return k == OptimizerKind::Dogleg ? "dogleg" : "levenberg-marquardt";
}

inline OptimizerKind optimizer_kind_from_string(const std::string& s) {
  if (s == "dogleg") return OptimizerKind::Dogleg;
  if (s == "levenberg-marquardt" || s == "lm") return OptimizerKind::LevenbergMarquardt;
  throw ValidationError("backend.optimizer: unknown optimizer '" + s + "'");
}

struct BackendConfig {
  /// Huber threshold on the whitened stereo residual norm; infinity disables robustness.
  double huber_k = 3.0;
  double pixel_sigma = 1.0;
  double motion_sigma_rot = 0.01;
  double motion_sigma_along = 0.2;
  double motion_sigma_perp = 0.01;
  int max_iterations = 50;
  /// Stop once an accepted step lowers the cost by less than this fraction.
  double convergence_tol = 1e-10;
  OptimizerKind optimizer = OptimizerKind::Dogleg;
  // Dogleg trust region schedule.
  double initial_trust_radius = 1.0;
  double trust_grow = 2.0;
  double trust_shrink = 0.25;
  double gain_grow_threshold = 0.75;
  double gain_shrink_threshold = 0.25;

  void validate() const {
    if (!(huber_k > 0.0)) throw ValidationError("backend.huber_k: must be > 0");
    if (!(pixel_sigma > 0.0)) throw ValidationError("backend.pixel_sigma: must be > 0");
    if (!(motion_sigma_rot > 0.0)) throw ValidationError("backend.motion_sigma_rot: must be > 0");
    if (!(motion_sigma_along > 0.0)) throw ValidationError("backend.motion_sigma_along: must be > 0");
    if (!(motion_sigma_perp > 0.0)) throw ValidationError("backend.motion_sigma_perp: must be > 0");
    if (max_iterations < 1) throw ValidationError("backend.max_iterations: must be >= 1");
    if (!(convergence_tol >= 0.0)) throw ValidationError("backend.convergence_tol: must be >= 0");
    if (!(initial_trust_radius > 0.0))
      throw ValidationError("backend.initial_trust_radius: must be > 0");
  }
};

}  // namespace seedslam::backend
