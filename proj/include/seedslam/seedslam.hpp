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

#include "seedslam/assoc/associate.hpp"
#include "seedslam/assoc/cost.hpp"
#include "seedslam/assoc/hungarian.hpp"
#include "seedslam/assoc/types.hpp"
#include "seedslam/backend/config.hpp"
#include "seedslam/backend/export.hpp"
#include "seedslam/backend/factor_graph.hpp"
#include "seedslam/backend/factors.hpp"
#include "seedslam/backend/landmark_track.hpp"
#include "seedslam/backend/optimizer.hpp"
#include "seedslam/config.hpp"
#include "seedslam/core/detection_io.hpp"
#include "seedslam/core/errors.hpp"
#include "seedslam/core/se3.hpp"
#include "seedslam/core/types.hpp"
#include "seedslam/core/version.hpp"
#include "seedslam/eval/metrics.hpp"
#include "seedslam/geometry/icp.hpp"
#include "seedslam/geometry/stereo.hpp"
#include "seedslam/pipeline/slam_pipeline.hpp"
#include "seedslam/postprocess/postprocess.hpp"
#include "seedslam/postprocess/spatial_grid.hpp"
#include "seedslam/sim/ground_truth_io.hpp"
#include "seedslam/sim/scene.hpp"
