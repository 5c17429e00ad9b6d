// SPDX-License-Identifier: Apache-2.0
//
// fdd2d: system-level simulation and joint beamforming / power allocation
// for massive-MIMO downlink networks with underlaid full-duplex D2D links
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#ifndef FDD2D_FDD2D_HPP
#define FDD2D_FDD2D_HPP

#include "fdd2d/baselines.hpp"
#include "fdd2d/channel.hpp"
#include "fdd2d/config_io.hpp"
#include "fdd2d/fp_solver.hpp"
#include "fdd2d/harness.hpp"
#include "fdd2d/metrics.hpp"
#include "fdd2d/rng.hpp"
#include "fdd2d/topology.hpp"
#include "fdd2d/units.hpp"

#endif
