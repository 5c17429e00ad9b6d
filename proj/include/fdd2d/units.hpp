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

#ifndef FDD2D_UNITS_HPP
#define FDD2D_UNITS_HPP

#include <cmath>

namespace fdd2d {

// Power-ratio dB conversions. All internal computation is in linear units
// (watts for powers); dB/dBm appear only at configuration boundaries.
inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

inline double linear_to_db(double lin) { return 10.0 * std::log10(lin); }

inline double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

inline double watts_to_dbm(double watts) { return 10.0 * std::log10(watts) + 30.0; }

// Thermal noise power in watts from PSD (dBm/Hz), bandwidth (Hz) and
// receiver noise figure (dB).
inline double noise_power_watts(double psd_dbm_hz, double bandwidth_hz, double noise_figure_db)
{
    return dbm_to_watts(psd_dbm_hz + 10.0 * std::log10(bandwidth_hz) + noise_figure_db);
}

} // namespace fdd2d

#endif
