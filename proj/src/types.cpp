/*
 Copyright 2026 The nladapt Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/
#include "nladapt/types.hpp"

#include <cmath>
#include <sstream>

namespace nladapt {

namespace {

std::string dimension_message(const std::string& what, std::size_t expected, std::size_t actual) {
    std::ostringstream os;
    os << what << ": expected length " << expected << ", got " << actual;
    return os.str();
}

std::string singularity_message(const Vector& state, double time, double gain, const std::string& subsystem) {
    std::ostringstream os;
    os << "control law undefined";
    if (!subsystem.empty()) {
        os << " in subsystem " << subsystem;
    }
    os << ": |L_g psi| = " << std::abs(gain) << " at t = " << time << ", state = [";
    for (Eigen::Index i = 0; i < state.size(); ++i) {
        os << (i ? ", " : "") << state[i];
    }
    os << "]";
    return os.str();
}

} // namespace

DimensionError::DimensionError(const std::string& what, std::size_t expected, std::size_t actual)
    : Error(dimension_message(what, expected, actual)), expected_(expected), actual_(actual) {}

NumericError::NumericError(const std::string& what, std::size_t index)
    : Error(what + ": non-finite value at coordinate " + std::to_string(index)), index_(index) {}

SingularityError::SingularityError(Vector state, double time, double inputGain, std::string subsystem)
    : Error(singularity_message(state, time, inputGain, subsystem)),
      state_(std::move(state)),
      time_(time),
      inputGain_(inputGain),
      subsystem_(std::move(subsystem)) {}

SingularityError SingularityError::tagged(std::string subsystem) const {
    return SingularityError(state_, time_, inputGain_, std::move(subsystem));
}

void require_length(const char* what, std::size_t expected, std::size_t actual) {
    if (expected != actual) {
        throw DimensionError(what, expected, actual);
    }
}

void require_finite(const char* what, const Vector& v) {
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (!std::isfinite(v[i])) {
            throw NumericError(what, static_cast<std::size_t>(i));
        }
    }
}

} // namespace nladapt
