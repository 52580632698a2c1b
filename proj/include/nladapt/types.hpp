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
#ifndef NLADAPT_TYPES_HPP
#define NLADAPT_TYPES_HPP

#include <Eigen/Dense>

#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>

namespace nladapt {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Seed used by every quasi-random verifier unless overridden.
inline constexpr unsigned long long kDefaultSeed = 20260114ULL;

/// Base class of all library errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Length mismatch between two objects that must agree.
class DimensionError : public Error {
public:
    DimensionError(const std::string& what, std::size_t expected, std::size_t actual);

    std::size_t expected() const noexcept { return expected_; }
    std::size_t actual() const noexcept { return actual_; }

private:
    std::size_t expected_;
    std::size_t actual_;
};

/// A user callable produced NaN or Inf.
class NumericError : public Error {
public:
    NumericError(const std::string& what, std::size_t index);

    std::size_t index() const noexcept { return index_; }

private:
    std::size_t index_;
};

/// A declared object failed its registration check (bad gradient, non-SPD gain, ...).
class ValidationError : public Error {
public:
    using Error::Error;
};

/// |L_g psi| fell below the admissible floor: the certainty-equivalent control is undefined.
class SingularityError : public Error {
public:
    SingularityError(Vector state, double time, double inputGain, std::string subsystem = {});

    const Vector& state() const noexcept { return state_; }
    double time() const noexcept { return time_; }
    double inputGain() const noexcept { return inputGain_; }
    const std::string& subsystem() const noexcept { return subsystem_; }

    /// Same error tagged with a subsystem label.
    SingularityError tagged(std::string subsystem) const;

private:
    Vector state_;
    double time_;
    double inputGain_;
    std::string subsystem_;
};

/// Throws DimensionError unless `actual == expected`.
void require_length(const char* what, std::size_t expected, std::size_t actual);

/// Throws NumericError naming the first non-finite coordinate of `v`.
void require_finite(const char* what, const Vector& v);

} // namespace nladapt

#endif // NLADAPT_TYPES_HPP
