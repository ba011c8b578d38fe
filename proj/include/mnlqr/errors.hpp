// Copyright 2026 the mnlqr authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef MNLQR_ERRORS_HPP_
#define MNLQR_ERRORS_HPP_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mnlqr {

// Base class for every error thrown by this library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

class ShapeMismatch : public Error {
 public:
  using Error::Error;
};

// Dimension checks between higher-level objects report the same condition.
using DimensionMismatch = ShapeMismatch;

class InvalidMode : public Error {
 public:
  using Error::Error;
};

class LengthNotTriangular : public Error {
 public:
  using Error::Error;
};

class EmptyModeList : public Error {
 public:
  using Error::Error;
};

class NotSquare : public Error {
 public:
  using Error::Error;
};

class NotPsd : public Error {
 public:
  NotPsd(const std::string& what, double eigmin)
      : Error(what + " (min eigenvalue " + std::to_string(eigmin) + ")"),
        min_eigenvalue(eigmin) {}
  double min_eigenvalue;
};

class NotPd : public Error {
 public:
  using Error::Error;
};

class NotCpConstructed : public Error {
 public:
  using Error::Error;
};

class Unstable : public Error {
 public:
  Unstable(const std::string& what, double rho)
      : Error(what + " (spectral radius " + std::to_string(rho) + ")"),
        spectral_radius(rho) {}
  double spectral_radius;
};

class ModelNotEquivalent : public Error {
 public:
  using Error::Error;
};

class InsufficientSamples : public Error {
 public:
  using Error::Error;
};

class RankDeficientData : public Error {
 public:
  using Error::Error;
};

class NotObservable : public Error {
 public:
  explicit NotObservable(std::size_t i)
      : Error("disturbance not observable at sample " + std::to_string(i)),
        index(i) {}
  std::size_t index;
};

class InconsistentMeasurement : public Error {
 public:
  explicit InconsistentMeasurement(std::size_t i)
      : Error("measurement " + std::to_string(i) +
              " inconsistent with the mode tensor"),
        index(i) {}
  std::size_t index;
};

class NormBoundViolated : public Error {
 public:
  NormBoundViolated(std::size_t i, double norm, double bound)
      : Error("sample " + std::to_string(i) + " has norm " +
              std::to_string(norm) + " > bound " + std::to_string(bound)),
        index(i) {}
  std::size_t index;
};

class InvalidDelta : public Error {
 public:
  using Error::Error;
};

class SampleCountBelowThreshold : public Error {
 public:
  using Error::Error;
};

class NotStructured : public Error {
 public:
  using Error::Error;
};

class WBarNotPsd : public Error {
 public:
  WBarNotPsd(const std::string& what, double eigmin)
      : Error(what + " (min eigenvalue " + std::to_string(eigmin) + ")"),
        min_eigenvalue(eigmin) {}
  double min_eigenvalue;
};

class UnstableClosedLoop : public Error {
 public:
  UnstableClosedLoop(const std::string& what, double rho)
      : Error(what + " (spectral radius " + std::to_string(rho) + ")"),
        spectral_radius(rho) {}
  double spectral_radius;
};

class SingularInnerMatrix : public Error {
 public:
  using Error::Error;
};

class Diverged : public Error {
 public:
  using Error::Error;
};

class NotConverged : public Error {
 public:
  using Error::Error;
};

class TrajectoryBlowup : public Error {
 public:
  using Error::Error;
};

class EmptyInput : public Error {
 public:
  using Error::Error;
};

class ConfigInvalid : public Error {
 public:
  ConfigInvalid(const std::string& path, const std::string& what)
      : Error("config error at " + path + ": " + what), field_path(path) {}
  std::string field_path;
};

}  // namespace mnlqr

#endif  // MNLQR_ERRORS_HPP_
