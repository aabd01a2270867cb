// Copyright 2026 The infotransport Authors.
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

#include <vector>

namespace infotransport {

// A smooth scalar function of one variable with its first two derivatives.
// Used for the outer functions of structured welfare, radial densities and
// moment scalings, so that every problem instance stays serializable.
class Curve {
 public:
  enum class Kind { kPolynomial, kPower, kExponential };

  // c[0] + c[1] y + c[2] y^2 + ...
  static Curve polynomial(std::vector<double> coefficients);
  // coefficient * y^exponent, for y >= 0.
  static Curve power(double coefficient, double exponent);
  // coefficient * exp(rate * y).
  static Curve exponential(double coefficient, double rate);
  static Curve constant(double value) { return polynomial({value}); }
  static Curve identity() { return polynomial({0.0, 1.0}); }

  double operator()(double y) const { return value(y); }
  double value(double y) const;
  double derivative(double y) const;
  double second_derivative(double y) const;

  bool is_zero() const;

  Kind kind() const { return kind_; }
  const std::vector<double>& coefficients() const { return coefficients_; }
  double coefficient() const { return coefficient_; }
  double parameter() const { return parameter_; }

 private:
  Kind kind_ = Kind::kPolynomial;
  std::vector<double> coefficients_;
  double coefficient_ = 0.0;
  double parameter_ = 0.0;
};

}  // namespace infotransport
