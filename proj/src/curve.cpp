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

#include "infotransport/curve.hpp"

#include <cmath>

namespace infotransport {

Curve Curve::polynomial(std::vector<double> coefficients) {
  Curve c;
  c.kind_ = Kind::kPolynomial;
  if (coefficients.empty()) coefficients.push_back(0.0);
  c.coefficients_ = std::move(coefficients);
  return c;
}

Curve Curve::power(double coefficient, double exponent) {
  Curve c;
  c.kind_ = Kind::kPower;
  c.coefficient_ = coefficient;
  c.parameter_ = exponent;
  return c;
}

Curve Curve::exponential(double coefficient, double rate) {
  Curve c;
  c.kind_ = Kind::kExponential;
  c.coefficient_ = coefficient;
  c.parameter_ = rate;
  return c;
}

namespace {

// Horner evaluation of the d-th derivative of a polynomial.
double poly_eval(const std::vector<double>& c, int d, double y) {
  double acc = 0.0;
  for (int i = static_cast<int>(c.size()) - 1; i >= d; --i) {
    double factor = 1.0;
    for (int j = 0; j < d; ++j) factor *= static_cast<double>(i - j);
    acc = acc * y + factor * c[static_cast<size_t>(i)];
  }
  return acc;
}

}  // namespace

double Curve::value(double y) const {
  switch (kind_) {
    case Kind::kPolynomial: return poly_eval(coefficients_, 0, y);
    case Kind::kPower: return coefficient_ * std::pow(y, parameter_);
    case Kind::kExponential: return coefficient_ * std::exp(parameter_ * y);
  }
  return 0.0;
}

double Curve::derivative(double y) const {
  switch (kind_) {
    case Kind::kPolynomial: return poly_eval(coefficients_, 1, y);
    case Kind::kPower:
      if (parameter_ == 0.0) return 0.0;
      return coefficient_ * parameter_ * std::pow(y, parameter_ - 1.0);
    case Kind::kExponential:
      return coefficient_ * parameter_ * std::exp(parameter_ * y);
  }
  return 0.0;
}

double Curve::second_derivative(double y) const {
  switch (kind_) {
    case Kind::kPolynomial: return poly_eval(coefficients_, 2, y);
    case Kind::kPower:
      if (parameter_ == 0.0 || parameter_ == 1.0) return 0.0;
      return coefficient_ * parameter_ * (parameter_ - 1.0) *
             std::pow(y, parameter_ - 2.0);
    case Kind::kExponential:
      return coefficient_ * parameter_ * parameter_ *
             std::exp(parameter_ * y);
  }
  return 0.0;
}

bool Curve::is_zero() const {
  switch (kind_) {
    case Kind::kPolynomial:
      for (double c : coefficients_)
        if (c != 0.0) return false;
      return true;
    case Kind::kPower:
    case Kind::kExponential:
      return coefficient_ == 0.0;
  }
  return false;
}

}  // namespace infotransport
