/*
 * Copyright 2026 The mistriage Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// Reference computations written without the library's own helpers, used
// to cross-check it.

#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <vector>

#include "mistriage/model.hpp"

namespace mistriage::oracle {

using Grid = std::array<std::array<std::int64_t, 3>, 3>;

// Rows reconstructed from published supports minus the published error cells.
Grid published_confusion();

struct Prf {
  double precision, recall, f1;
};

// Straight from the definitions; empty denominators give 0. Macro F1
// averages over classes seen in either the truth or the predictions.
std::array<Prf, 3> per_class(const Grid& g);
double macro_f1(const Grid& g);
double accuracy(const Grid& g);
double weighted_f1(const Grid& g);

// Macro F1 over a list of (true, predicted) class indices.
double macro_f1_of_pairs(const std::vector<std::pair<int, int>>& pairs);

// Exact distribution of macro F1 under resampling n pairs with replacement,
// by enumerating every multiset of indices with its multinomial
// probability. Only practical for very small n.
std::map<double, double> exact_bootstrap_macro_f1(const std::vector<std::pair<int, int>>& pairs);

// Central-difference gradient of f with respect to every entry of x.
Matrix numeric_gradient(const std::function<double()>& f, Matrix& x, double h);

// Largest elementwise |a - n| / max(|a|, |n|, floor).
double max_relative_error(const Matrix& analytic, const Matrix& numeric, double floor);

// Piecewise-linear schedule written out by hand.
double reference_lr(double step, double total, double warmup, double base);

}  // namespace mistriage::oracle
