// Copyright 2026 The WiQ Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <span>
#include <vector>

namespace wiq {

enum class WaveletFamily { kHaar, kDb2, kDb4, kSym4 };

struct WaveletFilters {
  std::vector<double> dec_lo, dec_hi, rec_lo, rec_hi;
};

WaveletFilters wavelet_filters(WaveletFamily family);

// Single-level DWT with half-sample symmetric extension. Each output has
// floor((n + F - 1) / 2) coefficients for a filter of length F.
struct DwtLevel {
  std::vector<double> approx;
  std::vector<double> detail;
};
DwtLevel dwt(std::span<const double> signal, const WaveletFilters& f);

// Inverse of dwt(); `out_length` selects the central part of the full
// reconstruction (the original signal length).
std::vector<double> idwt(std::span<const double> approx,
                         std::span<const double> detail,
                         const WaveletFilters& f, std::size_t out_length);

// Multi-level decomposition: details[0] is the finest level.
struct WaveletDecomposition {
  std::vector<double> approx;
  std::vector<std::vector<double>> details;
  std::vector<std::size_t> lengths;  // input length at each level
};
WaveletDecomposition wavedec(std::span<const double> signal,
                             const WaveletFilters& f, int levels);
std::vector<double> waverec(const WaveletDecomposition& dec,
                            const WaveletFilters& f);

}  // namespace wiq
