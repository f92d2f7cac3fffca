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

#include "wiq/wavelet.hpp"

#include <cmath>

#include "wiq/error.hpp"

namespace wiq {

namespace {

WaveletFilters from_dec_lo(std::vector<double> lo) {
  const std::size_t n = lo.size();
  WaveletFilters f;
  f.dec_lo = lo;
  f.dec_hi.resize(n);
  f.rec_lo.resize(n);
  f.rec_hi.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    f.rec_lo[i] = lo[n - 1 - i];
    // quadrature mirror: hi[i] = (-1)^(i+1) lo[n-1-i]
    f.dec_hi[i] = ((i % 2) ? 1.0 : -1.0) * lo[n - 1 - i];
  }
  for (std::size_t i = 0; i < n; ++i) f.rec_hi[i] = f.dec_hi[n - 1 - i];
  return f;
}

// Reflects an out-of-range index back into [0, n) (half-sample symmetric).
std::size_t reflect(long i, long n) {
  while (i < 0 || i >= n) {
    if (i < 0) i = -i - 1;
    if (i >= n) i = 2 * n - i - 1;
  }
  return static_cast<std::size_t>(i);
}

}  // namespace

WaveletFilters wavelet_filters(WaveletFamily family) {
  switch (family) {
    case WaveletFamily::kHaar: {
      const double r = 1.0 / std::sqrt(2.0);
      return from_dec_lo({r, r});
    }
    case WaveletFamily::kDb2:
      return from_dec_lo({-0.12940952255126037, 0.2241438680420134,
                          0.8365163037378079, 0.48296291314453416});
    case WaveletFamily::kDb4:
      return from_dec_lo({-0.010597401785069032, 0.0328830116668852,
                          0.030841381835560764, -0.18703481171909309,
                          -0.027983769416859854, 0.6308807679298589,
                          0.7148465705529157, 0.2303778133088965});
    case WaveletFamily::kSym4:
      return from_dec_lo({-0.07576571478927333, -0.02963552764599851,
                          0.49761866763201545, 0.8037387518059161,
                          0.29785779560527736, -0.09921954357684722,
                          -0.012603967262037833, 0.0322231006040427});
  }
  throw Error(ErrorKind::kConfig, "unknown wavelet family");
}

DwtLevel dwt(std::span<const double> signal, const WaveletFilters& f) {
  const long n = static_cast<long>(signal.size());
  const long taps = static_cast<long>(f.dec_lo.size());
  if (n < 1) throw Error(ErrorKind::kDimension, "empty signal");
  const long m = (n + taps - 1) / 2;
  DwtLevel out;
  out.approx.assign(static_cast<std::size_t>(m), 0.0);
  out.detail.assign(static_cast<std::size_t>(m), 0.0);
  for (long k = 0; k < m; ++k) {
    double a = 0.0;
    double d = 0.0;
    for (long j = 0; j < taps; ++j) {
      const double x = signal[reflect(2 * k + 1 - j, n)];
      a += f.dec_lo[static_cast<std::size_t>(j)] * x;
      d += f.dec_hi[static_cast<std::size_t>(j)] * x;
    }
    out.approx[static_cast<std::size_t>(k)] = a;
    out.detail[static_cast<std::size_t>(k)] = d;
  }
  return out;
}

std::vector<double> idwt(std::span<const double> approx,
                         std::span<const double> detail,
                         const WaveletFilters& f, std::size_t out_length) {
  if (approx.size() != detail.size()) {
    throw Error(ErrorKind::kDimension, "approx/detail length mismatch");
  }
  const std::size_t taps = f.rec_lo.size();
  const std::size_t m = approx.size();
  const std::size_t full = 2 * m + taps - 1;
  if (out_length + taps - 2 > full) {
    throw Error(ErrorKind::kDimension, "requested reconstruction too long");
  }
  std::vector<double> y(full, 0.0);
  for (std::size_t k = 0; k < m; ++k) {
    for (std::size_t j = 0; j < taps; ++j) {
      y[2 * k + j] += f.rec_lo[j] * approx[k] + f.rec_hi[j] * detail[k];
    }
  }
  return {y.begin() + static_cast<long>(taps - 2),
          y.begin() + static_cast<long>(taps - 2 + out_length)};
}

WaveletDecomposition wavedec(std::span<const double> signal,
                             const WaveletFilters& f, int levels) {
  if (levels < 1) throw Error(ErrorKind::kConfig, "levels must be >= 1");
  WaveletDecomposition dec;
  std::vector<double> current(signal.begin(), signal.end());
  for (int l = 0; l < levels; ++l) {
    dec.lengths.push_back(current.size());
    DwtLevel lvl = dwt(current, f);
    dec.details.push_back(std::move(lvl.detail));
    current = std::move(lvl.approx);
  }
  dec.approx = std::move(current);
  return dec;
}

std::vector<double> waverec(const WaveletDecomposition& dec,
                            const WaveletFilters& f) {
  std::vector<double> current = dec.approx;
  for (std::size_t l = dec.details.size(); l-- > 0;) {
    current = idwt(current, dec.details[l], f, dec.lengths[l]);
  }
  return current;
}

}  // namespace wiq
