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

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "test_util.hpp"
#include "wiq/preprocess.hpp"
#include "wiq/wavelet.hpp"

namespace wiq {
namespace {

#include "reference/pywt_reference.inc"

TEST(Wavelet, DwtMatchesPywt) {
  for (const auto& ref : kRefDwt13) {
    const DwtLevel l = dwt(kRefInput13, wavelet_filters(ref.family));
    ASSERT_EQ(l.approx.size(), ref.approx.size());
    ASSERT_EQ(l.detail.size(), ref.detail.size());
    for (std::size_t i = 0; i < l.approx.size(); ++i) {
      EXPECT_NEAR(l.approx[i], ref.approx[i], 1e-12);
      EXPECT_NEAR(l.detail[i], ref.detail[i], 1e-12);
    }
  }
}

TEST(Wavelet, DenoiseMatchesPywtPipeline) {
  for (const auto& ref : kRefDenoise64) {
    RssTrace t;
    t.samples = kRefInput64;
    WaveletConfig cfg;
    cfg.family = ref.family;
    cfg.decomposition_levels = ref.levels;
    const auto out = denoise(t, cfg);
    ASSERT_EQ(out.samples.size(), ref.samples.size());
    for (std::size_t i = 0; i < out.samples.size(); ++i) {
      EXPECT_NEAR(out.samples[i], ref.samples[i], 1e-10) << i;
    }
  }
}

// Property: decomposition followed by reconstruction is the identity.
TEST(Wavelet, PerfectReconstruction) {
  for (auto fam : {WaveletFamily::kHaar, WaveletFamily::kDb2, WaveletFamily::kDb4,
                   WaveletFamily::kSym4}) {
    const WaveletFilters f = wavelet_filters(fam);
    for (std::size_t n : {16u, 17u, 63u, 250u}) {
      const auto x = testing::random_vector(n, n * 7 + static_cast<int>(fam));
      const auto l = dwt(x, f);
      const auto y = idwt(l.approx, l.detail, f, n);
      for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(y[i], x[i], 1e-10);
      const auto dec = wavedec(x, f, 3);
      const auto z = waverec(dec, f);
      ASSERT_EQ(z.size(), n);
      for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(z[i], x[i], 1e-10);
    }
  }
}

TEST(Wavelet, FiltersAreOrthonormal) {
  for (auto fam : {WaveletFamily::kHaar, WaveletFamily::kDb2, WaveletFamily::kDb4,
                   WaveletFamily::kSym4}) {
    const auto f = wavelet_filters(fam);
    double e = 0.0, s = 0.0;
    for (double v : f.dec_lo) {
      e += v * v;
      s += v;
    }
    EXPECT_NEAR(e, 1.0, 1e-12);
    EXPECT_NEAR(s, std::sqrt(2.0), 1e-12);
  }
}

}  // namespace
}  // namespace wiq
