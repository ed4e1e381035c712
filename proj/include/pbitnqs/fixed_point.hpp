// Copyright 2026 The pbit-nqs developers
//
//    Licensed under the Apache License, Version 2.0 (the "License");
//    you may not use this file except in compliance with the License.
//    You may obtain a copy of the License at
//
//        http://www.apache.org/licenses/LICENSE-2.0
//
//    Unless required by applicable law or agreed to in writing, software
//    distributed under the License is distributed on an "AS IS" BASIS,
//    WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
//    See the License for the specific language governing permissions and
//    limitations under the License.

#pragma once
#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace pbitnqs {

// Saturating s{6}{3} fixed-point value: 1 sign bit, 6 integer bits, 3 fraction
// bits. Stored as a two's-complement raw integer in [-512, 511] with
// value = raw * 2^-3, so the representable range is [-64.0, +63.875] in steps
// of 0.125. This is the precision every synaptic weight and bias has by the
// time the sampler sees it.
class FixedPoint {
public:
    static constexpr int kFractionBits = 3;
    static constexpr int kTotalBits = 10;
    static constexpr int32_t kRawMin = -512;
    static constexpr int32_t kRawMax = 511;
    static constexpr double kResolution = 0.125;  // 2^-kFractionBits

    constexpr FixedPoint() = default;

    static constexpr FixedPoint from_raw(int32_t raw) {
        if (raw < kRawMin || raw > kRawMax)
            throw std::out_of_range("FixedPoint::from_raw: raw value outside 10-bit range");
        return FixedPoint(static_cast<int16_t>(raw));
    }

    // Nearest representable value, ties to the even raw code, saturating at
    // the range ends. Rejects non-finite input.
    static FixedPoint quantize(double x) {
        if (!std::isfinite(x))
            throw std::invalid_argument("FixedPoint::quantize: non-finite input");
        // nearbyint rounds half to even under the default FE_TONEAREST mode,
        // which is exactly the tie rule we want in raw (LSB) units.
        double raw = std::nearbyint(x * 8.0);
        if (raw < kRawMin) raw = kRawMin;
        if (raw > kRawMax) raw = kRawMax;
        return FixedPoint(static_cast<int16_t>(raw));
    }

    // Saturating clamp of an integer accumulator expressed in raw units.
    static constexpr FixedPoint saturate_raw(int64_t raw_sum) {
        if (raw_sum < kRawMin) return FixedPoint(static_cast<int16_t>(kRawMin));
        if (raw_sum > kRawMax) return FixedPoint(static_cast<int16_t>(kRawMax));
        return FixedPoint(static_cast<int16_t>(raw_sum));
    }

    constexpr int16_t raw() const { return raw_; }
    constexpr double value() const { return raw_ * kResolution; }
    constexpr bool is_zero() const { return raw_ == 0; }

    static constexpr double min_value() { return kRawMin * kResolution; }  // -64.0
    static constexpr double max_value() { return kRawMax * kResolution; }  // +63.875

    friend constexpr bool operator==(FixedPoint a, FixedPoint b) { return a.raw_ == b.raw_; }
    friend constexpr bool operator<(FixedPoint a, FixedPoint b) { return a.raw_ < b.raw_; }

private:
    explicit constexpr FixedPoint(int16_t raw) : raw_(raw) {}
    int16_t raw_ = 0;
};

}  // namespace pbitnqs
