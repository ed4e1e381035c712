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

#include "pbitnqs/wire.hpp"

#include <cstring>

#include "pbitnqs/errors.hpp"

namespace pbitnqs {

namespace {

constexpr size_t kHeaderSize = 4 + 2 + 1 + 4;
constexpr uint32_t kMaxPayload = 1u << 28;  // 256 MiB sanity bound

class Writer {
public:
    explicit Writer(std::vector<uint8_t>& out) : out_(out) {}
    void u8(uint8_t x) { out_.push_back(x); }
    void u16(uint16_t x) {
        out_.push_back(static_cast<uint8_t>(x));
        out_.push_back(static_cast<uint8_t>(x >> 8));
    }
    void u32(uint32_t x) {
        for (int k = 0; k < 4; ++k) out_.push_back(static_cast<uint8_t>(x >> (8 * k)));
    }
    void u64(uint64_t x) {
        for (int k = 0; k < 8; ++k) out_.push_back(static_cast<uint8_t>(x >> (8 * k)));
    }
    void i16(int16_t x) { u16(static_cast<uint16_t>(x)); }

private:
    std::vector<uint8_t>& out_;
};

class Reader {
public:
    explicit Reader(std::span<const uint8_t> bytes) : bytes_(bytes) {}
    uint8_t u8() { return take(1)[0]; }
    uint16_t u16() {
        const auto b = take(2);
        return static_cast<uint16_t>(b[0] | b[1] << 8);
    }
    uint32_t u32() {
        const auto b = take(4);
        return static_cast<uint32_t>(b[0]) | static_cast<uint32_t>(b[1]) << 8 |
               static_cast<uint32_t>(b[2]) << 16 | static_cast<uint32_t>(b[3]) << 24;
    }
    uint64_t u64() {
        uint64_t x = 0;
        const auto b = take(8);
        for (int k = 0; k < 8; ++k) x |= static_cast<uint64_t>(b[k]) << (8 * k);
        return x;
    }
    int16_t i16() { return static_cast<int16_t>(u16()); }
    size_t remaining() const { return bytes_.size() - pos_; }
    std::span<const uint8_t> take(size_t n) {
        if (remaining() < n) throw ProtocolError(kErrMalformed, "payload truncated");
        const auto out = bytes_.subspan(pos_, n);
        pos_ += n;
        return out;
    }
    void expect_done(const char* what) const {
        if (remaining() != 0)
            throw ProtocolError(kErrMalformed, std::string(what) + ": trailing payload bytes");
    }

private:
    std::span<const uint8_t> bytes_;
    size_t pos_ = 0;
};

}  // namespace

std::vector<uint8_t> encode_frame(const Frame& frame) {
    std::vector<uint8_t> out;
    out.reserve(kHeaderSize + frame.payload.size());
    Writer w(out);
    for (char c : kWireMagic) w.u8(static_cast<uint8_t>(c));
    w.u16(frame.version);
    w.u8(static_cast<uint8_t>(frame.type));
    w.u32(static_cast<uint32_t>(frame.payload.size()));
    out.insert(out.end(), frame.payload.begin(), frame.payload.end());
    return out;
}

Frame decode_frame(std::span<const uint8_t> bytes, size_t* consumed) {
    if (bytes.size() < kHeaderSize) throw ProtocolError(kErrMalformed, "frame header truncated");
    if (std::memcmp(bytes.data(), kWireMagic, 4) != 0)
        throw ProtocolError(kErrMalformed, "bad frame magic");
    Reader r(bytes.subspan(4));
    Frame frame;
    frame.version = r.u16();  // version policy is the session's call
    frame.type = static_cast<MsgType>(r.u8());
    const uint32_t len = r.u32();
    if (len > kMaxPayload) throw ProtocolError(kErrMalformed, "payload length out of bounds");
    if (r.remaining() < len) throw ProtocolError(kErrMalformed, "frame payload truncated");
    const auto body = r.take(len);
    frame.payload.assign(body.begin(), body.end());
    if (consumed) *consumed = kHeaderSize + len;
    return frame;
}

std::vector<uint8_t> encode_weights(const PbitNetwork& net) {
    const std::vector<Coupler> couplers = net.couplers();
    std::vector<uint8_t> out;
    out.reserve(8 + 2 * net.size() + 10 * couplers.size());
    Writer w(out);
    w.u32(net.size());
    w.u32(static_cast<uint32_t>(couplers.size()));
    for (uint32_t i = 0; i < net.size(); ++i) w.i16(net.bias(i).raw());
    for (const Coupler& c : couplers) {
        w.u32(c.i);
        w.u32(c.j);
        w.i16(c.weight.raw());
    }
    return out;
}

PbitNetwork decode_weights(std::span<const uint8_t> payload) {
    Reader r(payload);
    const uint32_t n = r.u32();
    const uint32_t n_couplers = r.u32();
    if (n == 0) throw ProtocolError(kErrMalformed, "weights: zero-size network");
    if (n > (1u << 24)) throw ProtocolError(kErrMalformed, "weights: implausible network size");
    PbitNetwork net(n);
    auto checked_raw = [&](int16_t raw) {
        if (raw < FixedPoint::kRawMin || raw > FixedPoint::kRawMax)
            throw ProtocolError(kErrMalformed, "weights: raw value outside s{6}{3}");
        return FixedPoint::from_raw(raw);
    };
    for (uint32_t i = 0; i < n; ++i) net.set_bias(i, checked_raw(r.i16()));
    for (uint32_t k = 0; k < n_couplers; ++k) {
        const uint32_t i = r.u32();
        const uint32_t j = r.u32();
        const FixedPoint weight = checked_raw(r.i16());
        if (i >= j || j >= n) throw ProtocolError(kErrMalformed, "weights: bad coupler indices");
        net.set_coupler(i, j, weight);
    }
    r.expect_done("weights");
    return net;
}

std::vector<uint8_t> encode_samples(const SampleBatch& batch) {
    const uint32_t row_bytes = (batch.n_bits + 7) / 8;
    std::vector<uint8_t> out;
    out.reserve(8 + static_cast<size_t>(row_bytes) * batch.n_rows);
    Writer w(out);
    w.u32(batch.n_bits);
    w.u32(batch.n_rows);
    for (uint32_t r = 0; r < batch.n_rows; ++r) {
        const auto row = batch.row(r);
        for (uint32_t byte = 0; byte < row_bytes; ++byte) {
            uint8_t packed = 0;
            for (uint32_t bit = 0; bit < 8; ++bit) {
                const uint32_t k = byte * 8 + bit;
                if (k < batch.n_bits && row[k] > 0) packed |= static_cast<uint8_t>(1u << bit);
            }
            w.u8(packed);
        }
    }
    return out;
}

SampleBatch decode_samples(std::span<const uint8_t> payload) {
    Reader r(payload);
    SampleBatch batch;
    batch.n_bits = r.u32();
    batch.n_rows = r.u32();
    if (batch.n_bits == 0) throw ProtocolError(kErrMalformed, "samples: zero-width rows");
    const uint32_t row_bytes = (batch.n_bits + 7) / 8;
    batch.data.resize(static_cast<size_t>(batch.n_rows) * batch.n_bits);
    for (uint32_t row = 0; row < batch.n_rows; ++row) {
        const auto bytes = r.take(row_bytes);
        for (uint32_t k = 0; k < batch.n_bits; ++k)
            batch.data[static_cast<size_t>(row) * batch.n_bits + k] =
                bytes[k / 8] >> (k % 8) & 1 ? int8_t{1} : int8_t{-1};
    }
    r.expect_done("samples");
    return batch;
}

std::vector<uint8_t> encode_topology(const ChimeraDims& dims) {
    std::vector<uint8_t> out;
    Writer w(out);
    w.u32(dims.rows);
    w.u32(dims.cols);
    w.u32(dims.shore);
    return out;
}

ChimeraDims decode_topology(std::span<const uint8_t> payload) {
    Reader r(payload);
    ChimeraDims dims{r.u32(), r.u32(), r.u32()};
    r.expect_done("topology");
    if (dims.rows == 0 || dims.cols == 0 || dims.shore == 0)
        throw ProtocolError(kErrMalformed, "topology: zero dimension");
    return dims;
}

std::vector<uint8_t> encode_run(const RunRequest& req) {
    std::vector<uint8_t> out;
    Writer w(out);
    w.u32(req.n_samples);
    w.u32(req.sweeps_per_sample);
    w.u32(req.burn_in_sweeps);
    w.u64(req.seed);
    return out;
}

RunRequest decode_run(std::span<const uint8_t> payload) {
    Reader r(payload);
    RunRequest req;
    req.n_samples = r.u32();
    req.sweeps_per_sample = r.u32();
    req.burn_in_sweeps = r.u32();
    req.seed = r.u64();
    r.expect_done("run");
    if (req.n_samples == 0 || req.sweeps_per_sample == 0)
        throw ProtocolError(kErrMalformed, "run: counts must be >= 1");
    return req;
}

std::vector<uint8_t> encode_hello(uint16_t version) {
    std::vector<uint8_t> out;
    Writer w(out);
    w.u16(version);
    return out;
}

uint16_t decode_hello(std::span<const uint8_t> payload) {
    Reader r(payload);
    const uint16_t version = r.u16();
    r.expect_done("hello");
    return version;
}

std::vector<uint8_t> encode_error(const WireError& err) {
    std::vector<uint8_t> out;
    Writer w(out);
    w.u16(err.code);
    out.insert(out.end(), err.message.begin(), err.message.end());
    return out;
}

WireError decode_error(std::span<const uint8_t> payload) {
    Reader r(payload);
    WireError err;
    err.code = r.u16();
    const auto text = r.take(r.remaining());
    err.message.assign(text.begin(), text.end());
    return err;
}

std::string to_string(MsgType type) {
    switch (type) {
        case MsgType::Hello: return "HELLO";
        case MsgType::SetTopology: return "SET_TOPOLOGY";
        case MsgType::SetWeights: return "SET_WEIGHTS";
        case MsgType::Run: return "RUN";
        case MsgType::Samples: return "SAMPLES";
        case MsgType::Error: return "ERROR";
        case MsgType::Bye: return "BYE";
    }
    return "UNKNOWN(" + std::to_string(static_cast<int>(type)) + ")";
}

}  // namespace pbitnqs
