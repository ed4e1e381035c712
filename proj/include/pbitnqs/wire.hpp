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
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "pbitnqs/chimera.hpp"
#include "pbitnqs/pbit_network.hpp"

namespace pbitnqs {

// Framed byte-stream protocol between trainer and sampler. Every frame is
//   magic "PBIT" | version u16 | msg_type u8 | payload_len u32 | payload
// with all integers little-endian. Sessions are strictly request/response.
inline constexpr char kWireMagic[4] = {'P', 'B', 'I', 'T'};
inline constexpr uint16_t kWireVersion = 1;

enum class MsgType : uint8_t {
    Hello = 1,
    SetTopology = 2,
    SetWeights = 3,
    Run = 4,
    Samples = 5,
    Error = 6,
    Bye = 7,
};

// Protocol error codes carried in ERROR payloads.
inline constexpr uint16_t kErrMalformed = 1;
inline constexpr uint16_t kErrOrdering = 2;
inline constexpr uint16_t kErrUnsupported = 3;
inline constexpr uint16_t kErrMismatch = 4;
inline constexpr uint16_t kErrInternal = 5;

struct Frame {
    uint16_t version = kWireVersion;
    MsgType type = MsgType::Hello;
    std::vector<uint8_t> payload;

    friend bool operator==(const Frame&, const Frame&) = default;
};

std::vector<uint8_t> encode_frame(const Frame& frame);

// Parses one frame from a complete buffer; throws ProtocolError(kErrMalformed)
// on bad magic, bad version, or length mismatch. `consumed` reports how many
// bytes the frame occupied.
Frame decode_frame(std::span<const uint8_t> bytes, size_t* consumed = nullptr);

// Payload encodings ---------------------------------------------------------

// Weights: header (n u32, n_couplers u32), biases as raw s{6}{3} values
// sign-extended to i16, then couplers as (i u32, j u32, raw i16) triples
// sorted by (i, j) with i < j.
std::vector<uint8_t> encode_weights(const PbitNetwork& net);
PbitNetwork decode_weights(std::span<const uint8_t> payload);

// Samples: header (n_bits u32, n_rows u32), rows bit-packed +1 -> 1, -1 -> 0,
// LSB-first within each byte, every row padded to a byte boundary. Sampling
// metadata is not carried; the requesting side knows it.
std::vector<uint8_t> encode_samples(const SampleBatch& batch);
SampleBatch decode_samples(std::span<const uint8_t> payload);

struct RunRequest {
    uint32_t n_samples = 0;
    uint32_t sweeps_per_sample = 0;
    uint32_t burn_in_sweeps = 0;
    uint64_t seed = 0;

    friend bool operator==(const RunRequest&, const RunRequest&) = default;
};

std::vector<uint8_t> encode_topology(const ChimeraDims& dims);
ChimeraDims decode_topology(std::span<const uint8_t> payload);

std::vector<uint8_t> encode_run(const RunRequest& req);
RunRequest decode_run(std::span<const uint8_t> payload);

std::vector<uint8_t> encode_hello(uint16_t version = kWireVersion);
uint16_t decode_hello(std::span<const uint8_t> payload);

struct WireError {
    uint16_t code = 0;
    std::string message;

    friend bool operator==(const WireError&, const WireError&) = default;
};

std::vector<uint8_t> encode_error(const WireError& err);
WireError decode_error(std::span<const uint8_t> payload);

std::string to_string(MsgType type);

}  // namespace pbitnqs
