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

#include <doctest.h>

#include <sys/socket.h>

#include <random>

#include "pbitnqs/errors.hpp"
#include "pbitnqs/link.hpp"
#include "pbitnqs/trainer.hpp"
#include "pbitnqs/wire.hpp"

using namespace pbitnqs;

namespace {

PbitNetwork random_network(uint32_t n, uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> w(-4.0, 4.0);
    std::uniform_real_distribution<double> pick(0.0, 1.0);
    PbitNetwork net(n);
    for (uint32_t i = 0; i < n; ++i)
        for (uint32_t j = i + 1; j < n; ++j)
            if (pick(gen) < 0.3) net.set_coupler(i, j, FixedPoint::quantize(w(gen)));
    for (uint32_t i = 0; i < n; ++i) net.set_bias(i, FixedPoint::quantize(w(gen)));
    return net;
}

}  // namespace

TEST_CASE("frame: encode/decode round trip and header layout") {
    Frame f;
    f.type = MsgType::Run;
    f.payload = {1, 2, 3, 4, 5};
    const auto bytes = encode_frame(f);
    REQUIRE(bytes.size() == 11 + 5);
    CHECK(bytes[0] == 'P');
    CHECK(bytes[1] == 'B');
    CHECK(bytes[2] == 'I');
    CHECK(bytes[3] == 'T');
    CHECK(bytes[4] == 1);  // version LE
    CHECK(bytes[5] == 0);
    CHECK(bytes[6] == 4);  // RUN
    CHECK(bytes[7] == 5);  // payload_len LE
    size_t consumed = 0;
    const Frame back = decode_frame(bytes, &consumed);
    CHECK(back == f);
    CHECK(consumed == bytes.size());
}

TEST_CASE("frame: bad magic and truncation are rejected") {
    Frame f;
    f.type = MsgType::Hello;
    f.payload = encode_hello();
    auto bytes = encode_frame(f);
    auto corrupted = bytes;
    corrupted[0] = 'X';
    CHECK_THROWS_AS(decode_frame(corrupted), ProtocolError);
    const std::vector<uint8_t> truncated(bytes.begin(), bytes.begin() + 7);
    CHECK_THROWS_AS(decode_frame(truncated), ProtocolError);
    bytes.pop_back();  // payload shorter than advertised
    CHECK_THROWS_AS(decode_frame(bytes), ProtocolError);
}

TEST_CASE("encode_weights: documented layout for a trivial network") {
    PbitNetwork net(1);
    const auto payload = encode_weights(net);
    REQUIRE(payload.size() == 4 + 4 + 2);  // header + one bias word
    CHECK(payload[0] == 1);                // n = 1
    CHECK(payload[4] == 0);                // no couplers
    CHECK(payload[8] == 0);                // bias raw 0
    CHECK(payload[9] == 0);

    PbitNetwork biased(1);
    biased.set_bias(0, FixedPoint::quantize(1.0));
    const auto payload2 = encode_weights(biased);
    CHECK(payload2[8] == 8);  // 1.0 / 0.125
    CHECK(payload2[9] == 0);
}

TEST_CASE("weights: decode(encode(net)) is the identity on random networks") {
    for (uint64_t seed = 0; seed < 50; ++seed) {
        const PbitNetwork net = random_network(2 + seed % 17, seed);
        CHECK(decode_weights(encode_weights(net)) == net);
    }
}

TEST_CASE("weights: malformed payloads rejected") {
    PbitNetwork net(3);
    net.set_coupler(0, 2, FixedPoint::quantize(1.0));
    auto payload = encode_weights(net);
    auto short_payload = payload;
    short_payload.pop_back();
    CHECK_THROWS_AS(decode_weights(short_payload), ProtocolError);
    // Coupler indices must satisfy i < j < n.
    payload[8 + 3 * 2 + 0] = 9;  // first coupler's i
    CHECK_THROWS_AS(decode_weights(payload), ProtocolError);
}

TEST_CASE("encode_samples: bit packing matches the documented examples") {
    SampleBatch batch;
    batch.n_bits = 8;
    batch.n_rows = 1;
    batch.data = {1, 1, 1, 1, 1, 1, 1, 1};
    auto payload = encode_samples(batch);
    REQUIRE(payload.size() == 8 + 1);
    CHECK(payload[8] == 0xFF);

    batch.data = {1, -1, 1, -1, -1, -1, -1, -1};
    payload = encode_samples(batch);
    CHECK(payload[8] == 0x05);  // LSB-first

    SampleBatch wide;
    wide.n_bits = 288;
    wide.n_rows = 2;
    wide.data.assign(2 * 288, -1);
    payload = encode_samples(wide);
    CHECK(payload.size() == 8 + 2 * 36);  // 288 bits = exactly 36 bytes per row
}

TEST_CASE("samples: round trip preserves rows and padding") {
    std::mt19937_64 gen(7);
    for (int rep = 0; rep < 50; ++rep) {
        SampleBatch batch;
        batch.n_bits = 1 + gen() % 70;
        batch.n_rows = 1 + gen() % 20;
        batch.data.resize(static_cast<size_t>(batch.n_bits) * batch.n_rows);
        for (auto& m : batch.data) m = gen() & 1 ? 1 : -1;
        const SampleBatch back = decode_samples(encode_samples(batch));
        CHECK(back.n_bits == batch.n_bits);
        CHECK(back.n_rows == batch.n_rows);
        CHECK(back.data == batch.data);
    }
}

TEST_CASE("run/topology/hello/error payloads round-trip") {
    const RunRequest req{2000, 5, 200, 0xDEADBEEFCAFEULL};
    CHECK(decode_run(encode_run(req)) == req);
    const ChimeraDims dims{12, 3, 4};
    CHECK(decode_topology(encode_topology(dims)) == dims);
    CHECK(decode_hello(encode_hello()) == kWireVersion);
    const WireError err{kErrOrdering, "RUN before SET_WEIGHTS"};
    CHECK(decode_error(encode_error(err)) == err);
}

TEST_CASE("in-process session honors the ordering contract") {
    InprocessSession session;
    CHECK_THROWS_AS(session.run(10, 1, 0, 1), ProtocolError);
    session.set_weights(random_network(6, 3));
    const SampleBatch batch = session.run(10, 1, 0, 1);
    CHECK(batch.n_rows == 10);
    session.close();
    CHECK_THROWS_AS(session.run(10, 1, 0, 1), ProtocolError);
}

TEST_CASE("loopback server: hello, sampling, and substitutability") {
    LinkServer server("127.0.0.1", 0);
    server.start();

    RemoteSession remote("127.0.0.1:" + std::to_string(server.port()));
    const PbitNetwork net = random_network(12, 99);

    remote.set_topology({2, 2, 3});
    remote.set_weights(net);
    const SampleBatch via_wire = remote.run(200, 2, 50, 1234);

    InprocessSession local;
    local.set_weights(net);
    const SampleBatch direct = local.run(200, 2, 50, 1234);

    CHECK(via_wire == direct);  // bit-identical under the same seed
    remote.close();
    server.stop();
}

TEST_CASE("loopback server: weights larger than the announced topology") {
    LinkServer server("127.0.0.1", 0);
    server.start();
    RemoteSession remote("127.0.0.1:" + std::to_string(server.port()));
    remote.set_topology({1, 1, 1});  // capacity 2 p-bits
    try {
        remote.set_weights(random_network(12, 8));
        FAIL("expected ProtocolError");
    } catch (const ProtocolError& e) {
        CHECK(e.code() == kErrMismatch);
    }
    // Session survives; a fitting network goes through.
    remote.set_weights(random_network(2, 8));
    CHECK(remote.run(4, 1, 0, 3).n_rows == 4);
    remote.close();
    server.stop();
}

TEST_CASE("loopback server: RUN before SET_WEIGHTS yields an ordering error") {
    LinkServer server("127.0.0.1", 0);
    server.start();
    RemoteSession remote("127.0.0.1:" + std::to_string(server.port()));
    try {
        remote.run(10, 1, 0, 1);
        FAIL("expected ProtocolError");
    } catch (const ProtocolError& e) {
        CHECK(e.code() == kErrOrdering);
    }
    // The session survives the error.
    remote.set_weights(random_network(4, 4));
    CHECK(remote.run(5, 1, 0, 1).n_rows == 5);
    remote.close();
    server.stop();
}

TEST_CASE("loopback server: unknown message types and garbage do not kill it") {
    LinkServer server("127.0.0.1", 0);
    server.start();

    // Unknown message type: ERROR reply, session survives.
    {
        auto stream = detail::TcpStream::connect("127.0.0.1", server.port());
        Frame hello;
        hello.type = MsgType::Hello;
        hello.payload = encode_hello();
        stream.send_frame(hello);
        CHECK(stream.recv_frame()->type == MsgType::Hello);

        Frame bogus;
        bogus.type = static_cast<MsgType>(99);
        stream.send_frame(bogus);
        const auto reply = stream.recv_frame();
        REQUIRE(reply.has_value());
        CHECK(reply->type == MsgType::Error);
        CHECK(decode_error(reply->payload).code == kErrUnsupported);

        // Still alive: hello works again.
        stream.send_frame(hello);
        CHECK(stream.recv_frame()->type == MsgType::Hello);
    }

    // Bad magic: the server answers with ERROR and drops the connection.
    {
        auto stream = detail::TcpStream::connect("127.0.0.1", server.port());
        const std::vector<uint8_t> garbage = {'J', 'U', 'N', 'K', 0, 0, 0, 0, 0, 0, 0};
        ::send(stream.fd(), garbage.data(), garbage.size(), 0);
        const auto reply = stream.recv_frame();
        REQUIRE(reply.has_value());
        CHECK(reply->type == MsgType::Error);
    }

    // And it still serves new sessions afterwards.
    RemoteSession remote("127.0.0.1:" + std::to_string(server.port()));
    remote.set_weights(random_network(4, 11));
    CHECK(remote.run(3, 1, 0, 7).n_rows == 3);
    remote.close();
    server.stop();
    CHECK(server.sessions_served() >= 3);
}

TEST_CASE("remote training matches in-process training bit for bit") {
    LinkServer server("127.0.0.1", 0);
    server.start();

    TrainConfig cfg;
    cfg.model = TfimModel::uniform(6, 1.0, 1.0);
    cfg.alpha = 2;
    cfg.chimera = {3, 2, 4};
    cfg.mode = SamplingMode::PsiReweight;
    cfg.samples_per_epoch = 300;
    cfg.burn_in = 50;
    cfg.epochs = 8;
    cfg.seed = 17;

    cfg.sampler = SamplerKind::InprocessPbit;
    const TrainResult local = train(cfg);

    cfg.sampler = SamplerKind::Remote;
    cfg.endpoint = "127.0.0.1:" + std::to_string(server.port());
    const TrainResult remote = train(cfg);

    CHECK(local.history.same_numbers(remote.history));
    CHECK(local.params == remote.params);
    server.stop();
}
