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
#include <atomic>
#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "pbitnqs/chimera.hpp"
#include "pbitnqs/pbit_network.hpp"

namespace pbitnqs {

struct Frame;  // wire.hpp

// Behavioral options of a sampler backend. They select between trajectories
// that share the same stationary distribution; both ends of a remote link must
// agree on them for bit-identical runs.
struct SamplerOptions {
    Activation activation = Activation::Tanh;
    UpdateOrder update_order = UpdateOrder::Sequential;
    bool parallel_sweeps = false;

    friend bool operator==(const SamplerOptions&, const SamplerOptions&) = default;
};

// The sampler side of the hybrid loop. Strictly request/response: run() uses
// exactly the last weights set. Not shareable across threads without external
// serialization.
class SamplerSession {
public:
    virtual ~SamplerSession() = default;
    virtual void set_topology(const ChimeraDims& dims) = 0;
    virtual void set_weights(const PbitNetwork& net) = 0;
    virtual SampleBatch run(uint32_t n_samples, uint32_t sweeps_per_sample,
                            uint32_t burn_in_sweeps, uint64_t seed) = 0;
    virtual void close() = 0;
};

// Runs the emulated p-bit network in the calling process.
class InprocessSession final : public SamplerSession {
public:
    explicit InprocessSession(SamplerOptions opts = {}) : opts_(opts) {}

    void set_topology(const ChimeraDims& dims) override;
    void set_weights(const PbitNetwork& net) override;
    SampleBatch run(uint32_t n_samples, uint32_t sweeps_per_sample, uint32_t burn_in_sweeps,
                    uint64_t seed) override;
    void close() override;

private:
    SamplerOptions opts_;
    std::optional<ChimeraDims> topology_;
    std::optional<PbitNetwork> net_;
    bool closed_ = false;
};

namespace detail {

// Thin RAII TCP stream with framed send/receive.
class TcpStream {
public:
    TcpStream() = default;
    explicit TcpStream(int fd) : fd_(fd) {}
    TcpStream(TcpStream&& other) noexcept;
    TcpStream& operator=(TcpStream&& other) noexcept;
    TcpStream(const TcpStream&) = delete;
    TcpStream& operator=(const TcpStream&) = delete;
    ~TcpStream();

    static TcpStream connect(const std::string& host, uint16_t port);

    bool valid() const { return fd_ >= 0; }
    int fd() const { return fd_; }
    void shutdown_and_close();

    void send_frame(const Frame& frame);
    // Returns nullopt on orderly peer shutdown before any header byte.
    std::optional<Frame> recv_frame();

private:
    void send_all(const uint8_t* data, size_t n);
    bool recv_all(uint8_t* data, size_t n, bool eof_ok_at_start);

    int fd_ = -1;
};

}  // namespace detail

// Protocol client implementing the session contract over a byte stream;
// substitutable for InprocessSession in the trainer.
class RemoteSession final : public SamplerSession {
public:
    // endpoint is "host:port".
    explicit RemoteSession(const std::string& endpoint);
    ~RemoteSession() override;

    void set_topology(const ChimeraDims& dims) override;
    void set_weights(const PbitNetwork& net) override;
    SampleBatch run(uint32_t n_samples, uint32_t sweeps_per_sample, uint32_t burn_in_sweeps,
                    uint64_t seed) override;
    void close() override;

private:
    Frame transact(Frame request);

    detail::TcpStream stream_;
    bool closed_ = false;
};

// Stream-socket server executing the in-process sampler behind the protocol.
// One session per connection; connections are served concurrently.
class LinkServer {
public:
    // Binds immediately; port 0 picks a free port (see port()).
    LinkServer(const std::string& host, uint16_t port, SamplerOptions opts = {});
    ~LinkServer();

    uint16_t port() const { return port_; }

    void start();  // serve in a background thread
    void run();    // serve on the calling thread until stop()
    void stop();

    uint64_t sessions_served() const { return sessions_served_.load(); }

private:
    void accept_loop();
    void serve_connection(int fd);
    void finish_connection(int fd);

    int listen_fd_ = -1;
    uint16_t port_ = 0;
    SamplerOptions opts_;
    std::atomic<bool> stopping_{false};
    std::atomic<uint64_t> sessions_served_{0};
    std::thread accept_thread_;
    std::mutex mutex_;
    std::vector<std::thread> workers_;
    std::vector<int> live_fds_;
};

std::pair<std::string, uint16_t> parse_endpoint(const std::string& endpoint);

}  // namespace pbitnqs
