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

#include "pbitnqs/link.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>

#include "pbitnqs/errors.hpp"
#include "pbitnqs/wire.hpp"

namespace pbitnqs {

namespace {

constexpr size_t kFrameHeaderSize = 11;

void set_io_timeout(int fd, int seconds) {
    timeval tv{};
    tv.tv_sec = seconds;
    setsockopt(fd, SOL_SOCKET, SO_RCVTIMEO, &tv, sizeof(tv));
    setsockopt(fd, SOL_SOCKET, SO_SNDTIMEO, &tv, sizeof(tv));
}

[[noreturn]] void throw_errno(const std::string& what) {
    throw ProtocolError(kErrInternal, what + ": " + std::strerror(errno));
}

}  // namespace

namespace detail {

TcpStream::TcpStream(TcpStream&& other) noexcept : fd_(other.fd_) { other.fd_ = -1; }

TcpStream& TcpStream::operator=(TcpStream&& other) noexcept {
    if (this != &other) {
        shutdown_and_close();
        fd_ = other.fd_;
        other.fd_ = -1;
    }
    return *this;
}

TcpStream::~TcpStream() { shutdown_and_close(); }

void TcpStream::shutdown_and_close() {
    if (fd_ >= 0) {
        ::shutdown(fd_, SHUT_RDWR);
        ::close(fd_);
        fd_ = -1;
    }
}

TcpStream TcpStream::connect(const std::string& host, uint16_t port) {
    addrinfo hints{};
    hints.ai_family = AF_UNSPEC;
    hints.ai_socktype = SOCK_STREAM;
    addrinfo* result = nullptr;
    const int rc = ::getaddrinfo(host.c_str(), std::to_string(port).c_str(), &hints, &result);
    if (rc != 0)
        throw ProtocolError(kErrInternal,
                            "cannot resolve " + host + ": " + ::gai_strerror(rc));
    int fd = -1;
    for (addrinfo* ai = result; ai != nullptr; ai = ai->ai_next) {
        fd = ::socket(ai->ai_family, ai->ai_socktype, ai->ai_protocol);
        if (fd < 0) continue;
        if (::connect(fd, ai->ai_addr, ai->ai_addrlen) == 0) break;
        ::close(fd);
        fd = -1;
    }
    ::freeaddrinfo(result);
    if (fd < 0) throw ProtocolError(kErrInternal, "cannot connect to " + host + ":" +
                                                      std::to_string(port));
    set_io_timeout(fd, 120);
    return TcpStream(fd);
}

void TcpStream::send_all(const uint8_t* data, size_t n) {
    size_t sent = 0;
    while (sent < n) {
        const ssize_t rc = ::send(fd_, data + sent, n - sent, MSG_NOSIGNAL);
        if (rc <= 0) {
            if (rc < 0 && errno == EINTR) continue;
            throw ProtocolError(kErrInternal, "transport send failed");
        }
        sent += static_cast<size_t>(rc);
    }
}

bool TcpStream::recv_all(uint8_t* data, size_t n, bool eof_ok_at_start) {
    size_t got = 0;
    while (got < n) {
        const ssize_t rc = ::recv(fd_, data + got, n - got, 0);
        if (rc == 0) {
            if (got == 0 && eof_ok_at_start) return false;
            throw ProtocolError(kErrMalformed, "connection closed mid-frame");
        }
        if (rc < 0) {
            if (errno == EINTR) continue;
            throw ProtocolError(kErrInternal, "transport receive failed");
        }
        got += static_cast<size_t>(rc);
    }
    return true;
}

void TcpStream::send_frame(const Frame& frame) {
    const std::vector<uint8_t> bytes = encode_frame(frame);
    send_all(bytes.data(), bytes.size());
}

std::optional<Frame> TcpStream::recv_frame() {
    std::vector<uint8_t> bytes(kFrameHeaderSize);
    if (!recv_all(bytes.data(), kFrameHeaderSize, true)) return std::nullopt;
    // Payload length sits in the last 4 header bytes.
    const uint32_t len = static_cast<uint32_t>(bytes[7]) | static_cast<uint32_t>(bytes[8]) << 8 |
                         static_cast<uint32_t>(bytes[9]) << 16 |
                         static_cast<uint32_t>(bytes[10]) << 24;
    if (len > (1u << 28)) throw ProtocolError(kErrMalformed, "payload length out of bounds");
    bytes.resize(kFrameHeaderSize + len);
    recv_all(bytes.data() + kFrameHeaderSize, len, false);
    return decode_frame(bytes);
}

}  // namespace detail

// InprocessSession -----------------------------------------------------------

void InprocessSession::set_topology(const ChimeraDims& dims) {
    if (closed_) throw ProtocolError(kErrOrdering, "session is closed");
    if (dims.rows == 0 || dims.cols == 0 || dims.shore == 0)
        throw ConfigError("set_topology: zero dimension");
    topology_ = dims;
}

void InprocessSession::set_weights(const PbitNetwork& net) {
    if (closed_) throw ProtocolError(kErrOrdering, "session is closed");
    if (topology_ && net.size() > 2 * topology_->rows * topology_->cols * topology_->shore)
        throw ConfigError("set_weights: network larger than the announced topology");
    net_ = net;
    net_->set_activation(opts_.activation);
}

SampleBatch InprocessSession::run(uint32_t n_samples, uint32_t sweeps_per_sample,
                                  uint32_t burn_in_sweeps, uint64_t seed) {
    if (closed_) throw ProtocolError(kErrOrdering, "session is closed");
    if (!net_) throw ProtocolError(kErrOrdering, "run before set_weights");
    return net_->sample(n_samples, sweeps_per_sample, burn_in_sweeps, seed, opts_.update_order,
                        opts_.parallel_sweeps);
}

void InprocessSession::close() { closed_ = true; }

// RemoteSession ---------------------------------------------------------------

std::pair<std::string, uint16_t> parse_endpoint(const std::string& endpoint) {
    const size_t colon = endpoint.rfind(':');
    if (colon == std::string::npos || colon == 0 || colon + 1 == endpoint.size())
        throw ConfigError("endpoint must be host:port, got '" + endpoint + "'");
    const std::string host = endpoint.substr(0, colon);
    int port = 0;
    try {
        port = std::stoi(endpoint.substr(colon + 1));
    } catch (const std::exception&) {
        port = -1;
    }
    if (port <= 0 || port > 65535)
        throw ConfigError("endpoint has invalid port: '" + endpoint + "'");
    return {host, static_cast<uint16_t>(port)};
}

RemoteSession::RemoteSession(const std::string& endpoint) {
    const auto [host, port] = parse_endpoint(endpoint);
    stream_ = detail::TcpStream::connect(host, port);
    Frame hello;
    hello.type = MsgType::Hello;
    hello.payload = encode_hello();
    const Frame reply = transact(std::move(hello));
    if (reply.type != MsgType::Hello || decode_hello(reply.payload) != kWireVersion)
        throw ProtocolError(kErrUnsupported, "server did not acknowledge protocol version 1");
}

RemoteSession::~RemoteSession() {
    try {
        close();
    } catch (...) {
        // Destructor must not throw; the stream closes below regardless.
    }
}

Frame RemoteSession::transact(Frame request) {
    if (closed_ || !stream_.valid())
        throw ProtocolError(kErrOrdering, "session is closed");
    stream_.send_frame(request);
    std::optional<Frame> reply = stream_.recv_frame();
    if (!reply) throw ProtocolError(kErrInternal, "server closed the connection");
    if (reply->type == MsgType::Error) {
        const WireError err = decode_error(reply->payload);
        throw ProtocolError(err.code, "server error: " + err.message);
    }
    return std::move(*reply);
}

void RemoteSession::set_topology(const ChimeraDims& dims) {
    Frame f;
    f.type = MsgType::SetTopology;
    f.payload = encode_topology(dims);
    const Frame reply = transact(std::move(f));
    if (reply.type != MsgType::SetTopology)
        throw ProtocolError(kErrMalformed, "unexpected reply to SET_TOPOLOGY");
}

void RemoteSession::set_weights(const PbitNetwork& net) {
    Frame f;
    f.type = MsgType::SetWeights;
    f.payload = encode_weights(net);
    const Frame reply = transact(std::move(f));
    if (reply.type != MsgType::SetWeights)
        throw ProtocolError(kErrMalformed, "unexpected reply to SET_WEIGHTS");
}

SampleBatch RemoteSession::run(uint32_t n_samples, uint32_t sweeps_per_sample,
                               uint32_t burn_in_sweeps, uint64_t seed) {
    Frame f;
    f.type = MsgType::Run;
    f.payload = encode_run({n_samples, sweeps_per_sample, burn_in_sweeps, seed});
    const Frame reply = transact(std::move(f));
    if (reply.type != MsgType::Samples)
        throw ProtocolError(kErrMalformed, "unexpected reply to RUN");
    SampleBatch batch = decode_samples(reply.payload);
    // The wire does not carry sampling metadata; the requester knows it.
    batch.seed = seed;
    batch.sweeps_per_sample = sweeps_per_sample;
    batch.burn_in_sweeps = burn_in_sweeps;
    return batch;
}

void RemoteSession::close() {
    if (closed_) return;
    closed_ = true;
    if (!stream_.valid()) return;
    try {
        Frame bye;
        bye.type = MsgType::Bye;
        stream_.send_frame(bye);
        stream_.recv_frame();
    } catch (const ProtocolError&) {
        // Best effort; the connection is going away either way.
    }
    stream_.shutdown_and_close();
}

// LinkServer ------------------------------------------------------------------

LinkServer::LinkServer(const std::string& host, uint16_t port, SamplerOptions opts)
    : opts_(opts) {
    listen_fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
    if (listen_fd_ < 0) throw_errno("socket");
    const int one = 1;
    setsockopt(listen_fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));

    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(port);
    if (host.empty() || host == "0.0.0.0") {
        addr.sin_addr.s_addr = htonl(INADDR_ANY);
    } else if (::inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1) {
        ::close(listen_fd_);
        throw ConfigError("LinkServer: bad listen address '" + host + "'");
    }
    if (::bind(listen_fd_, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0) {
        const int err = errno;
        ::close(listen_fd_);
        throw ProtocolError(kErrInternal,
                            "cannot bind " + host + ":" + std::to_string(port) + ": " +
                                std::strerror(err));
    }
    if (::listen(listen_fd_, 16) != 0) {
        ::close(listen_fd_);
        throw_errno("listen");
    }
    socklen_t len = sizeof(addr);
    ::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&addr), &len);
    port_ = ntohs(addr.sin_port);
}

LinkServer::~LinkServer() { stop(); }

void LinkServer::start() {
    accept_thread_ = std::thread([this] { accept_loop(); });
}

void LinkServer::run() { accept_loop(); }

void LinkServer::stop() {
    if (stopping_.exchange(true)) {
        if (accept_thread_.joinable()) accept_thread_.join();
        return;
    }
    if (listen_fd_ >= 0) {
        ::shutdown(listen_fd_, SHUT_RDWR);
        ::close(listen_fd_);
        listen_fd_ = -1;
    }
    {
        std::lock_guard<std::mutex> lock(mutex_);
        for (int fd : live_fds_) ::shutdown(fd, SHUT_RDWR);
    }
    if (accept_thread_.joinable()) accept_thread_.join();
    std::vector<std::thread> workers;
    {
        std::lock_guard<std::mutex> lock(mutex_);
        workers.swap(workers_);
    }
    for (auto& w : workers)
        if (w.joinable()) w.join();
}

void LinkServer::finish_connection(int fd) {
    std::lock_guard<std::mutex> lock(mutex_);
    for (auto it = live_fds_.begin(); it != live_fds_.end(); ++it)
        if (*it == fd) {
            live_fds_.erase(it);
            break;
        }
}

void LinkServer::accept_loop() {
    while (!stopping_.load()) {
        const int fd = ::accept(listen_fd_, nullptr, nullptr);
        if (fd < 0) {
            if (stopping_.load()) break;
            if (errno == EINTR) continue;
            break;
        }
        set_io_timeout(fd, 120);
        std::lock_guard<std::mutex> lock(mutex_);
        live_fds_.push_back(fd);
        workers_.emplace_back([this, fd] { serve_connection(fd); });
    }
}

void LinkServer::serve_connection(int fd) {
    detail::TcpStream stream(fd);
    InprocessSession sampler(opts_);
    bool hello_done = false;
    bool have_weights = false;
    ++sessions_served_;

    auto send_error = [&](uint16_t code, const std::string& message) {
        Frame err;
        err.type = MsgType::Error;
        err.payload = encode_error({code, message});
        stream.send_frame(err);
    };

    try {
        for (;;) {
            std::optional<Frame> frame;
            try {
                frame = stream.recv_frame();
            } catch (const ProtocolError& e) {
                // Bad magic or a truncated frame: the byte stream cannot be
                // trusted any further, so answer and drop the connection.
                try {
                    send_error(kErrMalformed, e.what());
                } catch (const ProtocolError&) {
                }
                break;
            }
            if (!frame) break;  // peer hung up

            if (frame->version != kWireVersion) {
                send_error(kErrUnsupported,
                           "unsupported protocol version " + std::to_string(frame->version));
                continue;
            }

            try {
                switch (frame->type) {
                    case MsgType::Hello: {
                        decode_hello(frame->payload);
                        hello_done = true;
                        Frame reply;
                        reply.type = MsgType::Hello;
                        reply.payload = encode_hello();
                        stream.send_frame(reply);
                        break;
                    }
                    case MsgType::SetTopology: {
                        if (!hello_done) {
                            send_error(kErrOrdering, "SET_TOPOLOGY before HELLO");
                            break;
                        }
                        sampler.set_topology(decode_topology(frame->payload));
                        Frame reply;
                        reply.type = MsgType::SetTopology;
                        stream.send_frame(reply);
                        break;
                    }
                    case MsgType::SetWeights: {
                        if (!hello_done) {
                            send_error(kErrOrdering, "SET_WEIGHTS before HELLO");
                            break;
                        }
                        sampler.set_weights(decode_weights(frame->payload));
                        have_weights = true;
                        Frame reply;
                        reply.type = MsgType::SetWeights;
                        stream.send_frame(reply);
                        break;
                    }
                    case MsgType::Run: {
                        if (!hello_done || !have_weights) {
                            send_error(kErrOrdering, "RUN before SET_WEIGHTS");
                            break;
                        }
                        const RunRequest req = decode_run(frame->payload);
                        const SampleBatch batch =
                            sampler.run(req.n_samples, req.sweeps_per_sample,
                                        req.burn_in_sweeps, req.seed);
                        Frame reply;
                        reply.type = MsgType::Samples;
                        reply.payload = encode_samples(batch);
                        stream.send_frame(reply);
                        break;
                    }
                    case MsgType::Bye: {
                        Frame reply;
                        reply.type = MsgType::Bye;
                        stream.send_frame(reply);
                        return finish_connection(fd);
                    }
                    default:
                        send_error(kErrUnsupported,
                                   "unknown message type " +
                                       std::to_string(static_cast<int>(frame->type)));
                        break;
                }
            } catch (const ProtocolError& e) {
                send_error(e.code() == 0 ? kErrInternal : e.code(), e.what());
            } catch (const Error& e) {
                send_error(kErrMismatch, e.what());
            } catch (const std::exception& e) {
                send_error(kErrInternal, e.what());
            }
        }
    } catch (const ProtocolError&) {
        // Transport failure; nothing more to say to this peer.
    }
    finish_connection(fd);
}

}  // namespace pbitnqs
