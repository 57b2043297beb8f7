#pragma once

#include <chrono>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "bsfscale/wire.hpp"

namespace bsf::net {

/// Connection failures, timeouts, and unexpected peer shutdowns.
class TransportError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

using Deadline = std::chrono::steady_clock::time_point;

Deadline deadline_after(double seconds);

/// RAII wrapper around a connected TCP stream socket.
class Socket {
public:
    Socket() = default;
    explicit Socket(int fd) : fd_(fd) {}
    Socket(Socket&& other) noexcept;
    Socket& operator=(Socket&& other) noexcept;
    Socket(const Socket&) = delete;
    Socket& operator=(const Socket&) = delete;
    ~Socket();

    bool valid() const { return fd_ >= 0; }
    int fd() const { return fd_; }
    void close();

    // Blocking full-length transfers; TransportError on EOF, error, or when
    // the deadline passes before completion.
    void send_all(const void* data, std::size_t size);
    void recv_all(void* data, std::size_t size, Deadline deadline);

    /// True when at least one byte is readable before the deadline.
    bool wait_readable(Deadline deadline);

private:
    int fd_ = -1;
};

class Listener {
public:
    /// Binds and listens on the given address; port 0 picks an ephemeral port.
    static Listener open(const std::string& host, std::uint16_t port);

    Listener(Listener&&) noexcept;
    Listener& operator=(Listener&&) noexcept;
    Listener(const Listener&) = delete;
    Listener& operator=(const Listener&) = delete;
    ~Listener();

    std::uint16_t port() const { return port_; }
    Socket accept(Deadline deadline);

private:
    Listener(int fd, std::uint16_t port) : fd_(fd), port_(port) {}
    int fd_ = -1;
    std::uint16_t port_ = 0;
};

/// Connects to host:port, retrying until the deadline (covers the window
/// where a worker starts before the master listens, and vice versa).
Socket connect(const std::string& host, std::uint16_t port, Deadline deadline);

/// Blocks until at least one of the sockets has readable data (or hung up);
/// TransportError on timeout.
void wait_any_readable(std::span<const Socket> sockets, Deadline deadline);

void send_frame(Socket& socket, wire::Tag tag, std::span<const std::uint8_t> payload);
wire::Frame recv_frame(Socket& socket, Deadline deadline);

}  // namespace bsf::net
