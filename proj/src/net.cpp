#include "bsfscale/net.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <thread>
#include <utility>

namespace bsf::net {

namespace {

[[noreturn]] void fail(const std::string& what) {
    throw TransportError(what + ": " + std::strerror(errno));
}

int remaining_ms(Deadline deadline) {
    const auto now = std::chrono::steady_clock::now();
    if (deadline <= now) return 0;
    const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - now);
    return static_cast<int>(std::min<std::chrono::milliseconds::rep>(ms.count() + 1, 60'000));
}

void wait_fd(int fd, short events, Deadline deadline, const char* what) {
    pollfd pfd{fd, events, 0};
    for (;;) {
        const int ms = remaining_ms(deadline);
        if (ms == 0) throw TransportError(std::string(what) + ": timed out");
        const int rc = ::poll(&pfd, 1, ms);
        if (rc > 0) return;
        if (rc == 0) continue;  // re-check the deadline
        if (errno == EINTR) continue;
        fail(what);
    }
}

sockaddr_in make_address(const std::string& host, std::uint16_t port) {
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(port);
    if (::inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1) {
        throw TransportError("invalid IPv4 address: " + host);
    }
    return addr;
}

void set_nodelay(int fd) {
    const int one = 1;
    ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
}

}  // namespace

Deadline deadline_after(double seconds) {
    return std::chrono::steady_clock::now() +
           std::chrono::duration_cast<std::chrono::steady_clock::duration>(
               std::chrono::duration<double>(seconds));
}

Socket::Socket(Socket&& other) noexcept : fd_(std::exchange(other.fd_, -1)) {}

Socket& Socket::operator=(Socket&& other) noexcept {
    if (this != &other) {
        close();
        fd_ = std::exchange(other.fd_, -1);
    }
    return *this;
}

Socket::~Socket() { close(); }

void Socket::close() {
    if (fd_ >= 0) {
        ::close(fd_);
        fd_ = -1;
    }
}

void Socket::send_all(const void* data, std::size_t size) {
    const auto* bytes = static_cast<const std::uint8_t*>(data);
    std::size_t sent = 0;
    while (sent < size) {
        const ssize_t rc = ::send(fd_, bytes + sent, size - sent, MSG_NOSIGNAL);
        if (rc < 0) {
            if (errno == EINTR) continue;
            fail("send");
        }
        sent += static_cast<std::size_t>(rc);
    }
}

void Socket::recv_all(void* data, std::size_t size, Deadline deadline) {
    auto* bytes = static_cast<std::uint8_t*>(data);
    std::size_t received = 0;
    while (received < size) {
        wait_fd(fd_, POLLIN, deadline, "recv");
        const ssize_t rc = ::recv(fd_, bytes + received, size - received, 0);
        if (rc == 0) throw TransportError("recv: connection closed by peer");
        if (rc < 0) {
            if (errno == EINTR) continue;
            fail("recv");
        }
        received += static_cast<std::size_t>(rc);
    }
}

bool Socket::wait_readable(Deadline deadline) {
    pollfd pfd{fd_, POLLIN, 0};
    const int rc = ::poll(&pfd, 1, remaining_ms(deadline));
    return rc > 0 && (pfd.revents & (POLLIN | POLLHUP | POLLERR)) != 0;
}

Listener Listener::open(const std::string& host, std::uint16_t port) {
    const int fd = ::socket(AF_INET, SOCK_STREAM, 0);
    if (fd < 0) fail("socket");
    const int one = 1;
    ::setsockopt(fd, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
    sockaddr_in addr = make_address(host, port);
    if (::bind(fd, reinterpret_cast<const sockaddr*>(&addr), sizeof(addr)) != 0) {
        ::close(fd);
        fail("bind");
    }
    if (::listen(fd, 64) != 0) {
        ::close(fd);
        fail("listen");
    }
    sockaddr_in bound{};
    socklen_t len = sizeof(bound);
    if (::getsockname(fd, reinterpret_cast<sockaddr*>(&bound), &len) != 0) {
        ::close(fd);
        fail("getsockname");
    }
    return Listener(fd, ntohs(bound.sin_port));
}

Listener::Listener(Listener&& other) noexcept
    : fd_(std::exchange(other.fd_, -1)), port_(other.port_) {}

Listener& Listener::operator=(Listener&& other) noexcept {
    if (this != &other) {
        if (fd_ >= 0) ::close(fd_);
        fd_ = std::exchange(other.fd_, -1);
        port_ = other.port_;
    }
    return *this;
}

Listener::~Listener() {
    if (fd_ >= 0) ::close(fd_);
}

Socket Listener::accept(Deadline deadline) {
    wait_fd(fd_, POLLIN, deadline, "accept");
    const int fd = ::accept(fd_, nullptr, nullptr);
    if (fd < 0) fail("accept");
    set_nodelay(fd);
    return Socket(fd);
}

Socket connect(const std::string& host, std::uint16_t port, Deadline deadline) {
    const sockaddr_in addr = make_address(host, port);
    for (;;) {
        const int fd = ::socket(AF_INET, SOCK_STREAM, 0);
        if (fd < 0) fail("socket");
        if (::connect(fd, reinterpret_cast<const sockaddr*>(&addr), sizeof(addr)) == 0) {
            set_nodelay(fd);
            return Socket(fd);
        }
        ::close(fd);
        if (std::chrono::steady_clock::now() >= deadline) {
            throw TransportError("connect: timed out");
        }
        std::this_thread::sleep_for(std::chrono::milliseconds(5));
    }
}

void wait_any_readable(std::span<const Socket> sockets, Deadline deadline) {
    std::vector<pollfd> fds;
    fds.reserve(sockets.size());
    for (const Socket& socket : sockets) {
        fds.push_back({socket.fd(), POLLIN, 0});
    }
    for (;;) {
        const int ms = remaining_ms(deadline);
        if (ms == 0) throw TransportError("poll: timed out");
        const int rc = ::poll(fds.data(), static_cast<nfds_t>(fds.size()), ms);
        if (rc > 0) return;
        if (rc == 0) continue;
        if (errno == EINTR) continue;
        fail("poll");
    }
}

void send_frame(Socket& socket, wire::Tag tag, std::span<const std::uint8_t> payload) {
    const std::vector<std::uint8_t> frame = wire::encode_frame(tag, payload);
    socket.send_all(frame.data(), frame.size());
}

wire::Frame recv_frame(Socket& socket, Deadline deadline) {
    std::uint8_t header[5];
    socket.recv_all(header, sizeof(header), deadline);
    std::size_t offset = 0;
    const std::uint32_t length = wire::read_u32(std::span(header, 4), offset);
    wire::Frame frame;
    frame.tag = static_cast<wire::Tag>(header[4]);
    frame.payload.resize(length);
    if (length > 0) {
        socket.recv_all(frame.payload.data(), length, deadline);
    }
    return frame;
}

}  // namespace bsf::net
