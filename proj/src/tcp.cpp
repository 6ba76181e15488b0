#include "sipkit/transport.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstring>
#include <thread>

namespace sipkit {

namespace {

class TcpChannel : public Channel {
public:
    explicit TcpChannel(int fd) : fd_(fd) {
        int one = 1;
        ::setsockopt(fd_, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
    }
    ~TcpChannel() override { close(); }

    void send(const Frame& f) override {
        if (fd_ < 0) throw TransportError("socket closed");
        auto bytes = encode_frame(f);
        std::size_t done = 0;
        while (done < bytes.size()) {
            ssize_t n = ::send(fd_, bytes.data() + done, bytes.size() - done, MSG_NOSIGNAL);
            if (n < 0 && errno == EINTR) continue;
            if (n <= 0) throw TransportError(std::string("send failed: ") + std::strerror(errno));
            done += static_cast<std::size_t>(n);
        }
    }

    Frame recv() override {
        if (fd_ < 0) throw TransportError("socket closed");
        std::vector<std::uint8_t> buf(kFrameHeaderBytes);
        read_exact(buf.data(), kFrameHeaderBytes);
        const std::uint32_t len = static_cast<std::uint32_t>(buf[0]) | static_cast<std::uint32_t>(buf[1]) << 8 |
                                  static_cast<std::uint32_t>(buf[2]) << 16 | static_cast<std::uint32_t>(buf[3]) << 24;
        if (len > (1u << 30)) throw TransportError("oversized frame");
        buf.resize(kFrameHeaderBytes + len);
        read_exact(buf.data() + kFrameHeaderBytes, len);
        std::size_t off = 0;
        return decode_frame(buf, off);
    }

    void close() override {
        if (fd_ >= 0) {
            ::shutdown(fd_, SHUT_RDWR);
            ::close(fd_);
            fd_ = -1;
        }
    }

private:
    void read_exact(std::uint8_t* dst, std::size_t n) {
        std::size_t done = 0;
        while (done < n) {
            ssize_t r = ::recv(fd_, dst + done, n - done, 0);
            if (r < 0 && errno == EINTR) continue;
            if (r == 0) throw TransportError("connection closed by peer");
            if (r < 0) throw TransportError(std::string("recv failed: ") + std::strerror(errno));
            done += static_cast<std::size_t>(r);
        }
    }

    int fd_;
};

}  // namespace

TcpListener::TcpListener(std::uint16_t port, const std::string& bind_host) {
    fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
    if (fd_ < 0) throw TransportError("socket() failed");
    int one = 1;
    ::setsockopt(fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(port);
    if (::inet_pton(AF_INET, bind_host.c_str(), &addr.sin_addr) != 1) {
        ::close(fd_);
        throw TransportError("bad bind address " + bind_host);
    }
    if (::bind(fd_, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) < 0 || ::listen(fd_, 4) < 0) {
        int err = errno;
        ::close(fd_);
        throw TransportError(std::string("cannot listen: ") + std::strerror(err));
    }
    socklen_t len = sizeof(addr);
    ::getsockname(fd_, reinterpret_cast<sockaddr*>(&addr), &len);
    port_ = ntohs(addr.sin_port);
}

TcpListener::~TcpListener() {
    if (fd_ >= 0) ::close(fd_);
}

std::unique_ptr<Channel> TcpListener::accept() {
    for (;;) {
        int c = ::accept(fd_, nullptr, nullptr);
        if (c >= 0) return std::make_unique<TcpChannel>(c);
        if (errno != EINTR) throw TransportError(std::string("accept failed: ") + std::strerror(errno));
    }
}

std::unique_ptr<Channel> tcp_connect(const std::string& host, std::uint16_t port, int timeout_ms) {
    addrinfo hints{};
    hints.ai_family = AF_INET;
    hints.ai_socktype = SOCK_STREAM;
    addrinfo* res = nullptr;
    const std::string h = host.empty() ? "127.0.0.1" : host;
    if (::getaddrinfo(h.c_str(), std::to_string(port).c_str(), &hints, &res) != 0 || !res)
        throw TransportError("cannot resolve " + h);
    const auto deadline = std::chrono::steady_clock::now() + std::chrono::milliseconds(timeout_ms);
    for (;;) {
        int fd = ::socket(AF_INET, SOCK_STREAM, 0);
        if (fd >= 0 && ::connect(fd, res->ai_addr, res->ai_addrlen) == 0) {
            ::freeaddrinfo(res);
            return std::make_unique<TcpChannel>(fd);
        }
        if (fd >= 0) ::close(fd);
        if (std::chrono::steady_clock::now() >= deadline) {
            ::freeaddrinfo(res);
            throw TransportError("cannot connect to " + h + ":" + std::to_string(port));
        }
        std::this_thread::sleep_for(std::chrono::milliseconds(50));
    }
}

}  // namespace sipkit
