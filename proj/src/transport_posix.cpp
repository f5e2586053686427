#include <fcntl.h>
#include <netdb.h>
#include <signal.h>
#include <sys/socket.h>
#include <sys/un.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>

#include "rankzip/error.hpp"
#include "rankzip/remote.hpp"

namespace rankzip {

namespace {

[[noreturn]] void unavailable(const std::string& what) {
    fail(ErrorCode::RemoteUnavailable, what + (errno ? std::string(": ") + std::strerror(errno) : ""));
}

void write_fd(int fd, std::span<const std::uint8_t> bytes, bool socket) {
    while (!bytes.empty()) {
        const ssize_t n = socket ? ::send(fd, bytes.data(), bytes.size(), MSG_NOSIGNAL)
                                 : ::write(fd, bytes.data(), bytes.size());
        if (n < 0 && errno == EINTR) continue;
        if (n <= 0) unavailable("write to probability server failed");
        bytes = bytes.subspan(static_cast<std::size_t>(n));
    }
}

void read_fd(int fd, std::span<std::uint8_t> bytes) {
    while (!bytes.empty()) {
        const ssize_t n = ::read(fd, bytes.data(), bytes.size());
        if (n < 0 && errno == EINTR) continue;
        if (n == 0) {
            errno = 0;
            unavailable("probability server closed the connection");
        }
        if (n < 0) unavailable("read from probability server failed");
        bytes = bytes.subspan(static_cast<std::size_t>(n));
    }
}

class SocketTransport final : public Transport {
public:
    explicit SocketTransport(int fd) : fd_(fd) {}
    ~SocketTransport() override { ::close(fd_); }
    SocketTransport(const SocketTransport&) = delete;
    SocketTransport& operator=(const SocketTransport&) = delete;

    void write_all(std::span<const std::uint8_t> bytes) override { write_fd(fd_, bytes, true); }
    void read_exact(std::span<std::uint8_t> bytes) override { read_fd(fd_, bytes); }

private:
    int fd_;
};

class ProcessTransport final : public Transport {
public:
    explicit ProcessTransport(const std::string& command) {
        ::signal(SIGPIPE, SIG_IGN);
        int to_child[2];
        int from_child[2];
        if (::pipe2(to_child, O_CLOEXEC) != 0) unavailable("pipe");
        if (::pipe2(from_child, O_CLOEXEC) != 0) {
            ::close(to_child[0]);
            ::close(to_child[1]);
            unavailable("pipe");
        }
        pid_ = ::fork();
        if (pid_ < 0) unavailable("fork");
        if (pid_ == 0) {
            ::dup2(to_child[0], STDIN_FILENO);
            ::dup2(from_child[1], STDOUT_FILENO);
            ::execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
            ::_exit(127);
        }
        ::close(to_child[0]);
        ::close(from_child[1]);
        in_ = to_child[1];
        out_ = from_child[0];
    }

    ~ProcessTransport() override {
        ::close(in_);
        ::close(out_);
        int status = 0;
        ::waitpid(pid_, &status, 0);
    }
    ProcessTransport(const ProcessTransport&) = delete;
    ProcessTransport& operator=(const ProcessTransport&) = delete;

    void write_all(std::span<const std::uint8_t> bytes) override { write_fd(in_, bytes, false); }
    void read_exact(std::span<std::uint8_t> bytes) override { read_fd(out_, bytes); }

private:
    pid_t pid_ = -1;
    int in_ = -1;
    int out_ = -1;
};

std::unique_ptr<Transport> connect_unix(const std::string& path) {
    sockaddr_un addr{};
    addr.sun_family = AF_UNIX;
    if (path.size() >= sizeof addr.sun_path) fail(ErrorCode::InvalidArgument, "socket path too long");
    std::memcpy(addr.sun_path, path.c_str(), path.size() + 1);
    const int fd = ::socket(AF_UNIX, SOCK_STREAM | SOCK_CLOEXEC, 0);
    if (fd < 0) unavailable("socket");
    if (::connect(fd, reinterpret_cast<const sockaddr*>(&addr), sizeof addr) != 0) {
        const int saved = errno;
        ::close(fd);
        errno = saved;
        unavailable("cannot connect to " + path);
    }
    return std::make_unique<SocketTransport>(fd);
}

std::unique_ptr<Transport> connect_tcp(const std::string& address) {
    const auto colon = address.rfind(':');
    if (colon == std::string::npos || colon == 0 || colon + 1 == address.size()) {
        fail(ErrorCode::InvalidArgument, "remote address must be HOST:PORT, unix:PATH or exec:COMMAND");
    }
    const std::string host = address.substr(0, colon);
    const std::string port = address.substr(colon + 1);
    addrinfo hints{};
    hints.ai_family = AF_UNSPEC;
    hints.ai_socktype = SOCK_STREAM;
    addrinfo* res = nullptr;
    if (const int rc = ::getaddrinfo(host.c_str(), port.c_str(), &hints, &res); rc != 0) {
        errno = 0;
        unavailable("cannot resolve " + address + ": " + ::gai_strerror(rc));
    }
    int fd = -1;
    for (addrinfo* ai = res; ai != nullptr; ai = ai->ai_next) {
        fd = ::socket(ai->ai_family, ai->ai_socktype | SOCK_CLOEXEC, ai->ai_protocol);
        if (fd < 0) continue;
        if (::connect(fd, ai->ai_addr, ai->ai_addrlen) == 0) break;
        ::close(fd);
        fd = -1;
    }
    ::freeaddrinfo(res);
    if (fd < 0) unavailable("cannot connect to " + address);
    return std::make_unique<SocketTransport>(fd);
}

}  // namespace

std::unique_ptr<Transport> open_transport(const std::string& address) {
    if (address.starts_with("unix:")) return connect_unix(address.substr(5));
    if (address.starts_with("exec:")) return std::make_unique<ProcessTransport>(address.substr(5));
    return connect_tcp(address);
}

}  // namespace rankzip
