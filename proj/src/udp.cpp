#include "wildnet/udp.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <charconv>
#include <cstring>

#include "wildnet/error.hpp"

namespace wildnet {

Endpoint Endpoint::parse(std::string_view text) {
  const auto colon = text.rfind(':');
  if (colon == std::string_view::npos || colon == 0 || colon + 1 == text.size())
    throw ConfigError("endpoint must be host:port, got '" + std::string(text) + "'");
  const std::string_view host = text.substr(0, colon);
  const std::string_view port_text = text.substr(colon + 1);
  unsigned port = 0;
  const auto [ptr, ec] = std::from_chars(port_text.data(), port_text.data() + port_text.size(), port);
  if (ec != std::errc{} || ptr != port_text.data() + port_text.size() || port == 0 || port > 65535)
    throw ConfigError("invalid port in endpoint '" + std::string(text) + "'");
  return Endpoint{std::string(host), static_cast<std::uint16_t>(port)};
}

UdpSender::UdpSender(const Endpoint& endpoint) : endpoint_(endpoint) {
  addrinfo hints{};
  hints.ai_family = AF_UNSPEC;
  hints.ai_socktype = SOCK_DGRAM;
  addrinfo* result = nullptr;
  const std::string port_str = std::to_string(endpoint.port);
  const int rc = ::getaddrinfo(endpoint.host.c_str(), port_str.c_str(), &hints, &result);
  if (rc != 0)
    throw TransportError("cannot resolve " + endpoint.to_string() + ": " + gai_strerror(rc));

  fd_ = ::socket(result->ai_family, SOCK_DGRAM, 0);
  if (fd_ < 0) {
    const int err = errno;
    ::freeaddrinfo(result);
    throw TransportError("socket() failed for " + endpoint.to_string() + ": " +
                         std::strerror(err));
  }
  addr_.assign(reinterpret_cast<const std::uint8_t*>(result->ai_addr),
               reinterpret_cast<const std::uint8_t*>(result->ai_addr) + result->ai_addrlen);
  ::freeaddrinfo(result);
}

UdpSender::~UdpSender() {
  if (fd_ >= 0) ::close(fd_);
}

UdpSender::UdpSender(UdpSender&& other) noexcept
    : endpoint_(std::move(other.endpoint_)), fd_(other.fd_), addr_(std::move(other.addr_)) {
  other.fd_ = -1;
}

UdpSender& UdpSender::operator=(UdpSender&& other) noexcept {
  if (this != &other) {
    if (fd_ >= 0) ::close(fd_);
    endpoint_ = std::move(other.endpoint_);
    fd_ = other.fd_;
    addr_ = std::move(other.addr_);
    other.fd_ = -1;
  }
  return *this;
}

std::size_t UdpSender::send(std::span<const std::uint8_t> payload) {
  if (payload.size() > kMaxDatagramBytes)
    throw TransportError("payload of " + std::to_string(payload.size()) +
                         " bytes exceeds the " + std::to_string(kMaxDatagramBytes) +
                         "-byte datagram limit for " + endpoint_.to_string());
  const ssize_t written =
      ::sendto(fd_, payload.data(), payload.size(), 0,
               reinterpret_cast<const sockaddr*>(addr_.data()),
               static_cast<socklen_t>(addr_.size()));
  if (written < 0)
    throw TransportError("sendto " + endpoint_.to_string() + " failed: " +
                         std::strerror(errno));
  return static_cast<std::size_t>(written);
}

std::size_t udp_send(std::span<const std::uint8_t> payload, const Endpoint& endpoint) {
  UdpSender sender(endpoint);
  return sender.send(payload);
}

UdpReceiver::UdpReceiver(std::uint16_t port, const std::string& bind_host) {
  fd_ = ::socket(AF_INET, SOCK_DGRAM, 0);
  if (fd_ < 0)
    throw TransportError(std::string("socket() failed: ") + std::strerror(errno));
  const int one = 1;
  ::setsockopt(fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));

  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(port);
  if (::inet_pton(AF_INET, bind_host.c_str(), &addr.sin_addr) != 1) {
    ::close(fd_);
    throw TransportError("invalid bind address '" + bind_host + "'");
  }
  if (::bind(fd_, reinterpret_cast<const sockaddr*>(&addr), sizeof(addr)) != 0) {
    const int err = errno;
    ::close(fd_);
    throw TransportError("cannot bind udp " + bind_host + ":" + std::to_string(port) + ": " +
                         std::strerror(err));
  }
  sockaddr_in bound{};
  socklen_t len = sizeof(bound);
  ::getsockname(fd_, reinterpret_cast<sockaddr*>(&bound), &len);
  port_ = ntohs(bound.sin_port);
}

UdpReceiver::~UdpReceiver() {
  if (fd_ >= 0) ::close(fd_);
}

std::optional<UdpReceiver::Datagram> UdpReceiver::recv(int timeout_ms) {
  pollfd pfd{fd_, POLLIN, 0};
  const int rc = ::poll(&pfd, 1, timeout_ms);
  if (rc <= 0) return std::nullopt;

  std::vector<std::uint8_t> buf(kMaxDatagramBytes);
  sockaddr_in from{};
  socklen_t from_len = sizeof(from);
  const ssize_t n = ::recvfrom(fd_, buf.data(), buf.size(), 0,
                               reinterpret_cast<sockaddr*>(&from), &from_len);
  if (n < 0)
    throw TransportError(std::string("recvfrom failed: ") + std::strerror(errno));
  buf.resize(static_cast<std::size_t>(n));

  char ip[INET_ADDRSTRLEN] = {};
  ::inet_ntop(AF_INET, &from.sin_addr, ip, sizeof(ip));
  return Datagram{std::move(buf), std::string(ip) + ":" + std::to_string(ntohs(from.sin_port))};
}

}  // namespace wildnet
