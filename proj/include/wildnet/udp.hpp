#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace wildnet {

inline constexpr std::uint16_t kDefaultObuPort = 4750;
inline constexpr std::size_t kMaxDatagramBytes = 65507;

struct Endpoint {
  std::string host = "127.0.0.1";
  std::uint16_t port = kDefaultObuPort;

  // Accepts "host:port"; throws ConfigError on anything else.
  static Endpoint parse(std::string_view text);
  std::string to_string() const { return host + ":" + std::to_string(port); }

  bool operator==(const Endpoint&) const = default;
};

// Fire-and-forget datagram sender to a fixed endpoint. Resolution and
// socket errors throw TransportError carrying the endpoint.
class UdpSender {
 public:
  explicit UdpSender(const Endpoint& endpoint);
  ~UdpSender();
  UdpSender(UdpSender&& other) noexcept;
  UdpSender& operator=(UdpSender&& other) noexcept;
  UdpSender(const UdpSender&) = delete;
  UdpSender& operator=(const UdpSender&) = delete;

  // Returns bytes written (always the full payload). Oversized payloads
  // are rejected before hitting the socket.
  std::size_t send(std::span<const std::uint8_t> payload);

  const Endpoint& endpoint() const { return endpoint_; }

 private:
  Endpoint endpoint_;
  int fd_ = -1;
  std::vector<std::uint8_t> addr_;  // sockaddr storage
};

// One-shot convenience wrapper.
std::size_t udp_send(std::span<const std::uint8_t> payload, const Endpoint& endpoint);

class UdpReceiver {
 public:
  struct Datagram {
    std::vector<std::uint8_t> payload;
    std::string from;
  };

  // Binds the port on bind_host; port 0 picks an ephemeral port (see
  // port() for the actual one). Throws TransportError on bind failure.
  explicit UdpReceiver(std::uint16_t port, const std::string& bind_host = "0.0.0.0");
  ~UdpReceiver();
  UdpReceiver(const UdpReceiver&) = delete;
  UdpReceiver& operator=(const UdpReceiver&) = delete;

  // Blocks up to timeout_ms; nullopt on timeout.
  std::optional<Datagram> recv(int timeout_ms);

  std::uint16_t port() const { return port_; }

 private:
  int fd_ = -1;
  std::uint16_t port_ = 0;
};

}  // namespace wildnet
