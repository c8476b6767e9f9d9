#pragma once

// KEX-I between two processes. Every message is one frame: a 4-byte
// big-endian payload length followed by a compact UTF-8 JSON object with
// "v":1. Session flow (server = Alice, client = Bob):
//
//   C -> S  hello{params}           S -> C  hello{params}
//   S -> C  element{public, g}      S -> C  element{alice, phi_A(g)}
//   C -> S  element{bob, phi_B(g)}
//   S -> C  confirm{digest}         C -> S  confirm{digest}

#include <chrono>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "pgkex/group.hpp"
#include "pgkex/protocols.hpp"

namespace pgkex::wire {

inline constexpr std::uint32_t kMaxPayload = 1U << 20;
inline constexpr int kVersion = 1;

struct Hello {
  std::uint64_t p = 0;
  unsigned m = 0;
  unsigned n = 0;

  static Hello of(const GroupParams& params) { return {params.p(), params.m(), params.n()}; }
  friend bool operator==(const Hello&, const Hello&) = default;
};

struct ElementMsg {
  std::string role;  // "public", "alice" or "bob"
  std::vector<std::uint64_t> exps;

  /// Range-checked conversion. Throws RangeViolation.
  Element to_element(const GroupParams& params) const;
  static ElementMsg of(std::string role, const Element& g);
  friend bool operator==(const ElementMsg&, const ElementMsg&) = default;
};

struct Confirm {
  std::string digest;
  friend bool operator==(const Confirm&, const Confirm&) = default;
};

using Message = std::variant<Hello, ElementMsg, Confirm>;
using Bytes = std::vector<std::uint8_t>;

std::string payload(const Message& msg);
/// Throws BadJson or BadVersion.
Message parse_payload(std::string_view text);

/// Length prefix + payload. Throws FrameTooLarge.
Bytes encode(const Message& msg);
/// Exactly one frame. Throws Truncated, FrameTooLarge, BadJson, BadVersion.
Message decode(std::span<const std::uint8_t> frame);

std::uint64_t fnv1a64(std::string_view data);
/// Lower-case hex FNV-1a-64 of the key's canonical text.
std::string key_digest(const Element& key);

class Stream {
 public:
  virtual ~Stream() = default;
  virtual void write_all(std::span<const std::uint8_t> data) = 0;
  /// Throws Truncated on EOF, Timeout, IoError.
  virtual void read_exact(std::span<std::uint8_t> out) = 0;
};

/// Owning socket stream with a receive timeout.
class FdStream final : public Stream {
 public:
  explicit FdStream(int fd, std::chrono::milliseconds timeout = std::chrono::seconds(10));
  FdStream(FdStream&& other) noexcept;
  FdStream& operator=(FdStream&& other) noexcept;
  FdStream(const FdStream&) = delete;
  FdStream& operator=(const FdStream&) = delete;
  ~FdStream() override;

  void write_all(std::span<const std::uint8_t> data) override;
  void read_exact(std::span<std::uint8_t> out) override;

 private:
  int fd_ = -1;
};

/// Connected pair of local sockets, for tests.
std::pair<FdStream, FdStream> stream_pair();

/// Passes bytes through `inner`, letting `mutate` rewrite each outgoing frame.
class TamperStream final : public Stream {
 public:
  using Mutator = std::function<void(std::size_t frame_index, Bytes& frame)>;
  TamperStream(Stream& inner, Mutator mutate) : inner_(inner), mutate_(std::move(mutate)) {}

  void write_all(std::span<const std::uint8_t> data) override;
  void read_exact(std::span<std::uint8_t> out) override { inner_.read_exact(out); }

 private:
  Stream& inner_;
  Mutator mutate_;
  std::size_t frames_ = 0;
};

class TcpListener {
 public:
  /// Binds host:port (port 0 picks a free one) and listens.
  TcpListener(const std::string& host, std::uint16_t port);
  TcpListener(TcpListener&&) noexcept;
  TcpListener(const TcpListener&) = delete;
  ~TcpListener();

  std::uint16_t port() const noexcept { return port_; }
  /// Throws Timeout or IoError.
  FdStream accept(std::chrono::milliseconds timeout = std::chrono::seconds(10));

 private:
  int fd_ = -1;
  std::uint16_t port_ = 0;
};

FdStream connect_tcp(const std::string& host, std::uint16_t port,
                     std::chrono::milliseconds timeout = std::chrono::seconds(10));

void send(Stream& s, const Message& msg, std::vector<Bytes>* log = nullptr);
Message receive(Stream& s, std::vector<Bytes>* log = nullptr);

struct Session {
  Element key;
  std::string digest;
  /// The public part of the exchange as seen on the wire.
  Transcript1 transcript;
  /// Every frame in the order it was sent or received.
  std::vector<Bytes> frames;
};

/// Alice's side. Throws ParamMismatch, DigestMismatch, Timeout and any
/// framing error.
Session run_kex1_server(Stream& s, const GroupParams& params, std::uint64_t seed, AutFamily family = AutFamily::A);
/// Bob's side.
Session run_kex1_client(Stream& s, const GroupParams& params, std::uint64_t seed, AutFamily family = AutFamily::A);

}  // namespace pgkex::wire
