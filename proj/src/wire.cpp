#include "pgkex/wire.hpp"

#include <arpa/inet.h>
#include <cerrno>
#include <cstdio>
#include <cstring>
#include <json.hpp>
#include <netinet/in.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

namespace pgkex::wire {

namespace {

using nlohmann::ordered_json;

[[noreturn]] void io_error(const char* what) {
  throw Error(ErrorKind::IoError, std::string(what) + ": " + std::strerror(errno));
}

void set_timeout(int fd, std::chrono::milliseconds timeout) {
  timeval tv{};
  tv.tv_sec = static_cast<time_t>(timeout.count() / 1000);
  tv.tv_usec = static_cast<suseconds_t>((timeout.count() % 1000) * 1000);
  if (::setsockopt(fd, SOL_SOCKET, SO_RCVTIMEO, &tv, sizeof tv) != 0) io_error("setsockopt");
}

void wait_readable(int fd, std::chrono::milliseconds timeout, const char* what) {
  pollfd pfd{fd, POLLIN, 0};
  const int rc = ::poll(&pfd, 1, static_cast<int>(timeout.count()));
  if (rc == 0) throw Error(ErrorKind::Timeout, what);
  if (rc < 0) io_error("poll");
}

sockaddr_in make_addr(const std::string& host, std::uint16_t port) {
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(port);
  const std::string h = host == "localhost" ? "127.0.0.1" : host;
  if (::inet_pton(AF_INET, h.c_str(), &addr.sin_addr) != 1) {
    throw Error(ErrorKind::IoError, "not an IPv4 address: " + host);
  }
  return addr;
}

std::uint32_t read_be32(const std::uint8_t* b) {
  return (std::uint32_t{b[0]} << 24) | (std::uint32_t{b[1]} << 16) | (std::uint32_t{b[2]} << 8) | b[3];
}

template <class T>
T expect(const Message& msg, const char* what) {
  if (const auto* v = std::get_if<T>(&msg)) return *v;
  throw Error(ErrorKind::BadJson, std::string("expected ") + what);
}

ElementMsg expect_element(const Message& msg, const std::string& role) {
  ElementMsg e = expect<ElementMsg>(msg, "element");
  if (e.role != role) throw Error(ErrorKind::BadJson, "expected role '" + role + "', got '" + e.role + "'");
  return e;
}

void check_hello(const Hello& mine, const Hello& theirs) {
  if (!(mine == theirs)) {
    throw Error(ErrorKind::ParamMismatch, "peer uses (" + std::to_string(theirs.p) + "," + std::to_string(theirs.m) +
                                              "," + std::to_string(theirs.n) + ")");
  }
}

void check_digest(const std::string& mine, const std::string& theirs) {
  if (mine != theirs) throw Error(ErrorKind::DigestMismatch, "local " + mine + ", peer " + theirs);
}

}  // namespace

Element ElementMsg::to_element(const GroupParams& params) const {
  if (exps.size() != params.rank()) throw Error(ErrorKind::RangeViolation, "wrong number of exponents");
  for (std::size_t i = 0; i < exps.size(); ++i) {
    if (exps[i] >= params.modulus(i)) throw Error(ErrorKind::RangeViolation, "exponent out of range");
  }
  return Element(params, exps);
}

ElementMsg ElementMsg::of(std::string role, const Element& g) {
  return {std::move(role), std::vector<std::uint64_t>(g.exps().begin(), g.exps().end())};
}

std::string payload(const Message& msg) {
  ordered_json j;
  j["v"] = kVersion;
  if (const auto* h = std::get_if<Hello>(&msg)) {
    j["type"] = "hello";
    j["params"] = {h->p, h->m, h->n};
  } else if (const auto* e = std::get_if<ElementMsg>(&msg)) {
    j["type"] = "element";
    j["role"] = e->role;
    j["exps"] = e->exps;
  } else {
    j["type"] = "confirm";
    j["digest"] = std::get<Confirm>(msg).digest;
  }
  return j.dump();
}

Message parse_payload(std::string_view text) {
  const ordered_json j = ordered_json::parse(text, nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw Error(ErrorKind::BadJson, "payload is not a JSON object");
  try {
    if (!j.contains("v") || !j["v"].is_number_integer() || j["v"].get<int>() != kVersion) {
      throw Error(ErrorKind::BadVersion, "expected \"v\":1");
    }
    const std::string type = j.at("type").get<std::string>();
    if (type == "hello") {
      const auto& pv = j.at("params");
      if (!pv.is_array() || pv.size() != 3) throw Error(ErrorKind::BadJson, "params must be [p,m,n]");
      return Hello{pv[0].get<std::uint64_t>(), pv[1].get<unsigned>(), pv[2].get<unsigned>()};
    }
    if (type == "element") {
      return ElementMsg{j.at("role").get<std::string>(), j.at("exps").get<std::vector<std::uint64_t>>()};
    }
    if (type == "confirm") return Confirm{j.at("digest").get<std::string>()};
    throw Error(ErrorKind::BadJson, "unknown type '" + type + "'");
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::BadJson, e.what());
  }
}

Bytes encode(const Message& msg) {
  const std::string body = payload(msg);
  if (body.size() > kMaxPayload) throw Error(ErrorKind::FrameTooLarge, std::to_string(body.size()) + " bytes");
  const auto len = static_cast<std::uint32_t>(body.size());
  Bytes out{static_cast<std::uint8_t>(len >> 24), static_cast<std::uint8_t>(len >> 16),
            static_cast<std::uint8_t>(len >> 8), static_cast<std::uint8_t>(len)};
  out.insert(out.end(), body.begin(), body.end());
  return out;
}

Message decode(std::span<const std::uint8_t> frame) {
  if (frame.size() < 4) throw Error(ErrorKind::Truncated, "frame shorter than its length prefix");
  const std::uint32_t len = read_be32(frame.data());
  if (frame.size() - 4 != len) {
    throw Error(ErrorKind::Truncated, "length prefix " + std::to_string(len) + " vs " +
                                          std::to_string(frame.size() - 4) + " payload bytes");
  }
  if (len > kMaxPayload) throw Error(ErrorKind::FrameTooLarge, std::to_string(len) + " bytes");
  return parse_payload({reinterpret_cast<const char*>(frame.data()) + 4, len});
}

std::uint64_t fnv1a64(std::string_view data) {
  std::uint64_t h = 14695981039346656037ULL;
  for (const char c : data) {
    h ^= static_cast<std::uint8_t>(c);
    h *= 1099511628211ULL;
  }
  return h;
}

std::string key_digest(const Element& key) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(key.to_string())));
  return buf;
}

// ------------------------------------------------------------- streams

FdStream::FdStream(int fd, std::chrono::milliseconds timeout) : fd_(fd) { set_timeout(fd_, timeout); }

FdStream::FdStream(FdStream&& other) noexcept : fd_(std::exchange(other.fd_, -1)) {}

FdStream& FdStream::operator=(FdStream&& other) noexcept {
  if (this != &other) {
    if (fd_ >= 0) ::close(fd_);
    fd_ = std::exchange(other.fd_, -1);
  }
  return *this;
}

FdStream::~FdStream() {
  if (fd_ >= 0) ::close(fd_);
}

void FdStream::write_all(std::span<const std::uint8_t> data) {
  std::size_t done = 0;
  while (done < data.size()) {
    const ssize_t k = ::send(fd_, data.data() + done, data.size() - done, MSG_NOSIGNAL);
    if (k < 0) {
      if (errno == EINTR) continue;
      io_error("send");
    }
    done += static_cast<std::size_t>(k);
  }
}

void FdStream::read_exact(std::span<std::uint8_t> out) {
  std::size_t done = 0;
  while (done < out.size()) {
    const ssize_t k = ::recv(fd_, out.data() + done, out.size() - done, 0);
    if (k == 0) throw Error(ErrorKind::Truncated, "peer closed the connection");
    if (k < 0) {
      if (errno == EINTR) continue;
      if (errno == EAGAIN || errno == EWOULDBLOCK) throw Error(ErrorKind::Timeout, "no data from peer");
      io_error("recv");
    }
    done += static_cast<std::size_t>(k);
  }
}

std::pair<FdStream, FdStream> stream_pair() {
  int fds[2];
  if (::socketpair(AF_UNIX, SOCK_STREAM, 0, fds) != 0) io_error("socketpair");
  return {FdStream(fds[0]), FdStream(fds[1])};
}

void TamperStream::write_all(std::span<const std::uint8_t> data) {
  Bytes frame(data.begin(), data.end());
  mutate_(frames_++, frame);
  inner_.write_all(frame);
}

TcpListener::TcpListener(const std::string& host, std::uint16_t port) {
  fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
  if (fd_ < 0) io_error("socket");
  const int one = 1;
  ::setsockopt(fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
  sockaddr_in addr = make_addr(host, port);
  if (::bind(fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0) {
    const int saved = errno;
    ::close(fd_);
    errno = saved;
    io_error("bind");
  }
  if (::listen(fd_, 8) != 0) io_error("listen");
  socklen_t len = sizeof addr;
  ::getsockname(fd_, reinterpret_cast<sockaddr*>(&addr), &len);
  port_ = ntohs(addr.sin_port);
}

TcpListener::TcpListener(TcpListener&& other) noexcept
    : fd_(std::exchange(other.fd_, -1)), port_(other.port_) {}

TcpListener::~TcpListener() {
  if (fd_ >= 0) ::close(fd_);
}

FdStream TcpListener::accept(std::chrono::milliseconds timeout) {
  wait_readable(fd_, timeout, "no client connected");
  const int fd = ::accept(fd_, nullptr, nullptr);
  if (fd < 0) io_error("accept");
  return FdStream(fd, timeout);
}

FdStream connect_tcp(const std::string& host, std::uint16_t port, std::chrono::milliseconds timeout) {
  const int fd = ::socket(AF_INET, SOCK_STREAM, 0);
  if (fd < 0) io_error("socket");
  FdStream stream(fd, timeout);
  const sockaddr_in addr = make_addr(host, port);
  if (::connect(fd, reinterpret_cast<const sockaddr*>(&addr), sizeof addr) != 0) io_error("connect");
  return stream;
}

void send(Stream& s, const Message& msg, std::vector<Bytes>* log) {
  Bytes frame = encode(msg);
  s.write_all(frame);
  if (log) log->push_back(std::move(frame));
}

Message receive(Stream& s, std::vector<Bytes>* log) {
  Bytes frame(4);
  s.read_exact(frame);
  const std::uint32_t len = read_be32(frame.data());
  if (len > kMaxPayload) throw Error(ErrorKind::FrameTooLarge, std::to_string(len) + " bytes");
  frame.resize(4 + len);
  s.read_exact(std::span(frame).subspan(4));
  Message msg = decode(frame);
  if (log) log->push_back(std::move(frame));
  return msg;
}

// ------------------------------------------------------------- sessions

Session run_kex1_server(Stream& s, const GroupParams& params, std::uint64_t seed, AutFamily family) {
  std::vector<Bytes> frames;
  const Hello mine = Hello::of(params);
  const Hello theirs = expect<Hello>(receive(s, &frames), "hello");
  send(s, mine, &frames);
  check_hello(mine, theirs);

  Rng rng(seed);
  const Element g = sample_noncentral(params, rng);
  Kex1Party alice(sample_family(params, family, rng), g);
  const Element msg_a = alice.message();
  send(s, ElementMsg::of("public", g), &frames);
  send(s, ElementMsg::of("alice", msg_a), &frames);
  const Element msg_b = expect_element(receive(s, &frames), "bob").to_element(params);
  alice.receive(msg_b);

  const std::string digest = key_digest(alice.key());
  send(s, Confirm{digest}, &frames);
  check_digest(digest, expect<Confirm>(receive(s, &frames), "confirm").digest);
  return {alice.key(), digest, {params, g, msg_a, msg_b}, std::move(frames)};
}

Session run_kex1_client(Stream& s, const GroupParams& params, std::uint64_t seed, AutFamily family) {
  std::vector<Bytes> frames;
  const Hello mine = Hello::of(params);
  send(s, mine, &frames);
  check_hello(mine, expect<Hello>(receive(s, &frames), "hello"));

  const Element g = expect_element(receive(s, &frames), "public").to_element(params);
  const Element msg_a = expect_element(receive(s, &frames), "alice").to_element(params);
  Rng rng(seed);
  Kex1Party bob(sample_family(params, family, rng), g);
  const Element msg_b = bob.message();
  send(s, ElementMsg::of("bob", msg_b), &frames);
  bob.receive(msg_a);

  const std::string digest = key_digest(bob.key());
  const std::string peer = expect<Confirm>(receive(s, &frames), "confirm").digest;
  send(s, Confirm{digest}, &frames);
  check_digest(digest, peer);
  return {bob.key(), digest, {params, g, msg_a, msg_b}, std::move(frames)};
}

}  // namespace pgkex::wire
