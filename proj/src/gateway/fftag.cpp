#include "assemai/fftag.hpp"

#include <arpa/inet.h>
#include <fcntl.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstring>
#include <vector>

namespace assemai {

namespace {

constexpr std::size_t kMaxLine = 1024;
constexpr int kPollSliceMs = 50;
constexpr std::int64_t kRetryHintMs = 100;

bool send_all(int fd, std::string_view data) {
  while (!data.empty()) {
    const ssize_t n = ::send(fd, data.data(), data.size(), MSG_NOSIGNAL);
    if (n < 0) {
      if (errno == EINTR) continue;
      return false;
    }
    data.remove_prefix(static_cast<std::size_t>(n));
  }
  return true;
}

// True when the peer has closed (or reset) the connection.
bool peer_closed(int fd) {
  pollfd p{fd, POLLIN, 0};
  if (::poll(&p, 1, 0) <= 0) return false;
  if (p.revents & (POLLHUP | POLLERR)) return true;
  char c;
  const ssize_t n = ::recv(fd, &c, 1, MSG_PEEK | MSG_DONTWAIT);
  return n == 0 || (n < 0 && errno != EAGAIN && errno != EWOULDBLOCK);
}

std::vector<std::string_view> split_spaces(std::string_view s) {
  std::vector<std::string_view> parts;
  std::size_t i = 0;
  while (i <= s.size()) {
    const std::size_t j = s.find(' ', i);
    parts.push_back(s.substr(i, j == std::string_view::npos ? std::string_view::npos : j - i));
    if (j == std::string_view::npos) break;
    i = j + 1;
  }
  return parts;
}

bool parse_int(std::string_view s, std::int64_t& out) {
  if (s.empty() || s.size() > 18) return false;
  std::int64_t v = 0;
  std::size_t i = 0;
  const bool neg = s[0] == '-';
  if (neg) {
    if (s.size() == 1) return false;
    i = 1;
  }
  for (; i < s.size(); ++i) {
    if (s[i] < '0' || s[i] > '9') return false;
    v = v * 10 + (s[i] - '0');
  }
  out = neg ? -v : v;
  return true;
}

int connect_to(const std::string& host, std::uint16_t port, int timeout_ms) {
  addrinfo hints{};
  hints.ai_family = AF_UNSPEC;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* res = nullptr;
  const std::string port_text = std::to_string(port);
  if (const int rc = ::getaddrinfo(host.c_str(), port_text.c_str(), &hints, &res); rc != 0) {
    throw TransportError("cannot resolve " + host + ": " + ::gai_strerror(rc), kRetryHintMs);
  }
  std::string last_error = "no addresses";
  for (addrinfo* ai = res; ai; ai = ai->ai_next) {
    const int fd = ::socket(ai->ai_family, ai->ai_socktype | SOCK_CLOEXEC | SOCK_NONBLOCK, ai->ai_protocol);
    if (fd < 0) continue;
    int rc = ::connect(fd, ai->ai_addr, ai->ai_addrlen);
    if (rc < 0 && errno == EINPROGRESS) {
      pollfd p{fd, POLLOUT, 0};
      rc = ::poll(&p, 1, timeout_ms);
      if (rc == 0) {
        last_error = "connect timed out";
        ::close(fd);
        continue;
      }
      int err = 0;
      socklen_t len = sizeof err;
      ::getsockopt(fd, SOL_SOCKET, SO_ERROR, &err, &len);
      rc = err ? -1 : 0;
      errno = err;
    }
    if (rc < 0) {
      last_error = std::strerror(errno);
      ::close(fd);
      continue;
    }
    ::fcntl(fd, F_SETFL, ::fcntl(fd, F_GETFL) & ~O_NONBLOCK);
    const int one = 1;
    ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
    ::freeaddrinfo(res);
    return fd;
  }
  ::freeaddrinfo(res);
  throw TransportError("cannot connect to " + host + ":" + port_text + ": " + last_error, kRetryHintMs);
}

// Reads until a full line is buffered; returns it without the newline.
std::string read_line(int fd, std::string& buffer, int timeout_ms) {
  for (;;) {
    const std::size_t nl = buffer.find('\n');
    if (nl != std::string::npos) {
      std::string line = buffer.substr(0, nl);
      buffer.erase(0, nl + 1);
      return line;
    }
    if (buffer.size() > kMaxLine) throw ProtocolError("response line exceeds " + std::to_string(kMaxLine) + " bytes");
    pollfd p{fd, POLLIN, 0};
    const int rc = ::poll(&p, 1, timeout_ms);
    if (rc == 0) throw TransportError("timed out waiting for the tag server", kRetryHintMs);
    if (rc < 0) {
      if (errno == EINTR) continue;
      throw TransportError(std::string("poll failed: ") + std::strerror(errno), kRetryHintMs);
    }
    char chunk[512];
    const ssize_t n = ::recv(fd, chunk, sizeof chunk, 0);
    if (n == 0) throw TransportError("tag server closed the connection", kRetryHintMs);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw TransportError(std::string("receive failed: ") + std::strerror(errno), kRetryHintMs);
    }
    buffer.append(chunk, static_cast<std::size_t>(n));
  }
}

}  // namespace

ServerClock ServerClock::system() {
  ServerClock c;
  c.now_ms = [] {
    return std::chrono::duration_cast<std::chrono::milliseconds>(
               std::chrono::system_clock::now().time_since_epoch())
        .count();
  };
  c.sleep_ms = [](std::int64_t ms, const std::atomic<bool>& stop) {
    const auto until = std::chrono::steady_clock::now() + std::chrono::milliseconds(ms);
    while (!stop.load()) {
      const auto left = until - std::chrono::steady_clock::now();
      if (left <= std::chrono::nanoseconds::zero()) return true;
      std::this_thread::sleep_for(std::min<std::chrono::nanoseconds>(left, std::chrono::milliseconds(kPollSliceMs)));
    }
    return false;
  };
  return c;
}

ServerClock ServerClock::virtual_clock(std::int64_t start_ms) {
  auto t = std::make_shared<std::atomic<std::int64_t>>(start_ms);
  ServerClock c;
  c.now_ms = [t] { return t->load(); };
  c.sleep_ms = [t](std::int64_t ms, const std::atomic<bool>& stop) {
    if (stop.load()) return false;
    t->fetch_add(ms);
    return true;
  };
  return c;
}

CycleState CycleTagSource::state_at(std::int64_t now_ms) const {
  const std::int64_t elapsed = now_ms >= origin_ms_ ? now_ms - origin_ms_ : 0;
  return map_timestamp_to_state(elapsed, timing_).state;
}

std::optional<FftagRequest> parse_fftag_request(std::string_view line, std::string* error_response) {
  auto fail = [&](const char* msg) -> std::optional<FftagRequest> {
    if (error_response) *error_response = std::string("ERR ") + msg + "\n";
    return std::nullopt;
  };
  const auto parts = split_spaces(line);
  if (parts.empty() || parts[0].empty()) return fail("malformed request");
  if (parts[0] == "READ") {
    if (parts.size() != 2 || parts[1].empty()) return fail("malformed request");
    if (parts[1] != kCycleStateTag) return fail("unknown tag");
    return FftagRequest{FftagRequest::Kind::Read, std::string(parts[1]), 0};
  }
  if (parts[0] == "SUBSCRIBE") {
    if (parts.size() != 3 || parts[1].empty()) return fail("malformed request");
    if (parts[1] != kCycleStateTag) return fail("unknown tag");
    std::int64_t interval = 0;
    if (!parse_int(parts[2], interval) || interval < 1) return fail("invalid interval");
    return FftagRequest{FftagRequest::Kind::Subscribe, std::string(parts[1]), interval};
  }
  return fail("unknown command");
}

std::string fftag_value_line(std::string_view tag, int value, std::int64_t epoch_ms) {
  return "VALUE " + std::string(tag) + " " + std::to_string(value) + " " + std::to_string(epoch_ms) + "\n";
}

TagReading parse_fftag_response(std::string_view line) {
  if (!line.empty() && line.back() == '\n') line.remove_suffix(1);
  if (line.starts_with("ERR ")) throw ProtocolError("tag server error: " + std::string(line.substr(4)));
  const auto parts = split_spaces(line);
  std::int64_t value = 0, ts = 0;
  if (parts.size() != 4 || parts[0] != "VALUE" || parts[1].empty() || !parse_int(parts[2], value) ||
      !parse_int(parts[3], ts)) {
    throw ProtocolError("malformed FFTAG/1 response: '" + std::string(line) + "'");
  }
  if (value < 1 || value > kNumCycleStates) {
    throw ProtocolError("cycle state " + std::to_string(value) + " outside 1..21");
  }
  return {std::string(parts[1]), CycleState(static_cast<int>(value)), ts};
}

PlcServer::PlcServer(CycleTiming timing, const std::string& bind_address, std::uint16_t port, ServerClock clock)
    : source_(std::move(timing), clock.now_ms()), clock_(std::move(clock)) {
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(port);
  if (::inet_pton(AF_INET, bind_address.c_str(), &addr.sin_addr) != 1) {
    throw IoError("bind address must be an IPv4 literal, got '" + bind_address + "'");
  }
  listen_fd_ = ::socket(AF_INET, SOCK_STREAM | SOCK_CLOEXEC, 0);
  if (listen_fd_ < 0) throw IoError(std::string("socket: ") + std::strerror(errno));
  const int one = 1;
  ::setsockopt(listen_fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
  if (::bind(listen_fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) < 0 || ::listen(listen_fd_, 16) < 0) {
    const std::string err = std::strerror(errno);
    ::close(listen_fd_);
    throw IoError("cannot listen on " + bind_address + ":" + std::to_string(port) + ": " + err);
  }
  socklen_t len = sizeof addr;
  ::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&addr), &len);
  port_ = ntohs(addr.sin_port);
  acceptor_ = std::thread([this] { accept_loop(); });
}

PlcServer::~PlcServer() { stop(); }

void PlcServer::stop() {
  if (stopping_.exchange(true)) return;
  if (acceptor_.joinable()) acceptor_.join();
  ::close(listen_fd_);
  std::list<Client> clients;
  {
    std::lock_guard lock(clients_mutex_);
    clients.swap(clients_);
  }
  for (Client& c : clients) ::shutdown(c.fd, SHUT_RDWR);
  for (Client& c : clients) {
    c.worker.join();
    ::close(c.fd);
  }
}

void PlcServer::reap_finished() {
  std::lock_guard lock(clients_mutex_);
  for (auto it = clients_.begin(); it != clients_.end();) {
    if (it->done->load()) {
      it->worker.join();
      ::close(it->fd);
      it = clients_.erase(it);
    } else {
      ++it;
    }
  }
}

void PlcServer::accept_loop() {
  while (!stopping_.load()) {
    reap_finished();
    pollfd p{listen_fd_, POLLIN, 0};
    if (::poll(&p, 1, kPollSliceMs) <= 0) continue;
    const int fd = ::accept4(listen_fd_, nullptr, nullptr, SOCK_CLOEXEC);
    if (fd < 0) continue;
    const int one = 1;
    ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
    auto done = std::make_shared<std::atomic<bool>>(false);
    std::lock_guard lock(clients_mutex_);
    clients_.push_back({fd, std::thread([this, fd, done] {
                          serve_client(fd);
                          done->store(true);
                        }),
                        done});
  }
}

void PlcServer::serve_client(int fd) {
  std::string buffer;
  while (!stopping_.load()) {
    const std::size_t nl = buffer.find('\n');
    if (nl == std::string::npos) {
      if (buffer.size() > kMaxLine) {
        send_all(fd, "ERR line too long\n");
        return;
      }
      pollfd p{fd, POLLIN, 0};
      const int rc = ::poll(&p, 1, kPollSliceMs);
      if (rc == 0) continue;
      if (rc < 0 && errno == EINTR) continue;
      char chunk[512];
      const ssize_t n = rc < 0 ? -1 : ::recv(fd, chunk, sizeof chunk, 0);
      if (n <= 0) return;
      buffer.append(chunk, static_cast<std::size_t>(n));
      continue;
    }
    if (nl > kMaxLine) {
      send_all(fd, "ERR line too long\n");
      return;
    }
    std::string line = buffer.substr(0, nl);
    buffer.erase(0, nl + 1);
    if (!line.empty() && line.back() == '\r') line.pop_back();

    std::string err;
    const auto req = parse_fftag_request(line, &err);
    if (!req) {
      if (!send_all(fd, err)) return;
      continue;
    }
    if (req->kind == FftagRequest::Kind::Read) {
      const std::int64_t now = clock_.now_ms();
      if (!send_all(fd, fftag_value_line(req->tag, source_.state_at(now).value(), now))) return;
      continue;
    }
    // Subscription: the connection streams readings until the peer leaves.
    for (;;) {
      const std::int64_t now = clock_.now_ms();
      if (!send_all(fd, fftag_value_line(req->tag, source_.state_at(now).value(), now))) return;
      if (!clock_.sleep_ms(req->interval_ms, stopping_)) return;
      if (peer_closed(fd)) return;
    }
  }
}

TagReading read_tag(const std::string& host, std::uint16_t port, std::string_view tag, int timeout_ms) {
  const int fd = connect_to(host, port, timeout_ms);
  try {
    if (!send_all(fd, "READ " + std::string(tag) + "\n")) {
      throw TransportError("cannot send request to the tag server", kRetryHintMs);
    }
    std::string buffer;
    TagReading r = parse_fftag_response(read_line(fd, buffer, timeout_ms));
    ::close(fd);
    return r;
  } catch (...) {
    ::close(fd);
    throw;
  }
}

TagSubscription::TagSubscription(const std::string& host, std::uint16_t port, std::string_view tag,
                                 std::int64_t interval_ms, int timeout_ms)
    : fd_(connect_to(host, port, timeout_ms)), timeout_ms_(timeout_ms) {
  if (!send_all(fd_, "SUBSCRIBE " + std::string(tag) + " " + std::to_string(interval_ms) + "\n")) {
    close();
    throw TransportError("cannot send subscription to the tag server", kRetryHintMs);
  }
}

TagSubscription::~TagSubscription() { close(); }

TagReading TagSubscription::next() {
  if (fd_ < 0) throw TransportError("subscription is closed", kRetryHintMs);
  return parse_fftag_response(read_line(fd_, buffer_, timeout_ms_));
}

void TagSubscription::close() {
  if (fd_ >= 0) ::close(fd_);
  fd_ = -1;
}

}  // namespace assemai
